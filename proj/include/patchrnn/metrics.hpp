// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "patchrnn/patch.hpp"

namespace patchrnn {

/// Positive class = security.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  void add(Label truth, Label predicted);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// A field is empty when its denominator is zero; f1 is empty unless both
/// precision and recall are defined and not both zero.
struct Metrics {
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> fpr;
  std::optional<double> fnr;
};

/// Throws EmptyMatrix when the matrix holds no samples.
Metrics compute_metrics(const ConfusionMatrix& cm);

/// Fraction as a percentage rounded half-away-from-zero to `decimals`
/// places, e.g. 0.835699 -> "83.57".
std::string format_percent(double fraction, int decimals = 2);
std::string format_fixed(double value, int decimals);

/// Confusion matrix laid out as predicted x actual, followed by the
/// derived metrics. Undefined metrics print as "n/a".
std::string format_metrics_table(const ConfusionMatrix& cm, const Metrics& m);

std::string metrics_json(const ConfusionMatrix& cm, const Metrics& m);

}  // namespace patchrnn
