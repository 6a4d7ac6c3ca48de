// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>

#include "patchrnn/errors.hpp"

namespace patchrnn {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string cell(const std::optional<double>& v, bool percent) {
  if (!v) return "n/a";
  return percent ? format_percent(*v) + "%" : format_fixed(*v, 3);
}

}  // namespace

void ConfusionMatrix::add(Label truth, Label predicted) {
  const bool t = truth == Label::kSecurity;
  const bool p = predicted == Label::kSecurity;
  if (t && p) ++tp;
  else if (!t && p) ++fp;
  else if (!t && !p) ++tn;
  else ++fn;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyMatrix();
  Metrics m;
  m.accuracy = *ratio(cm.tp + cm.tn, cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.fpr = ratio(cm.fp, cm.fp + cm.tn);
  m.fnr = ratio(cm.fn, cm.fn + cm.tp);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

std::string format_fixed(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double rounded = std::round(value * scale) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
  return buf;
}

std::string format_percent(double fraction, int decimals) {
  return format_fixed(fraction * 100.0, decimals);
}

std::string format_metrics_table(const ConfusionMatrix& cm, const Metrics& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "                    Actual security   Actual non-security\n"
                "Pred. security      %15llu   %19llu\n"
                "Pred. non-security  %15llu   %19llu\n",
                static_cast<unsigned long long>(cm.tp),
                static_cast<unsigned long long>(cm.fp),
                static_cast<unsigned long long>(cm.fn),
                static_cast<unsigned long long>(cm.tn));
  std::string out = buf;
  out += "\naccuracy   " + format_percent(m.accuracy) + "%\n";
  out += "precision  " + cell(m.precision, true) + "\n";
  out += "recall     " + cell(m.recall, true) + "\n";
  out += "f1         " + cell(m.f1, false) + "\n";
  out += "fpr        " + cell(m.fpr, true) + "\n";
  out += "fnr        " + cell(m.fnr, true) + "\n";
  out += "total      " + std::to_string(cm.total()) + "\n";
  return out;
}

std::string metrics_json(const ConfusionMatrix& cm, const Metrics& m) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j = {
      {"confusion_matrix",
       {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}}},
      {"accuracy", m.accuracy},
      {"precision", opt(m.precision)},
      {"recall", opt(m.recall)},
      {"f1", opt(m.f1)},
      {"fpr", opt(m.fpr)},
      {"fnr", opt(m.fnr)},
  };
  return j.dump(2);
}

}  // namespace patchrnn
