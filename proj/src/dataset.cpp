// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "patchrnn/errors.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/parallel.hpp"
#include "patchrnn/rng.hpp"

namespace patchrnn {

namespace fs = std::filesystem;

namespace {

// Minimal CSV: comma separated, optional double quotes with "" escapes.
std::vector<std::string> csv_fields(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

struct Entry {
  std::string rel;
  Label label;
  std::string origin;
};

void load_entry(const fs::path& root, const Entry& entry, Dataset& out) {
  try {
    PatchFile patch = parse_patch(read_file(root / entry.rel));
    patch.label = entry.label;
    out.samples.push_back({entry.rel, std::move(patch), entry.label, entry.origin});
  } catch (const Error& e) {
    out.failures.push_back({entry.rel, e.what()});
  }
}

}  // namespace

Dataset load_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw MissingRoot(root.string());
  Dataset out;
  std::vector<Entry> entries;
  const fs::path manifest = root / "labels.csv";
  if (fs::is_regular_file(manifest)) {
    const std::string text = read_file(manifest);
    auto lines = split_lines(text);
    std::set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty() || lines[i] == "\r") continue;
      auto fields = csv_fields(lines[i]);
      const std::string where = "labels.csv:" + std::to_string(i + 1);
      if (fields.size() != 2) {
        out.failures.push_back({where, "expected path,label"});
        continue;
      }
      auto label = parse_label(fields[1]);
      if (!label) {
        out.failures.push_back({fields[0], "unknown label '" + fields[1] + "'"});
        continue;
      }
      if (!seen.insert(fields[0]).second) {
        out.failures.push_back({fields[0], "duplicate path in " + where});
        continue;
      }
      entries.push_back({fields[0], *label, "labels.csv"});
    }
    if (lines.empty() || csv_fields(lines[0]) != std::vector<std::string>{"path", "label"}) {
      out.failures.push_back({"labels.csv", "missing 'path,label' header"});
    }
  } else {
    for (auto [dir, label] : {std::pair{"security", Label::kSecurity},
                              std::pair{"non_security", Label::kNonSecurity}}) {
      const fs::path sub = root / dir;
      if (!fs::is_directory(sub)) continue;
      for (const auto& it : fs::recursive_directory_iterator(sub)) {
        if (!it.is_regular_file()) continue;
        entries.push_back({fs::relative(it.path(), root).generic_string(), label,
                           "directory"});
      }
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.rel < b.rel; });
  for (const Entry& e : entries) load_entry(root, e, out);
  if (out.samples.empty()) {
    throw AllSamplesFailed("no loadable samples under " + root.string() + " (" +
                           std::to_string(out.failures.size()) + " failures)");
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("train fraction must be in [0, 1]");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<std::vector<Sample>, std::vector<Sample>> split(
    const std::vector<Sample>& samples, double train_fraction, std::uint64_t seed) {
  auto [a, b] = split_indices(samples.size(), train_fraction, seed);
  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  for (std::size_t i : a) out.first.push_back(samples[i]);
  for (std::size_t i : b) out.second.push_back(samples[i]);
  return out;
}

Evaluation evaluate_encoded(const PatchRnnModel& model,
                            const std::vector<EncodedSample>& samples,
                            std::size_t threads) {
  Evaluation ev;
  ev.predictions.resize(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    ev.predictions[i] = model.predict(samples[i]);
  });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].label) throw Error("evaluation sample without a label");
    ev.confusion.add(*samples[i].label, ev.predictions[i].label);
  }
  ev.metrics = compute_metrics(ev.confusion);
  return ev;
}

Evaluation evaluate(const PatchRnnModel& model, const std::vector<Sample>& samples,
                    std::size_t threads) {
  std::vector<EncodedSample> encoded(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    encoded[i] = model.encode(samples[i].patch);
    encoded[i].label = samples[i].label;
  });
  return evaluate_encoded(model, encoded, threads);
}

}  // namespace patchrnn
