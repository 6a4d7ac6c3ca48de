// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/scan.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>

#include "patchrnn/errors.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/parallel.hpp"

namespace patchrnn {

ScanReport scan_commits(const PatchRnnModel& model,
                        const std::vector<ScanInput>& inputs,
                        std::size_t threads) {
  ScanReport report;
  report.model_version =
      std::string("patchrnn-") + PATCHRNN_VERSION + "+" + model.fingerprint();
  report.rows.resize(inputs.size());
  parallel_for(inputs.size(), threads, [&](std::size_t i) {
    ScanRow& row = report.rows[i];
    row.path = inputs[i].path;
    try {
      PatchFile patch = parse_patch(inputs[i].text);
      row.commit_id = patch.commit_id;
      Prediction p = model.predict(patch);
      row.label = p.label;
      row.probability = p.probability;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ScanRow& a, const ScanRow& b) {
              if (a.error.has_value() != b.error.has_value()) return !a.error;
              if (!a.error && *a.probability != *b.probability) {
                return *a.probability > *b.probability;
              }
              return a.path < b.path;
            });
  for (const ScanRow& r : report.rows) {
    if (r.error) continue;
    ++report.total;
    if (r.label == Label::kSecurity) ++report.flagged;
  }
  return report;
}

std::string ScanReport::to_text() const {
  std::string out;
  char buf[64];
  for (const ScanRow& r : rows) {
    if (r.error) {
      out += r.path + "\terror\t" + *r.error + "\n";
      continue;
    }
    std::snprintf(buf, sizeof buf, "%.6f", *r.probability);
    out += r.path + "\t" + std::string(to_string(*r.label)) + "\t" + buf;
    if (r.commit_id) out += "\t" + *r.commit_id;
    out += "\n";
  }
  out += "flagged " + std::to_string(flagged) + " of " + std::to_string(total);
  const std::size_t errors = rows.size() - total;
  if (errors) out += " (" + std::to_string(errors) + " unreadable)";
  out += "\nmodel " + model_version + "\n";
  return out;
}

std::string ScanReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ScanRow& r : rows) {
    nlohmann::json row = {{"path", r.path}};
    row["commit_id"] =
        r.commit_id ? nlohmann::json(*r.commit_id) : nlohmann::json(nullptr);
    row["label"] = r.label ? nlohmann::json(std::string(to_string(*r.label)))
                           : nlohmann::json(nullptr);
    row["probability"] =
        r.probability ? nlohmann::json(*r.probability) : nlohmann::json(nullptr);
    if (r.error) row["error"] = *r.error;
    rows_json.push_back(row);
  }
  nlohmann::json j = {
      {"rows", rows_json},
      {"summary",
       {{"flagged", flagged}, {"total", total}, {"model_version", model_version}}}};
  return j.dump(2);
}

std::vector<ScanInput> read_scan_inputs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw MissingRoot(dir.string());
  std::vector<ScanInput> inputs;
  for (const auto& it : std::filesystem::recursive_directory_iterator(dir)) {
    if (!it.is_regular_file()) continue;
    inputs.push_back({std::filesystem::relative(it.path(), dir).generic_string(),
                      read_file(it.path())});
  }
  std::sort(inputs.begin(), inputs.end(),
            [](const ScanInput& a, const ScanInput& b) { return a.path < b.path; });
  return inputs;
}

}  // namespace patchrnn
