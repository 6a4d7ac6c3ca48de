// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "patchrnn/errors.hpp"
#include "patchrnn/lexer.hpp"
#include "patchrnn/message.hpp"
#include "patchrnn/metrics.hpp"
#include "patchrnn/model.hpp"
#include "patchrnn/patch.hpp"
#include "patchrnn/pipeline.hpp"
#include "patchrnn/scan.hpp"
#include "patchrnn/trainer.hpp"

namespace py = pybind11;
using namespace patchrnn;

namespace {

py::list token_list(const std::vector<AbstractToken>& tokens) {
  py::list out;
  for (const AbstractToken& t : tokens) {
    if (t.is_pad()) break;
    out.append(py::make_tuple(t.text, std::string(to_string(t.kind)), t.diff_type));
  }
  return out;
}

py::dict metrics_dict(const ConfusionMatrix& cm) {
  const Metrics m = compute_metrics(cm);
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  d["fpr"] = m.fpr;
  d["fnr"] = m.fnr;
  return d;
}

Label label_from(const std::string& text) {
  auto label = parse_label(text);
  if (!label) throw ConfigError("unknown label '" + text + "'");
  return *label;
}

PatchRnnModel train_model(const std::vector<std::string>& texts,
                          const std::vector<std::string>& labels,
                          const std::string& config_json, std::size_t w2v_epochs) {
  if (texts.size() != labels.size()) {
    throw DimensionMismatch("got " + std::to_string(texts.size()) + " patches and " +
                            std::to_string(labels.size()) + " labels");
  }
  const ModelConfig config = ModelConfig::from_json(config_json);
  config.validate();
  std::vector<PatchFile> patches;
  std::vector<PreparedPatch> prepared;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    PatchFile p = parse_patch(texts[i]);
    p.label = label_from(labels[i]);
    prepared.push_back(prepare_patch(p, config.prepare_options()));
    patches.push_back(std::move(p));
  }
  Word2VecConfig w2v;
  w2v.dim = config.embed_dim;
  w2v.epochs = w2v_epochs;
  w2v.seed = config.seed;
  PatchRnnModel model = build_model(prepared, config, w2v);
  std::vector<EncodedSample> samples;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    EncodedSample s = model.encode(prepared[i]);
    s.label = patches[i].label;
    samples.push_back(std::move(s));
  }
  py::gil_scoped_release release;
  train(model, samples);
  return model;
}

}  // namespace

PYBIND11_MODULE(_patchrnn, m) {
  m.attr("__version__") = PATCHRNN_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<MalformedPatch>(m, "MalformedPatch", base.ptr());
  py::register_exception<HunkCountMismatch>(m, "HunkCountMismatch", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());

  m.def("lex", [](const std::string& source) {
    py::list out;
    for (const CodeToken& t : lex(source)) {
      out.append(py::make_tuple(std::string(to_string(t.kind)), t.text));
    }
    return out;
  }, py::arg("source"), "(kind, text) pairs of a C/C++ fragment");

  m.def("porter_stem", &porter_stem, py::arg("word"));
  m.def("message_words", [](const std::string& message, bool remove_stopwords, bool stem) {
    return message_words(message, {.remove_stopwords = remove_stopwords, .stem = stem});
  }, py::arg("message"), py::arg("remove_stopwords") = true, py::arg("stem") = true);
  m.def("preprocess_message", [](const std::string& message, std::size_t length) {
    return preprocess_message(message, length).tokens;
  }, py::arg("message"), py::arg("length") = kDefaultMessageLength);

  py::class_<PatchFile>(m, "Patch")
      .def_readonly("commit_id", &PatchFile::commit_id)
      .def_readonly("message", &PatchFile::message)
      .def_readonly("warnings", &PatchFile::warnings)
      .def_property_readonly("files", [](const PatchFile& p) {
        std::vector<std::string> paths;
        for (const FileDiff& f : p.file_diffs) paths.push_back(f.effective_path());
        return paths;
      });
  m.def("parse_patch", &parse_patch, py::arg("text"));

  m.def("prepare", [](const std::string& text, std::size_t code_length,
                      std::size_t message_length) {
    PrepareOptions o;
    o.code_length = code_length;
    o.message_length = message_length;
    const PreparedPatch p = prepare_patch_text(text, o);
    py::dict d;
    d["unpatched"] = token_list(p.unpatched);
    d["patched"] = token_list(p.patched);
    std::vector<std::string> words(p.message.tokens.begin(),
                                   p.message.tokens.begin() +
                                       static_cast<long>(p.message.valid_length()));
    d["message"] = words;
    return d;
  }, py::arg("text"), py::arg("code_length") = kDefaultCodeLength,
     py::arg("message_length") = kDefaultMessageLength,
     "Abstracted token streams (pads dropped) and message stems");

  m.def("compute_metrics", [](std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                              std::uint64_t fn) {
    return metrics_dict(ConfusionMatrix{tp, fp, tn, fn});
  }, py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"));
  m.def("format_percent", &format_percent, py::arg("fraction"), py::arg("decimals") = 2);

  m.def("default_config_json", [] { return ModelConfig{}.to_json(); });

  py::class_<PatchRnnModel>(m, "Model")
      .def_static("load", &PatchRnnModel::load, py::arg("path"))
      .def_static("train", &train_model, py::arg("patches"), py::arg("labels"),
                  py::arg("config_json"), py::arg("w2v_epochs") = 5)
      .def("save", &PatchRnnModel::save, py::arg("path"))
      .def_property_readonly("fingerprint", &PatchRnnModel::fingerprint)
      .def_property_readonly("config_json",
                             [](const PatchRnnModel& model) { return model.config().to_json(); })
      .def_property_readonly("parameter_count", &PatchRnnModel::parameter_count)
      .def("predict", [](const PatchRnnModel& model, const std::string& text) {
        const Prediction p = model.predict(parse_patch(text));
        return py::make_tuple(std::string(to_string(p.label)), p.probability);
      }, py::arg("text"), "(label, security probability)")
      .def("scan", [](const PatchRnnModel& model, const std::vector<std::pair<std::string, std::string>>& items,
                      std::size_t threads) {
        std::vector<ScanInput> inputs;
        for (const auto& [path, text] : items) inputs.push_back({path, text});
        std::string json;
        {
          py::gil_scoped_release release;
          json = scan_commits(model, inputs, threads).to_json();
        }
        return json;
      }, py::arg("items"), py::arg("threads") = 1, "JSON scan report for (name, text) pairs");
}
