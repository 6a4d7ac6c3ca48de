// SPDX-License-Identifier: Apache-2.0
//
// patchrnn: command-line front end.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "patchrnn/checkpoint.hpp"
#include "patchrnn/dataset.hpp"
#include "patchrnn/errors.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/lexer.hpp"
#include "patchrnn/message.hpp"
#include "patchrnn/metrics.hpp"
#include "patchrnn/model.hpp"
#include "patchrnn/parallel.hpp"
#include "patchrnn/pipeline.hpp"
#include "patchrnn/scan.hpp"
#include "patchrnn/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace patchrnn::cli {
namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool quiet = false;
};

struct ModelOptions {
  ModelConfig model;
  Word2VecConfig w2v;
  std::string w2v_mode = "skip-gram";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", "key=value file with option defaults")
      ->check(CLI::ExistingFile)
      ->configurable(false);
  sub->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads for inference")
      ->envname("PATCHRNN_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("-q,--quiet", c.quiet, "Only print results");
}

void add_length_options(CLI::App* sub, ModelConfig& m) {
  sub->add_option("--code-len", m.code_seq_len, "Normalized code sequence length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--msg-len", m.msg_seq_len, "Normalized message length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--all-languages", m.include_all_languages,
                "Keep diffs of non-C files");
}

void add_w2v_options(CLI::App* sub, ModelOptions& o) {
  sub->add_option("--window", o.w2v.window, "word2vec context window")->capture_default_str();
  sub->add_option("--negative", o.w2v.negative_samples, "Negative samples per pair")
      ->capture_default_str();
  sub->add_option("--w2v-epochs", o.w2v.epochs, "word2vec epochs")->capture_default_str();
  sub->add_option("--w2v-lr", o.w2v.initial_lr, "word2vec initial learning rate")
      ->capture_default_str();
  sub->add_option("--min-count", o.w2v.min_count, "Minimum token count")
      ->capture_default_str();
  sub->add_option("--w2v-mode", o.w2v_mode, "skip-gram or cbow")
      ->check(CLI::IsMember({"skip-gram", "cbow"}))
      ->capture_default_str();
}

Word2VecConfig resolve_w2v(const ModelOptions& o, std::uint64_t seed) {
  Word2VecConfig w = o.w2v;
  w.dim = o.model.embed_dim;
  w.seed = seed;
  w.mode = o.w2v_mode == "cbow" ? Word2VecMode::kCbow : Word2VecMode::kSkipGram;
  try {
    w.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return w;
}

std::string config_hash(const CLI::App* sub) {
  return fnv1a_hex(sub->config_to_str(true, false));
}

// CLI11 only reads a config file attached to the top-level app, so the
// per-subcommand file is applied here. Command line and environment win.
void apply_config(CLI::App* sub) {
  const CLI::Option* file = sub->get_option("--config");
  if (file->count() == 0) return;
  const auto path = file->as<std::string>();
  for (const CLI::ConfigItem& item : CLI::ConfigBase().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    CLI::Option* opt = item.parents.empty() ? sub->get_option_no_throw("--" + item.name) : nullptr;
    if (opt == nullptr || !opt->get_configurable()) {
      throw UsageError("unknown key '" + item.fullname() + "' in " + path);
    }
    if (opt->count() > 0) continue;
    for (const std::string& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

void log_run(const CLI::App* sub, const Common& c) {
  if (c.quiet) return;
  std::cerr << "patchrnn " << PATCHRNN_VERSION << " " << sub->get_name()
            << " seed=" << c.seed << " config=" << config_hash(sub) << "\n";
}

void note(const Common& c, const std::string& text) {
  if (!c.quiet) std::cerr << text << "\n";
}

void report_failures(const Common& c, const std::vector<LoadFailure>& failures) {
  for (const LoadFailure& f : failures) note(c, "skipped " + f.path + ": " + f.message);
}

Dataset load_root(const std::string& root) {
  if (!fs::is_directory(root)) throw MissingRoot(root);
  return load_dataset(root);
}

std::vector<PreparedPatch> prepare_all(const std::vector<Sample>& samples,
                                       const PrepareOptions& options, std::size_t threads) {
  std::vector<PreparedPatch> out(samples.size());
  parallel_for(samples.size(), threads,
               [&](std::size_t i) { out[i] = prepare_patch(samples[i].patch, options); });
  return out;
}

std::string escape_newlines(std::string_view text) {
  std::string out;
  for (char ch : text) {
    if (ch == '\n') out += "\\n";
    else if (ch == '\r') out += "\\r";
    else out += ch;
  }
  return out;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return read_file(path);
}

// ---- preprocess -----------------------------------------------------------

json tokens_json(const std::vector<AbstractToken>& tokens) {
  json out = json::array();
  for (const AbstractToken& t : tokens) {
    if (t.is_pad()) break;
    out.push_back({t.text, static_cast<int>(t.kind), t.diff_type});
  }
  return out;
}

std::vector<AbstractToken> tokens_from_json(const json& j, std::size_t length) {
  std::vector<AbstractToken> out;
  for (const json& t : j) {
    out.push_back({t.at(0).get<std::string>(), static_cast<TokenKind>(t.at(1).get<int>()),
                   t.at(2).get<int>()});
  }
  return normalize_length(std::move(out), length);
}

std::size_t coverage_length(std::vector<std::size_t> lengths, double fraction) {
  if (lengths.empty()) return 0;
  std::sort(lengths.begin(), lengths.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(lengths.size())));
  return lengths[std::max<std::size_t>(rank, 1) - 1];
}

std::string length_report(const std::vector<PreparedPatch>& prepared, std::size_t code_len) {
  std::vector<std::size_t> lengths;
  for (const PreparedPatch& p : prepared) {
    lengths.push_back(std::max(p.raw_unpatched_length, p.raw_patched_length));
  }
  std::size_t within = 0;
  for (std::size_t n : lengths) within += n <= code_len;
  std::string out = "samples " + std::to_string(lengths.size()) + "\n";
  for (double q : {0.5, 0.9, 0.95, 0.99, 1.0}) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "p%-3.0f %zu\n", q * 100, coverage_length(lengths, q));
    out += buf;
  }
  out += "95% of samples fit in " + std::to_string(coverage_length(lengths, 0.95)) +
         " tokens\n";
  out += "code length " + std::to_string(code_len) + " covers " +
         (lengths.empty() ? std::string("0.00")
                          : format_percent(static_cast<double>(within) /
                                           static_cast<double>(lengths.size()))) +
         "% of samples\n";
  return out;
}

int run_preprocess(const CLI::App* sub, const Common& c, const std::string& root,
                   const std::string& out_dir, const ModelConfig& m) {
  log_run(sub, c);
  Dataset ds = load_root(root);
  report_failures(c, ds.failures);
  const PrepareOptions options = m.prepare_options();
  const auto prepared = prepare_all(ds.samples, options, c.threads);
  const fs::path out(out_dir);
  fs::create_directories(out / "cache");
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const PreparedPatch& p = prepared[i];
    json entry = {
        {"path", ds.samples[i].path},
        {"label", std::string(to_string(ds.samples[i].label))},
        {"code_length", options.code_length},
        {"message_length", options.message_length},
        {"raw_unpatched_length", p.raw_unpatched_length},
        {"raw_patched_length", p.raw_patched_length},
        {"unpatched", tokens_json(p.unpatched)},
        {"patched", tokens_json(p.patched)},
        {"message", std::vector<std::string>(
                        p.message.tokens.begin(),
                        p.message.tokens.begin() +
                            static_cast<std::ptrdiff_t>(p.message.valid_length()))},
    };
    char name[32];
    std::snprintf(name, sizeof name, "%06zu.json", i);
    write_file(out / "cache" / name, entry.dump() + "\n");
  }
  Vocabulary::build(code_corpus(prepared)).save(out / "code_vocab.txt");
  Vocabulary::build(message_corpus(prepared)).save(out / "message_vocab.txt");
  const std::string report = length_report(prepared, options.code_length);
  write_file(out / "length_report.txt", report);
  std::string failures;
  for (const LoadFailure& f : ds.failures) failures += f.path + "\t" + f.message + "\n";
  write_file(out / "failures.txt", failures);
  std::cout << report;
  return 0;
}

// ---- embed ----------------------------------------------------------------

std::vector<PreparedPatch> read_cache(const fs::path& dir) {
  const fs::path cache = dir / "cache";
  if (!fs::is_directory(cache)) throw MissingRoot(cache.string());
  std::vector<fs::path> files;
  for (const auto& it : fs::directory_iterator(cache)) {
    if (it.is_regular_file() && it.path().extension() == ".json") files.push_back(it.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PreparedPatch> out;
  for (const fs::path& f : files) {
    try {
      json j = json::parse(read_file(f));
      PreparedPatch p;
      const auto code_len = j.at("code_length").get<std::size_t>();
      p.unpatched = tokens_from_json(j.at("unpatched"), code_len);
      p.patched = tokens_from_json(j.at("patched"), code_len);
      p.message.tokens = j.at("message").get<std::vector<std::string>>();
      p.message.tokens.resize(j.at("message_length").get<std::size_t>(),
                              std::string(kPadToken));
      p.raw_unpatched_length = j.at("raw_unpatched_length").get<std::size_t>();
      p.raw_patched_length = j.at("raw_patched_length").get<std::size_t>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error("bad cache entry " + f.string() + ": " + e.what());
    }
  }
  if (out.empty()) throw EmptyCorpus();
  return out;
}

int run_embed(const CLI::App* sub, const Common& c, const std::string& cache_dir,
              const std::string& out_dir, const ModelOptions& o) {
  const Word2VecConfig w2v = resolve_w2v(o, c.seed);
  log_run(sub, c);
  const auto prepared = read_cache(cache_dir);
  const fs::path out(out_dir);
  fs::create_directories(out);
  EmbeddingTable code = embed_corpus(code_corpus(prepared), w2v);
  EmbeddingTable msg = embed_corpus(message_corpus(prepared), w2v);
  code.save(out / "code.w2v");
  msg.save(out / "message.w2v");
  std::cout << "code vocabulary " << code.size() << ", message vocabulary " << msg.size()
            << ", dim " << w2v.dim << "\n";
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string root;
  std::string out_dir;
  std::string embeddings;
  double train_fraction = 0.8;
  double holdout = 0.0;
};

std::vector<Sample> pick(const std::vector<Sample>& all, const std::vector<std::size_t>& idx) {
  std::vector<Sample> out;
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

int run_train(const CLI::App* sub, const Common& c, const TrainArgs& a, ModelOptions o) {
  o.model.seed = c.seed;
  try {
    o.model.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (a.holdout < 0.0 || a.holdout >= 1.0) throw UsageError("--holdout must be in [0, 1)");
  const Word2VecConfig w2v = resolve_w2v(o, c.seed);
  log_run(sub, c);

  Dataset ds = load_root(a.root);
  report_failures(c, ds.failures);
  auto [train_idx, test_idx] = split_indices(ds.samples.size(), a.train_fraction, c.seed);
  std::vector<Sample> fit = pick(ds.samples, train_idx);
  std::vector<Sample> held;
  if (a.holdout > 0.0) {
    auto [f, h] = split_indices(fit.size(), 1.0 - a.holdout, c.seed + 1);
    held = pick(fit, h);
    fit = pick(fit, f);
  }
  note(c, "training on " + std::to_string(fit.size()) + " samples, holdout " +
              std::to_string(held.size()) + ", test " + std::to_string(test_idx.size()));

  const PrepareOptions options = o.model.prepare_options();
  const auto prepared = prepare_all(fit, options, c.threads);
  EmbeddingTable code_table, msg_table;
  if (!a.embeddings.empty()) {
    code_table = EmbeddingTable::load(fs::path(a.embeddings) / "code.w2v");
    msg_table = EmbeddingTable::load(fs::path(a.embeddings) / "message.w2v");
  } else {
    code_table = embed_corpus(code_corpus(prepared), w2v);
    msg_table = embed_corpus(message_corpus(prepared), w2v);
  }
  PatchRnnModel model(o.model, code_table, msg_table);

  auto encode_all = [&](const std::vector<Sample>& samples,
                        const std::vector<PreparedPatch>& prep) {
    std::vector<EncodedSample> out(samples.size());
    parallel_for(samples.size(), c.threads, [&](std::size_t i) {
      out[i] = model.encode(prep[i]);
      out[i].label = samples[i].label;
    });
    return out;
  };
  const auto train_set = encode_all(fit, prepared);
  const auto holdout_set = encode_all(held, prepare_all(held, options, c.threads));

  TrainOptions opts;
  if (!holdout_set.empty()) opts.holdout = &holdout_set;
  opts.on_epoch = [&](const EpochRecord& r) {
    if (c.quiet) return;
    std::string line = "epoch " + std::to_string(r.epoch) + " loss " +
                       format_fixed(r.train_loss, 6) + " acc " +
                       format_percent(r.train_accuracy) + "%";
    if (r.validation_accuracy) {
      line += " holdout acc " + format_percent(*r.validation_accuracy) + "%";
    }
    std::cerr << line << "\n";
  };
  const TrainingHistory history = train(model, train_set, opts);

  const fs::path out(a.out_dir);
  fs::create_directories(out);
  model.save(out / "model.ckpt");
  json sidecar = {
      {"version", PATCHRNN_VERSION},
      {"seed", c.seed},
      {"config_hash", config_hash(sub)},
      {"model_config", json::parse(o.model.to_json())},
      {"train_size", fit.size()},
      {"holdout_size", held.size()},
      {"test_size", test_idx.size()},
      {"fingerprint", model.fingerprint()},
      {"history", json::parse(history.to_json())},
  };
  write_file(out / "history.json", sidecar.dump(2) + "\n");
  std::cout << "wrote " << (out / "model.ckpt").string() << " (" << model.fingerprint()
            << ")\n";
  return 0;
}

// ---- evaluate / predict / scan --------------------------------------------

int run_evaluate(const CLI::App* sub, const Common& c, const std::string& model_path,
                 const std::string& root, const std::string& which, double train_fraction,
                 const std::string& json_out) {
  log_run(sub, c);
  PatchRnnModel model = PatchRnnModel::load(model_path);
  Dataset ds = load_root(root);
  report_failures(c, ds.failures);
  std::vector<Sample> samples = ds.samples;
  if (which != "all") {
    auto [train_part, test_part] = split(ds.samples, train_fraction, c.seed);
    samples = which == "train" ? train_part : test_part;
  }
  if (samples.empty()) throw UsageError("the '" + which + "' split is empty");
  Evaluation e = evaluate(model, samples, c.threads);
  std::cout << format_metrics_table(e.confusion, e.metrics);
  if (!json_out.empty()) write_file(json_out, metrics_json(e.confusion, e.metrics) + "\n");
  return 0;
}

int run_predict(const CLI::App* sub, const Common& c, const std::string& model_path,
                const std::vector<std::string>& files) {
  log_run(sub, c);
  PatchRnnModel model = PatchRnnModel::load(model_path);
  std::vector<std::optional<Prediction>> results(files.size());
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), c.threads, [&](std::size_t i) {
    try {
      results[i] = model.predict(parse_patch(read_input(files[i])));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  int status = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!results[i]) {
      std::cerr << files[i] << ": " << errors[i] << "\n";
      status = kRuntimeFailure;
      continue;
    }
    char prob[32];
    std::snprintf(prob, sizeof prob, "%.6f", results[i]->probability);
    std::cout << files[i] << " " << to_string(results[i]->label) << " " << prob << "\n";
  }
  return status;
}

int run_scan(const CLI::App* sub, const Common& c, const std::string& model_path,
             const std::string& dir, const std::string& json_out) {
  log_run(sub, c);
  if (!fs::is_directory(dir)) throw MissingRoot(dir);
  PatchRnnModel model = PatchRnnModel::load(model_path);
  ScanReport report = scan_commits(model, read_scan_inputs(dir), c.threads);
  std::cout << report.to_text();
  if (!json_out.empty()) write_file(json_out, report.to_json() + "\n");
  return 0;
}

// ---- debug commands ---------------------------------------------------------

int run_lex(const std::string& path) {
  for (const CodeToken& t : lex(read_input(path))) {
    std::cout << to_string(t.kind) << "\t" << escape_newlines(t.text) << "\n";
  }
  return 0;
}

int run_preprocess_msg(const std::string& path, bool keep_stopwords, bool no_stem) {
  MessageOptions options;
  options.remove_stopwords = !keep_stopwords;
  options.stem = !no_stem;
  for (const std::string& w : message_words(read_input(path), options)) {
    std::cout << w << "\n";
  }
  return 0;
}

int main_impl(int argc, char** argv) {
  CLI::App app{"Security patch classification with twin recurrent networks"};
  app.set_version_flag("--version", std::string("patchrnn ") + PATCHRNN_VERSION);
  app.require_subcommand(1);

  Common common;
  ModelOptions mo;
  int status = 0;

  // preprocess
  std::string pre_root, pre_out;
  auto* pre = app.add_subcommand("preprocess", "Tokenize a dataset into a cache");
  pre->add_option("root", pre_root, "Dataset root")->required();
  pre->add_option("-o,--out", pre_out, "Output directory")->required()->configurable(false);
  add_length_options(pre, mo.model);
  add_common(pre, common);
  pre->callback([&] {
    apply_config(pre);
    status = run_preprocess(pre, common, pre_root, pre_out, mo.model);
  });

  // embed
  std::string emb_cache, emb_out;
  auto* emb = app.add_subcommand("embed", "Train word2vec tables from a preprocess cache");
  emb->add_option("--cache", emb_cache, "Directory written by preprocess")->required();
  emb->add_option("-o,--out", emb_out, "Output directory")->required()->configurable(false);
  emb->add_option("--dim", mo.model.embed_dim, "Embedding width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_w2v_options(emb, mo);
  add_common(emb, common);
  emb->callback([&] {
    apply_config(emb);
    status = run_embed(emb, common, emb_cache, emb_out, mo);
  });

  // train
  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a model on a labeled dataset");
  tr->add_option("root", ta.root, "Dataset root")->required();
  tr->add_option("-o,--out", ta.out_dir, "Output directory")->required()->configurable(false);
  tr->add_option("--embeddings", ta.embeddings, "Directory written by embed")
      ->check(CLI::ExistingDirectory);
  tr->add_option("--train-fraction", ta.train_fraction, "Share of samples used for training")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tr->add_option("--holdout", ta.holdout,
                 "Share of the training part kept for picking the best epoch")
      ->capture_default_str();
  tr->add_option("--epochs", mo.model.epochs, "Training epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tr->add_option("--batch-size", mo.model.batch_size, "Mini-batch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tr->add_option("--lr", mo.model.lr, "Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tr->add_option("--security-weight", mo.model.security_weight,
                 "Loss weight of security samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tr->add_option("--dim", mo.model.embed_dim, "Embedding width")->capture_default_str();
  tr->add_option("--hidden", mo.model.lstm_hidden, "LSTM hidden size")->capture_default_str();
  tr->add_option("--code-layers", mo.model.code_lstm_layers, "Stacked code LSTM layers")
      ->capture_default_str();
  tr->add_option("--code-fc", mo.model.code_fc_dims, "Code dense widths")
      ->delimiter(',')
      ->capture_default_str();
  tr->add_option("--msg-fc", mo.model.msg_fc_dims, "Message dense widths")
      ->delimiter(',')
      ->capture_default_str();
  tr->add_option("--fusion-fc", mo.model.fusion_fc_dims, "Fusion dense widths")
      ->delimiter(',')
      ->capture_default_str();
  tr->add_flag("!--freeze-embeddings", mo.model.embedding_trainable,
               "Keep the word2vec tables fixed");
  add_length_options(tr, mo.model);
  add_w2v_options(tr, mo);
  add_common(tr, common);
  tr->callback([&] {
    apply_config(tr);
    status = run_train(tr, common, ta, mo);
  });

  // evaluate
  std::string ev_model, ev_root, ev_split = "all", ev_json;
  double ev_fraction = 0.8;
  auto* ev = app.add_subcommand("evaluate", "Confusion matrix and metrics on a dataset");
  ev->add_option("root", ev_root, "Dataset root")->required();
  ev->add_option("-m,--model", ev_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("--split", ev_split, "all, train or test")
      ->check(CLI::IsMember({"all", "train", "test"}))
      ->capture_default_str();
  ev->add_option("--train-fraction", ev_fraction, "Must match the one used for training")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  ev->add_option("--json", ev_json, "Also write metrics as JSON");
  add_common(ev, common);
  ev->callback([&] {
    apply_config(ev);
    status = run_evaluate(ev, common, ev_model, ev_root, ev_split, ev_fraction, ev_json);
  });

  // predict
  std::string pr_model;
  std::vector<std::string> pr_files;
  auto* pr = app.add_subcommand("predict", "Classify patch files");
  pr->add_option("-m,--model", pr_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  pr->add_option("patches", pr_files, "Patch files ('-' for stdin)")->required();
  add_common(pr, common);
  pr->callback([&] {
    apply_config(pr);
    status = run_predict(pr, common, pr_model, pr_files);
  });

  // scan
  std::string sc_model, sc_dir, sc_json;
  auto* sc = app.add_subcommand("scan", "Classify every commit file under a directory");
  sc->add_option("dir", sc_dir, "Directory of patch files")->required();
  sc->add_option("-m,--model", sc_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  sc->add_option("--json", sc_json, "Also write the report as JSON");
  add_common(sc, common);
  sc->callback([&] {
    apply_config(sc);
    status = run_scan(sc, common, sc_model, sc_dir, sc_json);
  });

  // lex
  std::string lex_path = "-";
  auto* lx = app.add_subcommand("lex", "Print kind<TAB>text for each code token");
  lx->add_option("file", lex_path, "Source file ('-' for stdin)")->capture_default_str();
  add_common(lx, common);
  lx->callback([&] {
    apply_config(lx);
    log_run(lx, common);
    status = run_lex(lex_path);
  });

  // preprocess-msg
  std::string msg_path = "-";
  bool keep_stopwords = false, no_stem = false;
  auto* pm = app.add_subcommand("preprocess-msg", "Print the stems of a commit message");
  pm->add_option("file", msg_path, "Message file ('-' for stdin)")->capture_default_str();
  pm->add_flag("--keep-stopwords", keep_stopwords, "Do not drop stopwords");
  pm->add_flag("--no-stem", no_stem, "Do not stem");
  add_common(pm, common);
  pm->callback([&] {
    apply_config(pm);
    log_run(pm, common);
    status = run_preprocess_msg(msg_path, keep_stopwords, no_stem);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const MissingRoot& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return status;
}

}  // namespace
}  // namespace patchrnn::cli

int main(int argc, char** argv) { return patchrnn::cli::main_impl(argc, argv); }
