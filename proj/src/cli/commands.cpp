/*
 * Copyright 2026 The MulCom Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mulcom/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "mulcom/checkpoint.hpp"
#include "mulcom/corpus.hpp"
#include "mulcom/dataset.hpp"
#include "mulcom/kernels.hpp"
#include "mulcom/log.hpp"
#include "mulcom/loss.hpp"
#include "mulcom/metrics.hpp"

namespace mulcom::cli {

using nlohmann::json;

namespace {

constexpr double kCoarseEpsilon = 1e-4;

void write_report(const std::filesystem::path& path, const json& report) {
  write_file_atomic(path, report.dump(2) + "\n");
  log_info("wrote " + path.string());
}

Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = rng.uniform(-scale, scale);
  return Tensor::from(std::move(shape), std::move(v));
}

// sum(w * out) with fixed random w, so no output coordinate cancels another.
Tensor scalarize(Tape& tape, const Tensor& out, const Tensor& weights) {
  return reduce_sum(tape, mul(tape, out, reshape(tape, weights, out.shape())));
}

template <typename Build>
ComponentCheck check(const std::string& name, ParameterSet params, double epsilon, Build&& build) {
  const auto start = std::chrono::steady_clock::now();
  ComponentCheck c{name, grad_check(build, params, {epsilon, 0, 0x5eed}), 0.0};
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

}  // namespace

std::vector<ComponentCheck> gradcheck_suite(std::uint64_t seed, double epsilon) {
  Rng rng(seed);
  std::vector<ComponentCheck> checks;

  {
    const std::size_t d = 4;
    Mlp mlp(3 * d, d, d, rng);
    ParameterSet p;
    mlp.collect(p, "message_mlp");
    const Tensor x = random_tensor({5, 3 * d}, rng), w = random_tensor({5 * d}, rng);
    checks.push_back(check("message_mlp", p, epsilon,
                           [&](Tape& t) { return scalarize(t, mlp(t, x), w); }));
  }
  {
    LstmCell cell(5, 4, rng);
    ParameterSet p;
    cell.collect(p, "lstm_cell");
    const Tensor h = random_tensor({3, 4}, rng), c = random_tensor({3, 4}, rng);
    const Tensor x = random_tensor({3, 5}, rng), wh = random_tensor({12}, rng),
                 wc = random_tensor({12}, rng);
    checks.push_back(check("lstm_cell", p, epsilon, [&](Tape& t) {
      const LstmState next = cell(t, {h, c}, x);
      return add(t, scalarize(t, next.hidden, wh), scalarize(t, next.cell, wc));
    }));
  }
  {
    MultiHeadAttention mha(8, 2, rng);
    ParameterSet p;
    mha.collect(p, "multi_head_attention");
    const Tensor x = random_tensor({9, 8}, rng), w = random_tensor({72}, rng);
    checks.push_back(check("multi_head_attention", p, epsilon,
                           [&](Tape& t) { return scalarize(t, mha(t, x, x, x, 3), w); }));
  }

  const RandomDocShape shape{7, 5, 4, 6, 5, 3};
  const FeatureDoc doc = random_doc(rng, shape, "gradcheck");
  const SynopsisGraph graph = build_graph(doc);
  const Tensor tropes = init_weight(3, 8, rng);
  const Tensor w_streams = random_tensor({3 * 8}, rng);
  {
    StreamParams sp(8, shape.word_dim, 8, rng);
    ParameterSet p;
    p.add("tropes", tropes);
    sp.collect(p, "word_stream");
    checks.push_back(check("word_stream", p, epsilon, [&](Tape& t) {
      return scalarize(t, word_stream(t, doc, tropes, sp), w_streams);
    }));
  }
  {
    StreamParams sp = StreamParams::recurrent(8, shape.sentence_dim, 8, rng);
    ParameterSet p;
    p.add("tropes", tropes);
    sp.collect(p, "sentence_stream");
    checks.push_back(check("sentence_stream", p, epsilon, [&](Tape& t) {
      return scalarize(t, sentence_stream(t, doc, tropes, sp), w_streams);
    }));
  }
  for (ReasonerKind kind : {ReasonerKind::kMultiStep, ReasonerKind::kLastStep}) {
    ReasonerParams reasoner(ReasonerConfig{shape.sentence_dim, 8, 2, 2}, rng);
    StreamParams sp(8, 8, 8, rng);
    ParameterSet p;
    p.add("tropes", tropes);
    reasoner.collect(p, "reasoner");
    sp.collect(p, "relation_stream");
    const std::string name =
        kind == ReasonerKind::kMultiStep ? "relation_stream_msrrn" : "relation_stream_rrn";
    checks.push_back(check(name, p, epsilon, [&](Tape& t) {
      return scalarize(t, relation_stream(t, graph, tropes, reasoner, sp, kind).output, w_streams);
    }));
  }
  {
    Mlp projector(8, 8, 3, rng);
    ParameterSet p;
    p.add("tropes", tropes);
    projector.collect(p, "stream_attention");
    std::vector<Tensor> outputs;
    for (int s = 0; s < 3; ++s) outputs.push_back(random_tensor({3, 8}, rng));
    checks.push_back(check("stream_attention", p, epsilon, [&](Tape& t) {
      return scalarize(t, organize(t, outputs, stream_attention(t, tropes, projector)), w_streams);
    }));
  }
  {
    Mlp predictor(16, 8, 1, rng);
    ParameterSet p;
    p.add("tropes", tropes);
    predictor.collect(p, "predictor");
    const Tensor organized = random_tensor({3, 8}, rng);
    const Tensor labels = Tensor::from({1, 3}, {1.0, 0.0, 1.0});
    checks.push_back(check("predictor_bce", p, epsilon, [&](Tape& t) {
      const Tensor logits = predict_logits(t, organized, tropes, predictor);
      return bce_loss(t, reshape(t, logits, {1, 3}), labels, 2.0);
    }));
  }
  {
    ModelConfig config;
    config.trope_count = 3;
    config.word_dim = shape.word_dim;
    config.sentence_dim = shape.sentence_dim;
    config.trope_dim = 8;
    config.attention_dim = 8;
    config.hidden_dim = 8;
    config.steps = 2;
    config.heads = 2;
    const MulComModel model(config, rng.next());
    const Tensor w_logits = random_tensor({3}, rng);
    checks.push_back(check("mulcom_full", model.parameters(), epsilon, [&](Tape& t) {
      return scalarize(t, forward_logits(t, model, doc, graph), w_logits);
    }));
  }
  return checks;
}

int cmd_gradcheck(const RunConfig& config) {
  const auto checks = gradcheck_suite(config.seed, config.gradcheck_epsilon);
  bool ok = true;
  for (const ComponentCheck& c : checks)
    ok = ok && c.result.max_relative_error < config.gradcheck_tolerance;
  // A failure at small epsilon can be roundoff on tiny gradients rather than a
  // wrong derivative; a coarser step tells the two apart.
  std::vector<ComponentCheck> coarse;
  if (!ok) coarse = gradcheck_suite(config.seed, kCoarseEpsilon);

  json components = json::array();
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const ComponentCheck& c = checks[i];
    const bool pass = c.result.max_relative_error < config.gradcheck_tolerance;
    std::ostringstream line;
    line << std::left << std::setw(24) << c.component << " max_rel_err=" << std::scientific
         << std::setprecision(3) << c.result.max_relative_error << " checked=" << c.result.checked
         << " kinks=" << c.result.skipped_kinks << std::fixed << std::setprecision(2) << " "
         << c.seconds << "s " << (pass ? "PASS" : "FAIL");
    if (!pass) line << " (eps " << std::scientific << std::setprecision(0) << kCoarseEpsilon
                    << ": " << std::setprecision(3) << coarse[i].result.max_relative_error << ")";
    log_info(line.str());
    json entry = {{"component", c.component},
                  {"max_relative_error", c.result.max_relative_error},
                  {"checked", c.result.checked},
                  {"skipped_kinks", c.result.skipped_kinks},
                  {"worst", c.result.worst_parameter},
                  {"worst_analytic", c.result.worst_analytic},
                  {"worst_numeric", c.result.worst_numeric},
                  {"pass", pass}};
    if (!pass) {
      entry["coarse_epsilon"] = kCoarseEpsilon;
      entry["coarse_max_relative_error"] = coarse[i].result.max_relative_error;
    }
    components.push_back(entry);
  }
  write_report(config.out / "gradcheck_report.json",
               {{"command", "gradcheck"},
                {"config", to_json(config)},
                {"seed", config.seed},
                {"epsilon", config.gradcheck_epsilon},
                {"tolerance", config.gradcheck_tolerance},
                {"components", components},
                {"pass", ok}});
  return ok ? kExitOk : kExitFailure;
}

int cmd_synth(const RunConfig& config) {
  const Dataset ds = synth_generate(config.seed, config.synth);
  save_dataset(config.out, ds);
  json sizes = json::object();
  for (const auto& [name, docs] : ds.splits) sizes[name] = docs.size();
  write_report(config.out / "synth_report.json", {{"command", "synth"},
                                                  {"config", to_json(config)},
                                                  {"seed", config.seed},
                                                  {"split_sizes", sizes}});
  return kExitOk;
}

namespace {

Dataset require_dataset(const RunConfig& config) {
  if (config.manifest.empty()) throw ConfigError("a dataset manifest is required (--manifest)");
  return load_dataset(config.manifest);
}

ModelConfig model_config_for(const RunConfig& config, const Dataset& ds) {
  const auto& train = ds.split("train");
  if (train.empty()) throw TrainingError("training split is empty");
  ModelConfig m = config.model;
  m.trope_count = ds.trope_count();
  m.word_dim = train.front().word_feats.cols;
  m.sentence_dim = train.front().sent_feats.cols;
  return m;
}

BinaryMatrix label_matrix(const std::vector<FeatureDoc>& docs, std::size_t trope_count) {
  BinaryMatrix labels(docs.size(), std::vector<std::uint8_t>(trope_count, 0));
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (std::size_t t : docs[d].labels) labels[d][t] = 1;
  return labels;
}

}  // namespace

int cmd_train(const RunConfig& config) {
  const Dataset ds = require_dataset(config);
  MulComModel model(model_config_for(config, ds), config.seed);
  TrainConfig tc = config.train;
  tc.seed = config.seed;
  const TrainResult result = train(ds.split("train"), model, tc, [](std::size_t epoch, double loss) {
    std::ostringstream line;
    line << "epoch " << epoch + 1 << " loss " << std::setprecision(6) << loss;
    log_info(line.str());
  });
  const json meta = {{"seed", config.seed}, {"ablation", ablation_name(model.config())}};
  save_checkpoint(config.out / "checkpoint.bin", model, meta);
  write_report(config.out / "train_report.json", {{"command", "train"},
                                                  {"config", to_json(config)},
                                                  {"seed", config.seed},
                                                  {"ablation", ablation_name(model.config())},
                                                  {"train_docs", ds.split("train").size()},
                                                  {"pos_weight", result.pos_weight},
                                                  {"optimizer_steps", result.optimizer_steps},
                                                  {"epoch_loss", result.epoch_loss}});
  return kExitOk;
}

int cmd_eval(const RunConfig& config) {
  const Dataset ds = require_dataset(config);
  const auto& docs = ds.split(config.eval_split);
  if (docs.empty()) throw std::runtime_error("split " + config.eval_split + " is empty");
  const auto checkpoint_path =
      config.checkpoint.empty() ? config.out / "checkpoint.bin" : config.checkpoint;
  const LoadedCheckpoint loaded = load_checkpoint(checkpoint_path);
  if (loaded.model.config().trope_count != ds.trope_count())
    throw std::runtime_error("checkpoint has " + std::to_string(loaded.model.config().trope_count) +
                             " tropes, dataset " + std::to_string(ds.trope_count()));
  const ScoreMatrix scores = predict_scores(loaded.model, docs);
  const BinaryMatrix labels = label_matrix(docs, ds.trope_count());
  const EvalReport report = evaluate(scores, labels, config.train.threshold);
  log_info("micro-F1 " + std::to_string(report.micro_f1) + "  macro-F1 " +
           std::to_string(report.macro_f1) + "  mAP " + std::to_string(report.map));
  json out = {{"command", "eval"},
              {"config", to_json(config)},
              {"seed", config.seed},
              {"ablation", ablation_name(loaded.model.config())},
              {"split", config.eval_split},
              {"report", to_json(report, ds.manifest.trope_names)}};
  if (config.random_trials > 0) {
    const RandomBaseline rb = random_baseline(labels, config.seed, config.random_trials);
    out["random_baseline"] = {{"trials", rb.trials},
                              {"micro_f1", rb.micro_f1},
                              {"micro_f1_ci95", rb.micro_f1_ci},
                              {"mAP", rb.map},
                              {"mAP_ci95", rb.map_ci}};
  }
  write_report(config.out / "eval_report.json", out);
  return kExitOk;
}

int cmd_cooccur(const RunConfig& config) {
  const Dataset ds = require_dataset(config);
  json report = cooccurrence_report(ds, config.stats_split, config.top_pairs);
  report["command"] = "cooccur";
  report["config"] = to_json(config);
  report["seed"] = config.seed;
  write_report(config.out / "cooccur_report.json", report);
  return kExitOk;
}

int cmd_stats(const RunConfig& config) {
  const Dataset ds = require_dataset(config);
  json report = stats_report(ds);
  report["command"] = "stats";
  report["config"] = to_json(config);
  report["seed"] = config.seed;
  write_report(config.out / "stats_report.json", report);
  return cmd_cooccur(config);
}

int run(int argc, char** argv) {
  CLI::App app{"Multi-level comprehension network for multi-label trope detection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out, manifest, checkpoint, split, streams, reasoner;
  std::optional<std::size_t> epochs, docs, trials;
  std::optional<double> lr, threshold;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--seed", seed, "64-bit seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "OpenMP threads (1 keeps runs bit-reproducible)");
  app.add_flag("--quiet", quiet, "only warnings on stderr");

  auto* synth = app.add_subcommand("synth", "generate a planted synthetic dataset");
  synth->add_option("--docs", docs, "number of documents");
  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  auto* eval = app.add_subcommand("eval", "score a split with a checkpoint");
  auto* stats = app.add_subcommand("stats", "corpus statistics, prevalence and co-occurrence");
  auto* cooccur = app.add_subcommand("cooccur", "trope co-occurrence IoU ranking");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  (void)gradcheck;
  for (auto* sub : {train_cmd, eval, stats, cooccur})
    sub->add_option("--manifest", manifest, "dataset manifest JSON");
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--lr", lr, "learning rate");
  train_cmd->add_option("--streams", streams, "e.g. MSRRN+Word+Sent or word,relation");
  train_cmd->add_option("--reasoner", reasoner, "msrrn or rrn");
  eval->add_option("--checkpoint", checkpoint, "defaults to <out>/checkpoint.bin");
  eval->add_option("--split", split, "train, val or test");
  eval->add_option("--threshold", threshold, "score threshold for F1");
  eval->add_option("--random-trials", trials, "also report a random baseline");
  for (auto* sub : {stats, cooccur}) sub->add_option("--split", split, "split for co-occurrence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_config_file(config_path);
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (out) config.out = *out;
    if (manifest) config.manifest = *manifest;
    if (checkpoint) config.checkpoint = *checkpoint;
    if (split) (eval->parsed() ? config.eval_split : config.stats_split) = *split;
    if (epochs) config.train.epochs = *epochs;
    if (lr) config.train.learning_rate = *lr;
    if (threshold) config.train.threshold = *threshold;
    if (trials) config.random_trials = *trials;
    if (streams) config.model.streams = parse_streams(*streams);
    if (reasoner) apply_json(config, {{"model", {{"reasoner", *reasoner}}}});
    if (docs) config.synth.docs = *docs;
    if (config.threads < 1) throw ConfigError("--threads must be >= 1");
    config.train.validate();
    kernels::set_threads(config.threads);
    if (quiet) set_log_level(LogLevel::kWarning);

    if (synth->parsed()) return cmd_synth(config);
    if (train_cmd->parsed()) return cmd_train(config);
    if (eval->parsed()) return cmd_eval(config);
    if (stats->parsed()) return cmd_stats(config);
    if (cooccur->parsed()) return cmd_cooccur(config);
    return cmd_gradcheck(config);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace mulcom::cli
