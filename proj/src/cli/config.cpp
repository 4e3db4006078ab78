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

#include "mulcom/cli/config.hpp"

#include <fstream>
#include <set>

#include "mulcom/checkpoint.hpp"

namespace mulcom::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key " + where + key);
}

void apply_model(ModelConfig& m, const json& j) {
  reject_unknown(j, {"trope_dim", "attention_dim", "hidden_dim", "steps", "heads", "streams",
                     "reasoner", "max_tokens"},
                 "model.");
  m.trope_dim = j.value("trope_dim", m.trope_dim);
  m.attention_dim = j.value("attention_dim", m.attention_dim);
  m.hidden_dim = j.value("hidden_dim", m.hidden_dim);
  m.steps = j.value("steps", m.steps);
  m.heads = j.value("heads", m.heads);
  m.max_tokens = j.value("max_tokens", m.max_tokens);
  if (j.contains("streams")) m.streams = parse_streams(j.at("streams").get<std::string>());
  if (j.contains("reasoner")) {
    const std::string r = j.at("reasoner").get<std::string>();
    if (r != "msrrn" && r != "rrn") throw ConfigError("model.reasoner must be msrrn or rrn");
    m.reasoner = r == "msrrn" ? ReasonerKind::kMultiStep : ReasonerKind::kLastStep;
  }
}

void apply_train(TrainConfig& t, const json& j) {
  reject_unknown(j, {"learning_rate", "epochs", "batch_size", "pos_weight", "threshold", "beta1",
                     "beta2", "adam_epsilon"},
                 "train.");
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.epochs = j.value("epochs", t.epochs);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.pos_weight = j.value("pos_weight", t.pos_weight);
  t.threshold = j.value("threshold", t.threshold);
  t.beta1 = j.value("beta1", t.beta1);
  t.beta2 = j.value("beta2", t.beta2);
  t.adam_epsilon = j.value("adam_epsilon", t.adam_epsilon);
}

}  // namespace

void apply_json(RunConfig& c, const json& j) {
  try {
    reject_unknown(j, {"seed", "threads", "out", "manifest", "model", "train", "synth", "eval",
                       "stats", "gradcheck"},
                   "");
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("manifest")) c.manifest = j.at("manifest").get<std::string>();
    if (j.contains("model")) apply_model(c.model, j.at("model"));
    if (j.contains("train")) apply_train(c.train, j.at("train"));
    if (j.contains("synth")) c.synth = synth_spec_from_json(j.at("synth"));
    if (j.contains("eval")) {
      const json& e = j.at("eval");
      reject_unknown(e, {"checkpoint", "split", "random_trials"}, "eval.");
      if (e.contains("checkpoint")) c.checkpoint = e.at("checkpoint").get<std::string>();
      c.eval_split = e.value("split", c.eval_split);
      c.random_trials = e.value("random_trials", c.random_trials);
    }
    if (j.contains("stats")) {
      const json& s = j.at("stats");
      reject_unknown(s, {"split", "top_pairs"}, "stats.");
      c.stats_split = s.value("split", c.stats_split);
      c.top_pairs = s.value("top_pairs", c.top_pairs);
    }
    if (j.contains("gradcheck")) {
      const json& g = j.at("gradcheck");
      reject_unknown(g, {"epsilon", "tolerance"}, "gradcheck.");
      c.gradcheck_epsilon = g.value("epsilon", c.gradcheck_epsilon);
      c.gradcheck_tolerance = g.value("tolerance", c.gradcheck_tolerance);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  apply_json(base, j);
  return base;
}

json to_json(const RunConfig& c) {
  json model = mulcom::to_json(c.model);
  model.erase("trope_count");
  model.erase("word_dim");
  model.erase("sentence_dim");
  model["streams"] = ablation_name(c.model);
  return {{"seed", c.seed},
          {"threads", c.threads},
          {"out", c.out.string()},
          {"manifest", c.manifest.string()},
          {"model", model},
          {"train",
           {{"learning_rate", c.train.learning_rate},
            {"epochs", c.train.epochs},
            {"batch_size", c.train.batch_size},
            {"pos_weight", c.train.pos_weight},
            {"threshold", c.train.threshold},
            {"beta1", c.train.beta1},
            {"beta2", c.train.beta2},
            {"adam_epsilon", c.train.adam_epsilon}}},
          {"synth", mulcom::to_json(c.synth)},
          {"eval",
           {{"checkpoint", c.checkpoint.string()},
            {"split", c.eval_split},
            {"random_trials", c.random_trials}}},
          {"stats", {{"split", c.stats_split}, {"top_pairs", c.top_pairs}}},
          {"gradcheck", {{"epsilon", c.gradcheck_epsilon}, {"tolerance", c.gradcheck_tolerance}}}};
}

}  // namespace mulcom::cli
