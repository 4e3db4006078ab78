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

#include "mulcom/synth.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mulcom/nn.hpp"
#include "mulcom/rng.hpp"

namespace mulcom {

using nlohmann::json;

SynthSpec SynthSpec::standard(std::size_t docs, std::size_t tropes, double probability,
                              std::size_t roles) {
  SynthSpec spec;
  spec.docs = docs;
  spec.roles = roles;
  spec.tropes = tropes;
  const std::size_t token_tropes = (tropes + 1) / 2;
  for (std::size_t t = 0; t < tropes; ++t) {
    PlantedRule rule;
    rule.trope = t;
    rule.probability = probability;
    if (t < token_tropes) {
      rule.kind = PlantedRule::Kind::kToken;
      rule.token = t;
    } else {
      const std::size_t m = t - token_tropes;
      rule.kind = PlantedRule::Kind::kMotif;
      rule.role_a = (2 * m) % spec.roles;
      rule.role_b = (2 * m + 1) % spec.roles;
    }
    spec.rules.push_back(rule);
  }
  return spec;
}

void SynthSpec::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("synth spec: " + msg); };
  if (tropes == 0 || vocab == 0 || roles < 2) fail("need tropes, vocab and at least two roles");
  if (word_dim == 0 || sentence_dim == 0) fail("zero feature dimension");
  if (min_tokens == 0 || min_tokens > max_tokens) fail("bad token range");
  if (min_sentences == 0 || min_sentences > max_sentences) fail("bad sentence range");
  if (min_entities > max_entities || max_entities > roles)
    fail("entity range must fit within the role count");
  if (train_fraction < 0 || val_fraction < 0 || train_fraction + val_fraction > 1.0)
    fail("split fractions must be non-negative and sum to at most 1");
  std::set<std::size_t> tropes_seen, tokens_seen;
  for (const PlantedRule& r : rules) {
    if (r.trope >= tropes) fail("rule for trope " + std::to_string(r.trope) + " out of range");
    if (!tropes_seen.insert(r.trope).second)
      fail("trope " + std::to_string(r.trope) + " has two rules");
    if (r.probability < 0.0 || r.probability > 1.0) fail("probability outside [0, 1]");
    if (r.kind == PlantedRule::Kind::kToken) {
      if (r.token >= vocab) fail("trigger token " + std::to_string(r.token) + " outside vocab");
      if (!tokens_seen.insert(r.token).second)
        fail("token " + std::to_string(r.token) + " triggers two tropes");
    } else {
      if (r.role_a >= roles || r.role_b >= roles) fail("motif role out of range");
      if (r.role_a == r.role_b) fail("motif needs two distinct roles");
      if (max_sentences < 1) fail("motif needs sentences");
    }
  }
  if (tokens_seen.size() >= vocab) fail("every vocabulary id is a trigger");
}

std::vector<std::size_t> SynthSpec::tropes_of(PlantedRule::Kind kind) const {
  std::vector<std::size_t> out;
  for (const PlantedRule& r : rules)
    if (r.kind == kind) out.push_back(r.trope);
  std::sort(out.begin(), out.end());
  return out;
}

json to_json(const SynthSpec& s) {
  json rules = json::array();
  for (const PlantedRule& r : s.rules) {
    if (r.kind == PlantedRule::Kind::kToken)
      rules.push_back({{"trope", r.trope}, {"kind", "token"}, {"token", r.token},
                       {"probability", r.probability}});
    else
      rules.push_back({{"trope", r.trope}, {"kind", "motif"},
                       {"roles", {r.role_a, r.role_b}}, {"probability", r.probability}});
  }
  return {{"docs", s.docs},
          {"tropes", s.tropes},
          {"vocab", s.vocab},
          {"roles", s.roles},
          {"word_dim", s.word_dim},
          {"sentence_dim", s.sentence_dim},
          {"tokens", {s.min_tokens, s.max_tokens}},
          {"sentences", {s.min_sentences, s.max_sentences}},
          {"entities", {s.min_entities, s.max_entities}},
          {"pair_sentence_rate", s.pair_sentence_rate},
          {"noise", s.noise},
          {"train_fraction", s.train_fraction},
          {"val_fraction", s.val_fraction},
          {"planted_rules", rules}};
}

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec s = SynthSpec::standard(j.value("docs", std::size_t{2000}), j.value("tropes", std::size_t{8}),
                                    j.value("probability", 0.3), j.value("roles", std::size_t{8}));
  s.vocab = j.value("vocab", s.vocab);
  s.word_dim = j.value("word_dim", s.word_dim);
  s.sentence_dim = j.value("sentence_dim", s.sentence_dim);
  auto range = [&](const char* key, std::size_t& lo, std::size_t& hi) {
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<std::vector<std::size_t>>();
    if (v.size() != 2) throw ConfigError(std::string("synth spec: ") + key + " needs [min, max]");
    lo = v[0];
    hi = v[1];
  };
  range("tokens", s.min_tokens, s.max_tokens);
  range("sentences", s.min_sentences, s.max_sentences);
  range("entities", s.min_entities, s.max_entities);
  s.pair_sentence_rate = j.value("pair_sentence_rate", s.pair_sentence_rate);
  s.noise = j.value("noise", s.noise);
  s.train_fraction = j.value("train_fraction", s.train_fraction);
  s.val_fraction = j.value("val_fraction", s.val_fraction);
  if (j.contains("planted_rules")) {
    s.rules.clear();
    for (const json& r : j.at("planted_rules")) {
      PlantedRule rule;
      rule.trope = r.at("trope").get<std::size_t>();
      rule.probability = r.value("probability", 0.3);
      const std::string kind = r.at("kind").get<std::string>();
      if (kind == "token") {
        rule.kind = PlantedRule::Kind::kToken;
        rule.token = r.at("token").get<std::size_t>();
      } else if (kind == "motif") {
        rule.kind = PlantedRule::Kind::kMotif;
        const auto roles = r.at("roles").get<std::vector<std::size_t>>();
        if (roles.size() != 2) throw ConfigError("synth spec: motif needs two roles");
        rule.role_a = roles[0];
        rule.role_b = roles[1];
      } else {
        throw ConfigError("synth spec: unknown rule kind " + kind);
      }
      s.rules.push_back(rule);
    }
  }
  return s;
}

namespace {

Matrix random_table(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m{rows, cols, std::vector<double>(rows * cols)};
  for (double& v : m.values) v = rng.uniform(-1.0, 1.0);
  return m;
}

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

struct DocBuilder {
  const SynthSpec& spec;
  const Matrix& token_table;
  const Matrix& role_table;
  const std::vector<std::size_t>& background_tokens;

  FeatureDoc build(std::size_t index, Rng& rng) const {
    FeatureDoc doc;
    doc.doc_id = "synth-" + std::to_string(index);

    std::vector<bool> planted(spec.rules.size());
    for (std::size_t r = 0; r < spec.rules.size(); ++r) planted[r] = rng.bernoulli(spec.rules[r].probability);

    // Tokens: background ids plus one or two copies of each planted trigger.
    std::vector<std::size_t> tokens(between(rng, spec.min_tokens, spec.max_tokens));
    for (auto& t : tokens) t = background_tokens[rng.below(background_tokens.size())];
    for (std::size_t r = 0; r < spec.rules.size(); ++r) {
      if (!planted[r] || spec.rules[r].kind != PlantedRule::Kind::kToken) continue;
      const std::size_t copies = between(rng, 1, 2);
      for (std::size_t c = 0; c < copies; ++c)
        tokens.insert(tokens.begin() + rng.below(tokens.size() + 1), spec.rules[r].token);
    }
    doc.word_feats = {tokens.size(), spec.word_dim, {}};
    for (std::size_t t : tokens) {
      auto row = token_table.row(t);
      doc.word_feats.values.insert(doc.word_feats.values.end(), row.begin(), row.end());
    }

    // Entities with distinct roles; planted motifs force both roles in.
    std::vector<std::size_t> all_roles(spec.roles);
    std::iota(all_roles.begin(), all_roles.end(), 0);
    rng.shuffle(all_roles);
    std::vector<std::size_t> roles(all_roles.begin(),
                                   all_roles.begin() + between(rng, spec.min_entities, spec.max_entities));
    auto ensure_role = [&](std::size_t role) {
      if (std::find(roles.begin(), roles.end(), role) == roles.end()) roles.push_back(role);
    };
    std::vector<std::pair<std::size_t, std::size_t>> forbidden, required;
    for (std::size_t r = 0; r < spec.rules.size(); ++r) {
      const PlantedRule& rule = spec.rules[r];
      if (rule.kind != PlantedRule::Kind::kMotif) continue;
      if (planted[r]) {
        ensure_role(rule.role_a);
        ensure_role(rule.role_b);
        required.emplace_back(rule.role_a, rule.role_b);
      } else {
        forbidden.emplace_back(rule.role_a, rule.role_b);
      }
    }
    auto is_forbidden = [&](std::size_t ra, std::size_t rb) {
      for (auto [a, b] : forbidden)
        if ((a == ra && b == rb) || (a == rb && b == ra)) return true;
      return false;
    };
    auto entity_of = [&](std::size_t role) {
      return static_cast<std::size_t>(std::find(roles.begin(), roles.end(), role) - roles.begin());
    };

    // Sentences: each mentions one entity or an allowed pair.
    std::vector<std::vector<std::size_t>> sentences(between(rng, spec.min_sentences, spec.max_sentences));
    for (auto& mentions : sentences) {
      const std::size_t a = rng.below(roles.size());
      mentions = {a};
      if (roles.size() >= 2 && rng.bernoulli(spec.pair_sentence_rate)) {
        for (int attempt = 0; attempt < 8; ++attempt) {
          const std::size_t b = rng.below(roles.size());
          if (b != a && !is_forbidden(roles[a], roles[b])) {
            mentions.push_back(b);
            break;
          }
        }
      }
    }
    for (auto [ra, rb] : required) {
      sentences.insert(sentences.begin() + rng.below(sentences.size() + 1),
                       std::vector<std::size_t>{entity_of(ra), entity_of(rb)});
    }
    // Every entity gets at least one mention.
    std::vector<bool> mentioned(roles.size());
    for (const auto& m : sentences)
      for (std::size_t e : m) mentioned[e] = true;
    for (std::size_t e = 0; e < roles.size(); ++e)
      if (!mentioned[e])
        sentences.insert(sentences.begin() + rng.below(sentences.size() + 1), std::vector<std::size_t>{e});

    doc.sent_feats = {sentences.size(), spec.sentence_dim, {}};
    doc.entities.resize(roles.size());
    for (std::size_t e = 0; e < roles.size(); ++e)
      doc.entities[e].id = "ent" + std::to_string(e) + "_role" + std::to_string(roles[e]);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      std::vector<double> feature(spec.sentence_dim);
      for (double& v : feature) v = spec.noise * rng.uniform(-1.0, 1.0);
      for (std::size_t e : sentences[s]) {
        auto row = role_table.row(roles[e]);
        for (std::size_t d = 0; d < spec.sentence_dim; ++d) feature[d] += row[d];
        doc.entities[e].sentences.push_back(s);
      }
      doc.sent_feats.values.insert(doc.sent_feats.values.end(), feature.begin(), feature.end());
    }

    for (std::size_t r = 0; r < spec.rules.size(); ++r)
      if (planted[r]) doc.labels.push_back(spec.rules[r].trope);
    std::sort(doc.labels.begin(), doc.labels.end());
    return doc;
  }
};

}  // namespace

Dataset synth_generate(std::uint64_t seed, const SynthSpec& spec) {
  spec.validate();
  Rng table_rng(mix64(seed ^ 0x7ab1e5ULL));
  const Matrix token_table = random_table(spec.vocab, spec.word_dim, table_rng);
  const Matrix role_table = random_table(spec.roles, spec.sentence_dim, table_rng);
  std::set<std::size_t> triggers;
  for (const PlantedRule& r : spec.rules)
    if (r.kind == PlantedRule::Kind::kToken) triggers.insert(r.token);
  std::vector<std::size_t> background;
  for (std::size_t t = 0; t < spec.vocab; ++t)
    if (!triggers.count(t)) background.push_back(t);

  const DocBuilder builder{spec, token_table, role_table, background};
  std::vector<FeatureDoc> docs(spec.docs);
  for (std::size_t i = 0; i < spec.docs; ++i) {
    Rng doc_rng(mix64(seed) ^ mix64(i + 1));
    docs[i] = builder.build(i, doc_rng);
  }

  Dataset ds;
  for (std::size_t t = 0; t < spec.tropes; ++t) {
    std::string name = "trope" + std::to_string(t);
    for (const PlantedRule& r : spec.rules) {
      if (r.trope != t) continue;
      name += r.kind == PlantedRule::Kind::kToken
                  ? "_token" + std::to_string(r.token)
                  : "_motif" + std::to_string(r.role_a) + "-" + std::to_string(r.role_b);
    }
    ds.manifest.trope_names.push_back(name);
  }
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(mix64(seed ^ 0x5b117ULL));
  split_rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(spec.train_fraction * static_cast<double>(docs.size()));
  const auto n_val = static_cast<std::size_t>(spec.val_fraction * static_cast<double>(docs.size()));
  std::vector<const char*> split_of(docs.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    split_of[order[k]] = k < n_train ? "train" : k < n_train + n_val ? "val" : "test";
  // Each split keeps generation order.
  for (std::size_t i = 0; i < docs.size(); ++i) ds.splits[split_of[i]].push_back(std::move(docs[i]));
  for (const auto& [name, split_docs] : ds.splits) ds.manifest.splits[name] = {name + ".jsonl"};
  return ds;
}

FeatureDoc random_doc(Rng& rng, const RandomDocShape& shape, std::string doc_id) {
  FeatureDoc doc;
  doc.doc_id = std::move(doc_id);
  doc.word_feats = random_table(shape.tokens, shape.word_dim, rng);
  doc.sent_feats = random_table(shape.sentences, shape.sentence_dim, rng);
  doc.entities.resize(shape.entities);
  for (std::size_t e = 0; e < shape.entities; ++e) doc.entities[e].id = "e" + std::to_string(e);
  if (shape.entities > 0) {
    for (std::size_t s = 0; s < shape.sentences; ++s) {
      std::vector<std::size_t> ents(shape.entities);
      std::iota(ents.begin(), ents.end(), 0);
      rng.shuffle(ents);
      const std::size_t k = between(rng, 1, std::min<std::size_t>(3, shape.entities));
      for (std::size_t i = 0; i < k; ++i) doc.entities[ents[i]].sentences.push_back(s);
    }
  }
  for (std::size_t t = 0; t < shape.trope_count; ++t)
    if (rng.bernoulli(0.5)) doc.labels.push_back(t);
  return doc;
}

}  // namespace mulcom
