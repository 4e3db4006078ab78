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

#include "mulcom/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mulcom {
namespace {

constexpr char kMagic[8] = {'M', 'U', 'L', 'C', 'O', 'M', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  template <typename T>
  T get() {
    T value;
    std::memcpy(&value, take(sizeof(T)), sizeof(T));
    return value;
  }
  std::string get_string(std::size_t n) { return std::string(take(n), n); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const char* take(std::size_t n) {
    if (n > bytes_.size() - pos_) throw std::runtime_error("checkpoint truncated");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json to_json(const ModelConfig& c) {
  nlohmann::json streams = nlohmann::json::array();
  for (StreamKind k : c.streams) streams.push_back(std::string(stream_name(k)));
  return {{"trope_count", c.trope_count},
          {"word_dim", c.word_dim},
          {"sentence_dim", c.sentence_dim},
          {"trope_dim", c.trope_dim},
          {"attention_dim", c.attention_dim},
          {"hidden_dim", c.hidden_dim},
          {"steps", c.steps},
          {"heads", c.heads},
          {"streams", streams},
          {"reasoner", c.reasoner == ReasonerKind::kMultiStep ? "msrrn" : "rrn"},
          {"max_tokens", c.max_tokens}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.trope_count = j.at("trope_count").get<std::size_t>();
  c.word_dim = j.at("word_dim").get<std::size_t>();
  c.sentence_dim = j.at("sentence_dim").get<std::size_t>();
  c.trope_dim = j.at("trope_dim").get<std::size_t>();
  c.attention_dim = j.at("attention_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.steps = j.at("steps").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.streams.clear();
  for (const auto& s : j.at("streams")) c.streams.push_back(parse_stream(s.get<std::string>()));
  const std::string reasoner = j.at("reasoner").get<std::string>();
  if (reasoner != "msrrn" && reasoner != "rrn") throw ConfigError("unknown reasoner " + reasoner);
  c.reasoner = reasoner == "msrrn" ? ReasonerKind::kMultiStep : ReasonerKind::kLastStep;
  c.max_tokens = j.at("max_tokens").get<std::size_t>();
  return c;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_checkpoint(const std::filesystem::path& path, const MulComModel& model,
                     const nlohmann::json& meta) {
  const std::string header = nlohmann::json{{"model", to_json(model.config())}, {"meta", meta}}.dump();
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, header.size());
  out += header;
  const ParameterSet params = model.parameters();
  put<std::uint64_t>(out, params.entries().size());
  for (const auto& [name, t] : params.entries()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint64_t>(out, d);
    for (double v : t.values()) put<double>(out, v);
  }
  write_file_atomic(path, out);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Reader r(buffer.str());
  if (r.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
    throw std::runtime_error(path.string() + " is not a checkpoint");
  if (const auto version = r.get<std::uint32_t>(); version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto header = nlohmann::json::parse(r.get_string(r.get<std::uint64_t>()));

  LoadedCheckpoint loaded{MulComModel(model_config_from_json(header.at("model")), 0),
                          header.value("meta", nlohmann::json::object())};
  ParameterSet params = loaded.model.parameters();
  const auto count = r.get<std::uint64_t>();
  if (count != params.entries().size())
    throw std::runtime_error("checkpoint holds " + std::to_string(count) + " tensors, model has " +
                             std::to_string(params.entries().size()));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = r.get_string(r.get<std::uint32_t>());
    Shape shape(r.get<std::uint32_t>());
    for (auto& d : shape) d = r.get<std::uint64_t>();
    Tensor* target = params.find(name);
    if (!target) throw std::runtime_error("checkpoint tensor " + name + " unknown to the model");
    if (target->shape() != shape)
      throw std::runtime_error("checkpoint tensor " + name + " has shape " + shape_string(shape) +
                               ", model expects " + shape_string(target->shape()));
    for (double& v : target->values()) v = r.get<double>();
  }
  if (!r.done()) throw std::runtime_error("trailing bytes in checkpoint " + path.string());
  return loaded;
}

}  // namespace mulcom
