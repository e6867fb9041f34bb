// Copyright 2026 The simulbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "simulbeam/model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "simulbeam/tokenizer.hpp"

namespace simulbeam {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kEncoderRoot = 0x6A09E667F3BCC908ULL;
constexpr std::uint64_t kDecoderRoot = 0xBB67AE8584CAA73BULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t chain(std::uint64_t digest, TokenId token) {
  return mix64(digest ^ (static_cast<std::uint64_t>(token) + 1) * kGolden);
}

// Uniform in [0, 1) from the top 53 bits.
double unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

std::uint64_t row_key(const SyntheticModelConfig& config, std::size_t reads,
                      std::uint64_t encoder_digest, std::uint64_t decoder_digest) {
  std::uint64_t key = mix64(config.seed + kGolden);
  key = mix64(key ^ static_cast<std::uint64_t>(reads));
  key = mix64(key ^ encoder_digest);
  return mix64(key ^ decoder_digest);
}

void fill_logits(const SyntheticModelConfig& config, std::uint64_t key, std::size_t reads,
                 std::size_t written, std::span<double> logits) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < logits.size(); ++j) {
    logits[j] = config.logit_scale * unit(mix64(key + (j + 1) * kGolden));
  }
  logits[Vocabulary::kBos] = kNegInf;
  if (!config.emit_eos) {
    logits[Vocabulary::kEos] = kNegInf;
  } else if (written >= reads) {
    logits[Vocabulary::kEos] += config.eos_boost * static_cast<double>(written - reads + 1);
  } else {
    logits[Vocabulary::kEos] -= config.eos_penalty * static_cast<double>(reads - written - 1);
  }
}

void log_softmax(std::span<double> row) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : row) peak = std::max(peak, v);
  double total = 0.0;
  for (double v : row) total += std::exp(v - peak);
  const double log_z = peak + std::log(total);
  for (double& v : row) v -= log_z;
}

double write_probability(const SyntheticModelConfig& config, std::size_t reads, std::size_t written) {
  const double lag = static_cast<double>(reads) - static_cast<double>(written) -
                     static_cast<double>(config.wait_k);
  return logistic(config.write_sharpness * lag);
}

void check_config(const SyntheticModelConfig& config) {
  if (config.vocab_size < 4) {
    throw ContractError("synthetic model needs at least one non-reserved token");
  }
  if (config.wait_k < 0) throw ContractError("wait_k must be >= 0");
  if (!(config.write_sharpness > 0.0)) throw ContractError("write_sharpness must be > 0");
  if (!(config.eos_penalty >= 0.0)) throw ContractError("eos_penalty must be >= 0");
}

}  // namespace

// --- ModelState ---------------------------------------------------------

std::size_t ModelState::read_count() const { return encoder_ ? encoder_->length : 0; }
std::size_t ModelState::written_count() const { return decoder_ ? decoder_->length : 0; }
bool ModelState::eos_read() const { return eos_read_; }
std::uint64_t ModelState::encoder_digest() const { return encoder_ ? encoder_->digest : kEncoderRoot; }
std::uint64_t ModelState::decoder_digest() const { return decoder_ ? decoder_->digest : kDecoderRoot; }

namespace {
template <typename NodePtr>
TokenSeq unwind(NodePtr node) {
  TokenSeq out;
  for (; node; node = node->parent) out.push_back(node->token);
  std::reverse(out.begin(), out.end());
  return out;
}
}  // namespace

TokenSeq ModelState::source_tokens() const { return unwind(encoder_); }
TokenSeq ModelState::written_tokens() const { return unwind(decoder_); }

ModelState ModelState::with_source(TokenId token) const {
  ModelState next = *this;
  next.encoder_ = std::make_shared<const Node>(
      Node{encoder_, token, read_count() + 1, chain(encoder_digest(), token)});
  next.eos_read_ = eos_read_ || token == Vocabulary::kEos;
  return next;
}

ModelState ModelState::with_written(TokenId token) const {
  ModelState next = *this;
  next.decoder_ = std::make_shared<const Node>(
      Node{decoder_, token, written_count() + 1, chain(decoder_digest(), token)});
  return next;
}

ModelState ModelState::with_encoder_of(const ModelState& donor) const {
  ModelState next = *this;
  next.encoder_ = donor.encoder_;
  next.eos_read_ = donor.eos_read_;
  return next;
}

bool ModelState::operator==(const ModelState& other) const {
  return read_count() == other.read_count() && written_count() == other.written_count() &&
         eos_read_ == other.eos_read_ && encoder_digest() == other.encoder_digest() &&
         decoder_digest() == other.decoder_digest();
}

std::uint64_t encoder_digest_of(std::span<const TokenId> source) {
  std::uint64_t d = kEncoderRoot;
  for (TokenId t : source) d = chain(d, t);
  return d;
}

std::uint64_t decoder_digest_of(std::span<const TokenId> written) {
  std::uint64_t d = kDecoderRoot;
  for (TokenId t : written) d = chain(d, t);
  return d;
}

// --- StreamingModel -----------------------------------------------------

std::vector<StepResult> StreamingModel::decoder_step_batched(std::span<const ModelState> states,
                                                             std::span<const TokenId> last_outputs) const {
  if (states.size() != last_outputs.size()) {
    throw ContractError("decoder_step_batched: states and outputs differ in length");
  }
  if (states.empty()) throw ContractError("decoder_step_batched: empty batch");
  std::vector<StepResult> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out.push_back(decoder_step(states[i], last_outputs[i]));
  return out;
}

// --- synthetic model ----------------------------------------------------

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

DecoderOutput synthetic_distribution(const SyntheticModelConfig& config,
                                     std::span<const TokenId> source,
                                     std::span<const TokenId> written) {
  check_config(config);
  if (source.empty()) throw ContractError("synthetic_distribution requires reads >= 1");
  DecoderOutput out;
  out.log_probs.resize(config.vocab_size);
  const std::uint64_t key =
      row_key(config, source.size(), encoder_digest_of(source), decoder_digest_of(written));
  fill_logits(config, key, source.size(), written.size(), out.log_probs);
  log_softmax(out.log_probs);
  out.write_prob = write_probability(config, source.size(), written.size());
  return out;
}

SyntheticModel::SyntheticModel(SyntheticModelConfig config) : config_(std::move(config)) {
  check_config(config_);
}

ModelState SyntheticModel::encoder_append(const ModelState& state, TokenId token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= config_.vocab_size) {
    throw ContractError("encoder_append: token id " + std::to_string(token) + " out of range");
  }
  if (state.eos_read()) throw ContractError("encoder_append: input EOS already read");
  return state.with_source(token);
}

ModelState SyntheticModel::advance_decoder(const ModelState& state, TokenId last_output) const {
  if (last_output < 0 || static_cast<std::size_t>(last_output) >= config_.vocab_size) {
    throw ContractError("decoder_step: token id " + std::to_string(last_output) + " out of range");
  }
  if (state.read_count() == 0) throw ContractError("decoder_step requires at least one read");
  if (last_output == Vocabulary::kBos) {
    if (state.written_count() != 0) {
      throw ContractError("decoder_step: BOS is only valid as the first decoder input");
    }
    return state;
  }
  return state.with_written(last_output);
}

StepResult SyntheticModel::decoder_step(const ModelState& state, TokenId last_output) const {
  StepResult result{{}, advance_decoder(state, last_output)};
  const ModelState& next = result.state;
  result.output.log_probs.resize(config_.vocab_size);
  const std::uint64_t key =
      row_key(config_, next.read_count(), next.encoder_digest(), next.decoder_digest());
  fill_logits(config_, key, next.read_count(), next.written_count(), result.output.log_probs);
  log_softmax(result.output.log_probs);
  result.output.write_prob = write_probability(config_, next.read_count(), next.written_count());
  return result;
}

std::vector<StepResult> SyntheticModel::decoder_step_batched(std::span<const ModelState> states,
                                                             std::span<const TokenId> last_outputs) const {
  if (states.size() != last_outputs.size()) {
    throw ContractError("decoder_step_batched: states and outputs differ in length");
  }
  if (states.empty()) throw ContractError("decoder_step_batched: empty batch");

  const std::size_t batch = states.size();
  const std::size_t n = config_.vocab_size;
  std::vector<ModelState> next(batch);
  std::vector<std::uint64_t> keys(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    next[b] = advance_decoder(states[b], last_outputs[b]);
    keys[b] = row_key(config_, next[b].read_count(), next[b].encoder_digest(), next[b].decoder_digest());
  }

  // One [batch x n] logits matrix, rows of differing decoder lengths.
  std::vector<double> logits(batch * n);
  for (std::size_t b = 0; b < batch; ++b) {
    std::span<double> row(logits.data() + b * n, n);
    fill_logits(config_, keys[b], next[b].read_count(), next[b].written_count(), row);
    log_softmax(row);
  }

  std::vector<StepResult> out;
  out.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    DecoderOutput o;
    o.log_probs.assign(logits.begin() + static_cast<std::ptrdiff_t>(b * n),
                       logits.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
    o.write_prob = write_probability(config_, next[b].read_count(), next[b].written_count());
    out.push_back({std::move(o), std::move(next[b])});
  }
  return out;
}

// --- config I/O ---------------------------------------------------------

SyntheticModelConfig load_synthetic_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("model config " + path + ": " + e.what());
  }
  SyntheticModelConfig config;
  try {
    config.seed = j.value("seed", std::uint64_t{0});
    config.wait_k = j.value("wait_k", 1);
    config.write_sharpness = j.value("write_sharpness", 4.0);
    config.logit_scale = j.value("logit_scale", config.logit_scale);
    config.eos_boost = j.value("eos_boost", config.eos_boost);
    config.eos_penalty = j.value("eos_penalty", config.eos_penalty);
    config.emit_eos = j.value("emit_eos", true);
    config.vocab_path = j.at("vocab_path").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model config " + path + ": " + e.what());
  }
  std::filesystem::path vocab(config.vocab_path);
  if (vocab.is_relative()) vocab = std::filesystem::path(path).parent_path() / vocab;
  config.vocab_path = vocab.string();
  try {
    config.vocab_size = Vocabulary::load_file(config.vocab_path).size();
  } catch (const InputError& e) {
    throw ConfigError("model config " + path + ": " + e.what());
  }
  if (config.wait_k < 0 || !(config.write_sharpness > 0.0) || !(config.eos_penalty >= 0.0)) {
    throw ConfigError("model config " + path +
                      ": wait_k must be >= 0, write_sharpness > 0 and eos_penalty >= 0");
  }
  return config;
}

std::string to_json(const SyntheticModelConfig& config) {
  nlohmann::ordered_json j;
  j["seed"] = config.seed;
  j["wait_k"] = config.wait_k;
  j["write_sharpness"] = config.write_sharpness;
  j["logit_scale"] = config.logit_scale;
  j["eos_boost"] = config.eos_boost;
  j["eos_penalty"] = config.eos_penalty;
  j["emit_eos"] = config.emit_eos;
  j["vocab_path"] = config.vocab_path;
  return j.dump();
}

}  // namespace simulbeam
