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

// Simultaneous translation model interface.
//
// A model incrementally encodes source tokens and, for a given decoder
// history, returns a distribution over the next target token together with
// a write probability. Low write probability means the model wants to read
// more input before writing.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "simulbeam/types.hpp"

namespace simulbeam {

struct DecoderOutput {
  std::vector<double> log_probs;  // one entry per vocabulary id
  double write_prob = 0.0;

  bool operator==(const DecoderOutput&) const = default;
};

// Incremental encoder/decoder cache. Histories are persistent linked
// chains, so copying a state is O(1) and appending never disturbs other
// copies: a clone is independent of the state it was copied from. The
// running digests stand in for cached keys/values and give states a
// canonical equality.
class ModelState {
 public:
  ModelState() = default;

  std::size_t read_count() const;
  std::size_t written_count() const;
  bool eos_read() const;
  std::uint64_t encoder_digest() const;
  std::uint64_t decoder_digest() const;
  TokenSeq source_tokens() const;
  TokenSeq written_tokens() const;

  ModelState with_source(TokenId token) const;
  ModelState with_written(TokenId token) const;
  // This state's decoder history on top of `donor`'s encoder history.
  ModelState with_encoder_of(const ModelState& donor) const;

  bool operator==(const ModelState& other) const;

 private:
  struct Node {
    std::shared_ptr<const Node> parent;
    TokenId token;
    std::size_t length;
    std::uint64_t digest;
  };

  std::shared_ptr<const Node> encoder_;
  std::shared_ptr<const Node> decoder_;
  bool eos_read_ = false;
};

std::uint64_t encoder_digest_of(std::span<const TokenId> source);
std::uint64_t decoder_digest_of(std::span<const TokenId> written);

struct StepResult {
  DecoderOutput output;
  ModelState state;
};

class StreamingModel {
 public:
  virtual ~StreamingModel() = default;

  virtual std::size_t vocab_size() const = 0;

  // Throws ContractError for invalid ids or when input EOS was already read.
  virtual ModelState encoder_append(const ModelState& state, TokenId token) const = 0;

  // Feeds `last_output` (BOS on the first step) to the decoder and returns
  // the distribution for the following token. Requires read_count() >= 1.
  virtual StepResult decoder_step(const ModelState& state, TokenId last_output) const = 0;

  // Element i equals decoder_step(states[i], last_outputs[i]). The default
  // runs the steps one by one.
  virtual std::vector<StepResult> decoder_step_batched(std::span<const ModelState> states,
                                                       std::span<const TokenId> last_outputs) const;
};

struct SyntheticModelConfig {
  std::uint64_t seed = 0;
  std::size_t vocab_size = 0;
  int wait_k = 1;
  double write_sharpness = 4.0;
  // Scale of the hashed token logits; larger values give peakier
  // distributions.
  double logit_scale = 3.0;
  // Added to the EOS logit per token written beyond the read count.
  double eos_boost = 1.5;
  // Subtracted from the EOS logit per token the output still trails the
  // input by, beyond the first.
  double eos_penalty = 1.0;
  // When false EOS never receives probability mass.
  bool emit_eos = true;
  std::string vocab_path;  // informational, set by the JSON loader
};

// Parses {"seed":..,"wait_k":..,"write_sharpness":..,"vocab_path":..}.
// vocab_size is taken from the vocabulary file; a relative vocab_path is
// resolved against the config file's directory.
SyntheticModelConfig load_synthetic_config(const std::string& path);
std::string to_json(const SyntheticModelConfig& config);

double logistic(double x);

// Deterministic stand-in for a trained model, computed from scratch:
// token logits come from a counter-based hash of (seed, reads, source
// digest, written digest, token id); write_prob is
// logistic(write_sharpness * (reads - |written| - wait_k)).
DecoderOutput synthetic_distribution(const SyntheticModelConfig& config,
                                     std::span<const TokenId> source,
                                     std::span<const TokenId> written);

class SyntheticModel final : public StreamingModel {
 public:
  explicit SyntheticModel(SyntheticModelConfig config);

  const SyntheticModelConfig& config() const { return config_; }
  std::size_t vocab_size() const override { return config_.vocab_size; }

  ModelState encoder_append(const ModelState& state, TokenId token) const override;
  StepResult decoder_step(const ModelState& state, TokenId last_output) const override;
  std::vector<StepResult> decoder_step_batched(std::span<const ModelState> states,
                                               std::span<const TokenId> last_outputs) const override;

 private:
  ModelState advance_decoder(const ModelState& state, TokenId last_output) const;

  SyntheticModelConfig config_;
};

}  // namespace simulbeam
