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

// Non-streaming comparison system: classic beam search over a model that
// sees the whole sentence before decoding, and a driver that fakes
// streaming by retranslating the growing sentence prefix on every event.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simulbeam/events.hpp"
#include "simulbeam/metrics.hpp"
#include "simulbeam/model.hpp"
#include "simulbeam/stream_beam.hpp"
#include "simulbeam/tokenizer.hpp"

namespace simulbeam {

// Full-sentence view of a streaming model: the encoder consumes the whole
// input plus EOS up front and the write probability is never consulted.
class NonStreamingModel {
 public:
  explicit NonStreamingModel(const StreamingModel& model) : model_(model) {}

  std::size_t vocab_size() const { return model_.vocab_size(); }
  ModelState encode(const TokenSeq& input, CostCounters& counters) const;
  std::vector<StepResult> decode_batch(std::span<const ModelState> states,
                                       std::span<const TokenId> last_outputs,
                                       CostCounters& counters) const;

 private:
  const StreamingModel& model_;
};

// Expands every live hypothesis by every token, keeps the top k by
// length-normalized score and sets aside those ending in EOS or reaching
// `cap` tokens, until k are set aside. Returns the best of them.
TokenSeq beam_search_full(const NonStreamingModel& model, const TokenSeq& input, std::size_t k,
                          std::size_t cap, CostCounters& counters);

// Re-decodes the current sentence prefix on every event and shows the
// whole result as an Intermediate rewrite; at a sentence end the full
// sentence translation is emitted as Final.
class RetranslationSession {
 public:
  RetranslationSession(const Vocabulary& vocab, const StreamingModel& model, EngineConfig config);

  std::vector<TranslationEvent> process_event(const AsrEvent& event);
  std::vector<TranslationEvent> finish();

  const CostCounters& counters() const { return counters_; }
  const std::vector<SentenceResult>& sentences() const { return sentences_; }
  std::size_t decode_count() const { return decodes_; }

 private:
  std::string translate(const std::string& source, TokenSeq* source_tokens, TokenSeq* output);
  void complete_sentence(const std::string& source, std::vector<TranslationEvent>& out);
  TranslationEvent make(EventKind kind, std::string text, const std::string& source) const;

  const Vocabulary& vocab_;
  NonStreamingModel model_;
  EngineConfig config_;
  CostCounters counters_;
  std::size_t decodes_ = 0;
  std::optional<std::int64_t> last_seq_no_;
  std::string sentence_;  // finalized source text of the open sentence
  std::vector<SentenceResult> sentences_;
};

}  // namespace simulbeam
