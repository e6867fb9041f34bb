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

// Streaming beam search for simultaneous translation.
//
// All live hypotheses share one read count. Hypotheses that want to write
// are expanded (and rescored against the ones waiting to read) until every
// kept hypothesis wants to read; only then is the next source token read,
// for the whole beam at once. The longest token prefix shared by the beam
// can no longer change and is emitted as final output; the rest of the best
// hypothesis is emitted as intermediate output.
//
// Before input EOS: EOS is masked out of every expansion, and a hypothesis
// may hold at most floor(len_a * reads + len_b) tokens before it is forced
// to wait for input. After input EOS the write probability is ignored and
// hypotheses are expanded until the beam holds only hypotheses that emitted
// EOS or hit the length cap floor(len_a * x + len_b), x = source tokens.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simulbeam/events.hpp"
#include "simulbeam/metrics.hpp"
#include "simulbeam/model.hpp"
#include "simulbeam/tokenizer.hpp"

namespace simulbeam {

struct EngineConfig {
  std::size_t beam_size = 4;
  double write_threshold = 0.5;
  double len_a = 1.5;
  double len_b = 5.0;
  // Tokens tried per writing hypothesis, best first; 0 means all of them.
  std::size_t max_expansions = 0;

  bool operator==(const EngineConfig&) const = default;
};

// {"beam_size":..,"write_threshold":..,"len_a":..,"len_b":..}; missing keys
// keep their defaults.
EngineConfig parse_engine_config(const std::string& json_text);
EngineConfig load_engine_config(const std::string& path);
std::string to_json(const EngineConfig& config);
void validate(const EngineConfig& config);

// floor(len_a * input_tokens + len_b), never below 1.
std::size_t output_cap(const EngineConfig& config, std::size_t input_tokens);

struct Hypothesis {
  TokenSeq tokens;  // written output, no BOS
  double sum_log_prob = 0.0;
  std::size_t reads = 0;
  // Decoder history holds every token but the last one, which is fed on
  // the next decoder step.
  ModelState state;
  bool finished = false;
  std::uint64_t id = 0;  // creation order
  // Decoder output for the current read count, once evaluated.
  std::optional<StepResult> step;

  TokenId last_token() const { return tokens.empty() ? Vocabulary::kBos : tokens.back(); }
};

// Length-normalized log-probability; the write probability plays no part.
double score(const Hypothesis& hyp);

struct SearchState {
  struct Snapshot;

  std::vector<Hypothesis> beam;
  EngineConfig config;
  TokenSeq emitted_final_tokens;
  TokenSeq source_tokens_read;  // excludes input EOS
  bool input_eos = false;
  std::uint64_t next_id = 1;
  std::shared_ptr<const Snapshot> checkpoint;

  // One empty hypothesis, nothing read.
  static SearchState fresh(const EngineConfig& config);
};

struct SearchState::Snapshot {
  std::vector<Hypothesis> beam;
  TokenSeq emitted_final_tokens;
  TokenSeq source_tokens_read;
  bool input_eos = false;
  std::uint64_t next_id = 1;
};

// True when the hypothesis would be expanded by expand_writers.
bool wants_write(const SearchState& state, const Hypothesis& hyp);

// Evaluates every live hypothesis lacking a decoder output in one batch.
void evaluate_pending(SearchState& state, const StreamingModel& model, CostCounters& counters);

void expand_writers(SearchState& state, const StreamingModel& model, CostCounters& counters);

// Reads one source token for the whole beam; EOS marks the end of input.
void read_token(SearchState& state, TokenId token, const StreamingModel& model,
                CostCounters& counters);

std::optional<TranslationEvent> emit_final(SearchState& state, const Vocabulary& vocab);
TranslationEvent emit_intermediate(const SearchState& state, const Vocabulary& vocab);

// Index of the best-scoring hypothesis; ties go to the lowest index.
std::size_t best_index(const SearchState& state);

void checkpoint(SearchState& state);
// Restores the last checkpoint, which stays available for further rewinds.
void rewind(SearchState& state);

// Forced writes after input EOS; the best hypothesis becomes final.
std::vector<TranslationEvent> finalize_sentence(SearchState& state, const StreamingModel& model,
                                                const Vocabulary& vocab, CostCounters& counters);

struct SentenceResult {
  std::string source;
  TokenSeq source_tokens;
  TokenSeq output_tokens;  // may end with EOS
  std::string translation;
};

// Session driver: turns ASR events into translation events. Finalized
// source text up to the last word boundary is read for good; any unstable
// remainder and intermediate text are decoded speculatively from a
// checkpoint that is rewound afterwards. Each call returns zero or more
// Final events followed by exactly one Intermediate event.
class StreamingTranslator {
 public:
  using StepObserver = std::function<void(const SearchState&)>;

  StreamingTranslator(const Vocabulary& vocab, const StreamingModel& model, EngineConfig config);

  std::vector<TranslationEvent> process_event(const AsrEvent& event);
  // End of stream: treats pending text as stable and closes an open sentence.
  std::vector<TranslationEvent> finish();

  // Called after every read/expand, emission, finalization and rewind.
  void set_step_observer(StepObserver observer) { observer_ = std::move(observer); }

  const SearchState& state() const { return state_; }
  const CostCounters& counters() const { return counters_; }
  const std::vector<SentenceResult>& sentences() const { return sentences_; }
  const std::string& transcript() const { return transcript_; }
  const std::string& final_text() const { return final_text_; }
  std::size_t sentence_index() const { return sentences_.size(); }

 private:
  void consume_stable(std::string text, std::vector<TranslationEvent>& out);
  void read_text(const std::string& text, bool emit_finals, std::vector<TranslationEvent>& out);
  void end_sentence(std::vector<TranslationEvent>& out);
  void speculate(const std::string& text, std::vector<TranslationEvent>& out);
  void push(std::vector<TranslationEvent>& out, TranslationEvent ev);
  void notify() const;

  const Vocabulary& vocab_;
  const StreamingModel& model_;
  EngineConfig config_;
  SearchState state_;
  CostCounters counters_;
  StepObserver observer_;

  std::optional<std::int64_t> last_seq_no_;
  std::string transcript_;  // all finalized ASR text
  std::string pending_;     // finalized ASR text past the last word boundary
  std::string sentence_source_;
  std::string final_text_;  // all Final translation text
  std::vector<SentenceResult> sentences_;
};

}  // namespace simulbeam
