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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simulbeam/types.hpp"

namespace simulbeam {

// Deterministic compute accounting. wall_clock_ms is informational only
// and stays zero unless the caller fills it in.
struct CostCounters {
  std::int64_t decoder_steps = 0;
  std::int64_t encoder_steps = 0;
  std::int64_t batched_calls = 0;
  std::int64_t wall_clock_ms = 0;

  bool operator==(const CostCounters&) const = default;
};

enum class StepKind { Decoder, Encoder };

// A decoder call counts batch_size steps and one batched call; an encoder
// call counts batch_size encoder steps.
CostCounters record_step(CostCounters counters, StepKind kind, std::size_t batch_size);

using WordSeq = std::vector<std::string>;

// Corpus BLEU-4 with brevity penalty. When at least one unigram matches,
// zero higher-order precisions are replaced by 1e-9; no unigram match at
// all gives 0. Returns a value in [0, 100].
double bleu(const std::vector<WordSeq>& references, const std::vector<WordSeq>& hypotheses);

// delays[t-1] = source words read when target word t was finalized.
struct LagTrace {
  std::vector<double> delays;
  std::size_t source_len = 0;
  std::size_t target_len = 0;
};

// Average lagging: (1/tau) * sum_{t<=tau} (g(t) - (t-1)/gamma) with
// gamma = target_len / source_len and tau the first t where g(t) reaches
// source_len (target_len if never).
double average_lag(const LagTrace& trace);

// One final-output chunk and the source words read when it was emitted.
struct TimedText {
  std::string text;
  std::size_t source_words = 0;
};

// Splits the concatenated chunks into whitespace words; each word's delay
// is the read count of the chunk carrying its last character, clamped to
// source_len.
LagTrace build_lag_trace(const std::vector<TimedText>& finals, std::size_t source_len);

struct DisplayTrace {
  std::vector<std::string> states;
};

// Mean over consecutive (old, new) pairs with old nonempty of
// 100 * (|old| - LCP(old, new)) / |old|, lengths in code points.
// Fewer than two states gives 0.
double char_flicker(const DisplayTrace& trace);

struct MetricsReport {
  std::optional<double> bleu;  // absent when no references were given
  double average_lag = 0.0;
  double char_flicker_pct = 0.0;
  CostCounters counters;
};

std::string to_json(const MetricsReport& report);
std::string to_json(const CostCounters& counters);

}  // namespace simulbeam
