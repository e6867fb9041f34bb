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

// Test-only reference decoders. They evaluate the synthetic model from
// scratch through synthetic_distribution and share no search code with
// the engine or the baseline.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "simulbeam/model.hpp"
#include "simulbeam/stream_beam.hpp"
#include "simulbeam/tokenizer.hpp"

namespace simulbeam::testing {

// Straightforward k=1 simultaneous decoding: after each read, keep
// writing the argmax token (EOS masked, lowest id on ties) while the write
// probability clears the threshold and the running length cap allows;
// after input EOS write the argmax until EOS or the final cap.
TokenSeq greedy_reference(const SyntheticModelConfig& model, const EngineConfig& engine,
                          const TokenSeq& input);

struct ExhaustiveResult {
  double best_score = 0.0;
  std::vector<TokenSeq> best;  // every sequence reaching best_score
  std::size_t leaves = 0;
};

// Enumerates every read/write path the streaming rules allow without any
// pruning and returns the best length-normalized complete sequence.
ExhaustiveResult exhaustive_streaming(const SyntheticModelConfig& model, const EngineConfig& engine,
                                      const TokenSeq& input);

// Same for full-sentence decoding: input plus EOS is read up front and
// every sequence ending in EOS or reaching `cap` is a leaf.
ExhaustiveResult exhaustive_full(const SyntheticModelConfig& model, const TokenSeq& input,
                                 std::size_t cap);

// Token-level engine run: read + expand + emit_final per token, then EOS
// and finalize_sentence. Returns the final output tokens.
TokenSeq run_engine(const StreamingModel& model, const Vocabulary& vocab, const EngineConfig& engine,
                    const TokenSeq& input, CostCounters& counters);

// Vocabulary of `size` entries: the reserved three, then single letters
// a, b, c, ... followed by two-letter combinations.
Vocabulary letter_vocab(std::size_t size);

// Letters a-h, space, '.', plus a few whole-word entries.
Vocabulary text_vocab();

// Random sentence over letters a-h, ending in '.'.
std::string random_sentence(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words);

}  // namespace simulbeam::testing
