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

// Replay and benchmark harness shared by the CLI and the Python module.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simulbeam/events.hpp"
#include "simulbeam/metrics.hpp"
#include "simulbeam/model.hpp"
#include "simulbeam/stream_beam.hpp"
#include "simulbeam/tokenizer.hpp"

namespace simulbeam {

enum class Mode { Streaming, Retranslate };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& s);

// One Final event per whitespace-separated word, each followed by a space
// except the last, which keeps the sentence terminator.
std::vector<AsrEvent> simulate_word_feed(std::string_view sentence, std::int64_t first_seq_no = 0);

// Applies translation events to a display: Final text is appended to the
// committed part, Intermediate text replaces the uncommitted tail. A state
// is recorded at the end of each processing step in which the display
// changed, both for the session and for the sentence it touched.
class DisplayTracker {
 public:
  void apply(const TranslationEvent& event);
  void end_step();

  std::string display() const { return committed_ + tail_; }
  const DisplayTrace& session_trace() const { return session_; }
  // Empty trace for sentences the display never touched.
  DisplayTrace sentence_trace(std::size_t sentence) const;

 private:
  struct SentenceDisplay {
    std::string committed;
    std::string tail;
    DisplayTrace trace;
  };
  SentenceDisplay& sentence(std::size_t index);

  std::string committed_;
  std::string tail_;
  std::int64_t tail_sentence_ = -1;
  DisplayTrace session_;
  std::vector<SentenceDisplay> sentences_;
  std::vector<std::size_t> touched_;
};

struct SentenceMetrics {
  std::string source;
  std::string translation;
  std::optional<double> average_lag;  // absent for an empty translation
  double char_flicker_pct = 0.0;
};

struct RunOutput {
  MetricsReport report;
  // Translation events tagged with the index of the input event (or the
  // closing flush, index = input size) that produced them.
  std::vector<std::pair<std::size_t, TranslationEvent>> events;
  DisplayTrace display;
  std::vector<SentenceMetrics> sentences;
};

// Runs one session in memory. `references`, when given, must hold one
// entry per translated sentence.
RunOutput run_session(Mode mode, const Vocabulary& vocab, const StreamingModel& model,
                      const EngineConfig& engine, const std::vector<AsrEvent>& events,
                      const std::optional<std::vector<std::string>>& references = std::nullopt);

struct RunSpec {
  Mode mode = Mode::Streaming;
  EngineConfig engine;
  std::string events_path;     // JSONL event log, or
  std::string sentences_path;  // one sentence per line
  std::string model_config_path;
  std::optional<std::uint64_t> seed;  // overrides the model config seed
  std::string references_path;        // optional
  std::string output_dir;
  bool record_wall_clock = false;
};

// Reads inputs, runs the session and writes report.json, events.jsonl,
// display.jsonl, sentences.jsonl and asr_events.jsonl into output_dir.
// Throws InputError (bad inputs) or ConfigError (bad configuration).
MetricsReport run(const RunSpec& spec);

std::vector<AsrEvent> read_sentence_feed(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

}  // namespace simulbeam
