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

// Event protocol between ASR, the translator and the display.
//
// ASR reports text as a stream of Intermediate and Final events. A Final
// event is never retracted; it advances the point from which the next
// Intermediate event replaces text. An Intermediate event carries the full
// replacement text from that point, not a delta.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "simulbeam/types.hpp"

namespace simulbeam {

struct AsrEvent {
  EventKind kind = EventKind::Final;
  std::string text;
  std::int64_t seq_no = 0;
  std::int64_t timestamp_ms = 0;

  bool operator==(const AsrEvent&) const = default;
};

struct TranslationEvent {
  EventKind kind = EventKind::Final;
  std::string text;
  // Source tokens of the current sentence consumed when emitted.
  std::int64_t source_reads = 0;
  // Whitespace-separated source words covered by those reads.
  std::int64_t source_words = 0;
  // Zero-based sentence the event belongs to.
  std::int64_t sentence = 0;

  bool operator==(const TranslationEvent&) const = default;
};

struct SourceSplit {
  std::string stable;
  std::string unstable;
};

// Space, ASCII punctuation . , ; : ! ? " ' ( ) and their common Unicode
// variants (inverted marks, guillemets, curly quotes, ellipsis).
bool is_word_boundary(char32_t cp);
bool is_sentence_terminator(char32_t cp);
bool is_space(char32_t cp);

// Longest prefix ending at a word boundary, plus the remainder.
SourceSplit split_stable_prefix(std::string_view text);

// Appends a Final event's text to the finalized transcript.
std::string accumulate_final(std::string_view session_buffer, const AsrEvent& event);

// True iff text, ignoring trailing spaces, ends with '.', '?' or '!'.
bool detect_sentence_end(std::string_view text);

// Byte length of the first sentence in `text`, i.e. up to and including the
// first terminator; npos when the text holds no terminator.
std::size_t first_sentence_end(std::string_view text);

// Counts maximal runs of non-space characters.
std::size_t count_words(std::string_view text);
std::vector<std::string> split_words(std::string_view text);

// JSONL event log: {"kind":"intermediate"|"final","text":..,"seq_no":..,"timestamp_ms":..}
std::string to_jsonl(const AsrEvent& event);
AsrEvent asr_event_from_json(std::string_view line);
// Throws InputError naming the offending 1-based line.
std::vector<AsrEvent> read_event_log(std::istream& in);
void write_event_log(std::ostream& out, const std::vector<AsrEvent>& events);

std::string to_jsonl(const TranslationEvent& event);

}  // namespace simulbeam
