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

#include "simulbeam/events.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"
#include "simulbeam/utf8.hpp"

namespace simulbeam {

const char* to_string(EventKind kind) {
  return kind == EventKind::Final ? "final" : "intermediate";
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "final") return EventKind::Final;
  if (s == "intermediate") return EventKind::Intermediate;
  throw InputError("unknown event kind '" + s + "'");
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\u00A0';
}

bool is_sentence_terminator(char32_t cp) { return cp == U'.' || cp == U'?' || cp == U'!'; }

bool is_word_boundary(char32_t cp) {
  if (is_space(cp)) return true;
  switch (cp) {
    case U'.': case U',': case U';': case U':': case U'!': case U'?':
    case U'"': case U'\'': case U'(': case U')':
    case U'¿':  // inverted question mark
    case U'¡':  // inverted exclamation mark
    case U'«': case U'»':  // guillemets
    case U'‘': case U'’': case U'“': case U'”':
    case U'…':  // ellipsis
      return true;
    default:
      return false;
  }
}

SourceSplit split_stable_prefix(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  std::size_t cut = 0;
  for (std::size_t i = cps.size(); i > 0; --i) {
    if (is_word_boundary(cps[i - 1])) {
      cut = i;
      break;
    }
  }
  const std::u32string_view view(cps);
  return {utf8::encode(view.substr(0, cut)), utf8::encode(view.substr(cut))};
}

std::string accumulate_final(std::string_view session_buffer, const AsrEvent& event) {
  if (event.kind != EventKind::Final) {
    throw ContractError("accumulate_final expects a Final event");
  }
  std::string out(session_buffer);
  out += event.text;
  return out;
}

bool detect_sentence_end(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  std::size_t end = cps.size();
  while (end > 0 && cps[end - 1] == U' ') --end;
  return end > 0 && is_sentence_terminator(cps[end - 1]);
}

std::size_t first_sentence_end(std::string_view text) {
  // Terminators are ASCII, so a byte scan cannot split a multi-byte character.
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '.' || text[i] == '?' || text[i] == '!') return i + 1;
  }
  return std::string_view::npos;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::u32string current;
  for (char32_t cp : utf8::decode(text)) {
    if (is_space(cp)) {
      if (!current.empty()) words.push_back(utf8::encode(current));
      current.clear();
    } else {
      current.push_back(cp);
    }
  }
  if (!current.empty()) words.push_back(utf8::encode(current));
  return words;
}

std::size_t count_words(std::string_view text) { return split_words(text).size(); }

std::string to_jsonl(const AsrEvent& event) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(event.kind);
  j["text"] = event.text;
  j["seq_no"] = event.seq_no;
  j["timestamp_ms"] = event.timestamp_ms;
  return j.dump();
}

AsrEvent asr_event_from_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("event must be a JSON object");
  for (const char* key : {"kind", "text", "seq_no"}) {
    if (!j.contains(key)) throw InputError(std::string("event is missing '") + key + "'");
  }
  if (!j["kind"].is_string() || !j["text"].is_string() || !j["seq_no"].is_number_integer()) {
    throw InputError("event field has the wrong type");
  }
  AsrEvent ev;
  ev.kind = event_kind_from_string(j["kind"].get<std::string>());
  ev.text = j["text"].get<std::string>();
  utf8::decode(ev.text);  // validate
  ev.seq_no = j["seq_no"].get<std::int64_t>();
  if (j.contains("timestamp_ms")) {
    if (!j["timestamp_ms"].is_number_integer() || j["timestamp_ms"].get<std::int64_t>() < 0) {
      throw InputError("timestamp_ms must be a non-negative integer");
    }
    ev.timestamp_ms = j["timestamp_ms"].get<std::int64_t>();
  }
  return ev;
}

std::vector<AsrEvent> read_event_log(std::istream& in) {
  std::vector<AsrEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      events.push_back(asr_event_from_json(line));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

void write_event_log(std::ostream& out, const std::vector<AsrEvent>& events) {
  for (const auto& ev : events) out << to_jsonl(ev) << '\n';
}

std::string to_jsonl(const TranslationEvent& event) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(event.kind);
  j["text"] = event.text;
  j["source_reads"] = event.source_reads;
  j["source_words"] = event.source_words;
  j["sentence"] = event.sentence;
  return j.dump();
}

}  // namespace simulbeam
