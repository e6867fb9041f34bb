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

#include "simulbeam/harness.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "simulbeam/baseline.hpp"

namespace simulbeam {

const char* to_string(Mode mode) { return mode == Mode::Streaming ? "streaming" : "retranslate"; }

Mode mode_from_string(const std::string& s) {
  if (s == "streaming") return Mode::Streaming;
  if (s == "retranslate") return Mode::Retranslate;
  throw ConfigError("unknown mode '" + s + "' (expected streaming or retranslate)");
}

std::vector<AsrEvent> simulate_word_feed(std::string_view sentence, std::int64_t first_seq_no) {
  const std::vector<std::string> words = split_words(sentence);
  std::vector<AsrEvent> events;
  events.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    AsrEvent ev;
    ev.kind = EventKind::Final;
    ev.text = words[i];
    if (i + 1 < words.size()) ev.text += ' ';
    ev.seq_no = first_seq_no + static_cast<std::int64_t>(i);
    events.push_back(std::move(ev));
  }
  return events;
}

// --- display ------------------------------------------------------------

DisplayTracker::SentenceDisplay& DisplayTracker::sentence(std::size_t index) {
  if (sentences_.size() <= index) sentences_.resize(index + 1);
  if (std::find(touched_.begin(), touched_.end(), index) == touched_.end()) touched_.push_back(index);
  return sentences_[index];
}

void DisplayTracker::apply(const TranslationEvent& event) {
  const auto index = static_cast<std::size_t>(event.sentence);
  if (event.kind == EventKind::Final) {
    committed_ += event.text;
    sentence(index).committed += event.text;
    return;
  }
  if (tail_sentence_ >= 0 && tail_sentence_ != event.sentence) {
    sentence(static_cast<std::size_t>(tail_sentence_)).tail.clear();
  }
  tail_ = event.text;
  tail_sentence_ = event.sentence;
  sentence(index).tail = event.text;
}

namespace {
void record(DisplayTrace& trace, std::string state) {
  const bool changed = trace.states.empty() ? !state.empty() : state != trace.states.back();
  if (changed) trace.states.push_back(std::move(state));
}
}  // namespace

void DisplayTracker::end_step() {
  record(session_, display());
  for (std::size_t index : touched_) {
    auto& s = sentences_[index];
    record(s.trace, s.committed + s.tail);
  }
  touched_.clear();
}

DisplayTrace DisplayTracker::sentence_trace(std::size_t index) const {
  return index < sentences_.size() ? sentences_[index].trace : DisplayTrace{};
}

// --- sessions -----------------------------------------------------------

namespace {

template <typename Session>
RunOutput drive(Session& session, const std::vector<AsrEvent>& events) {
  RunOutput out;
  DisplayTracker tracker;
  auto take = [&](std::size_t step, std::vector<TranslationEvent> produced) {
    for (auto& ev : produced) {
      tracker.apply(ev);
      out.events.emplace_back(step, std::move(ev));
    }
    tracker.end_step();
  };
  for (std::size_t i = 0; i < events.size(); ++i) take(i, session.process_event(events[i]));
  take(events.size(), session.finish());

  out.display = tracker.session_trace();
  out.report.counters = session.counters();
  out.report.char_flicker_pct = char_flicker(out.display);

  std::vector<std::vector<TimedText>> finals(session.sentences().size());
  for (const auto& [step, ev] : out.events) {
    const auto index = static_cast<std::size_t>(ev.sentence);
    if (ev.kind == EventKind::Final && index < finals.size()) {
      finals[index].push_back({ev.text, static_cast<std::size_t>(ev.source_words)});
    }
  }

  double lag_sum = 0.0;
  std::size_t lag_count = 0;
  for (std::size_t s = 0; s < session.sentences().size(); ++s) {
    const SentenceResult& result = session.sentences()[s];
    SentenceMetrics m;
    m.source = result.source;
    m.translation = result.translation;
    m.char_flicker_pct = char_flicker(tracker.sentence_trace(s));
    const std::size_t source_len = count_words(result.source);
    const LagTrace trace = build_lag_trace(finals[s], source_len);
    if (source_len > 0 && trace.target_len > 0) {
      m.average_lag = average_lag(trace);
      lag_sum += *m.average_lag;
      ++lag_count;
    }
    out.sentences.push_back(std::move(m));
  }
  out.report.average_lag = lag_count == 0 ? 0.0 : lag_sum / static_cast<double>(lag_count);
  return out;
}

}  // namespace

RunOutput run_session(Mode mode, const Vocabulary& vocab, const StreamingModel& model,
                      const EngineConfig& engine, const std::vector<AsrEvent>& events,
                      const std::optional<std::vector<std::string>>& references) {
  RunOutput out;
  if (mode == Mode::Streaming) {
    StreamingTranslator session(vocab, model, engine);
    out = drive(session, events);
  } else {
    RetranslationSession session(vocab, model, engine);
    out = drive(session, events);
  }
  if (references) {
    if (references->size() != out.sentences.size()) {
      throw InputError("expected " + std::to_string(out.sentences.size()) +
                       " reference sentences, got " + std::to_string(references->size()));
    }
    std::vector<WordSeq> refs;
    std::vector<WordSeq> hyps;
    for (std::size_t s = 0; s < out.sentences.size(); ++s) {
      refs.push_back(split_words((*references)[s]));
      hyps.push_back(split_words(out.sentences[s].translation));
    }
    if (!refs.empty()) out.report.bleu = bleu(refs, hyps);
  }
  return out;
}

// --- file-level run -----------------------------------------------------

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<AsrEvent> read_sentence_feed(const std::string& path) {
  std::vector<AsrEvent> events;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (split_words(lines[i]).empty()) continue;
    if (!detect_sentence_end(lines[i])) {
      throw InputError(path + ": line " + std::to_string(i + 1) +
                       ": sentence must end with '.', '?' or '!'");
    }
    auto feed = simulate_word_feed(lines[i], static_cast<std::int64_t>(events.size()));
    events.insert(events.end(), feed.begin(), feed.end());
  }
  return events;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

}  // namespace

MetricsReport run(const RunSpec& spec) {
  if (spec.events_path.empty() == spec.sentences_path.empty()) {
    throw InputError("exactly one of an events file or a sentences file is required");
  }
  if (spec.output_dir.empty()) throw InputError("an output directory is required");
  try {
    validate(spec.engine);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }

  SyntheticModelConfig model_config = load_synthetic_config(spec.model_config_path);
  if (spec.seed) model_config.seed = *spec.seed;
  const Vocabulary vocab = Vocabulary::load_file(model_config.vocab_path);
  const SyntheticModel model(model_config);

  std::vector<AsrEvent> events;
  if (!spec.events_path.empty()) {
    std::ifstream in(spec.events_path);
    if (!in) throw InputError("cannot open " + spec.events_path);
    events = read_event_log(in);
  } else {
    events = read_sentence_feed(spec.sentences_path);
  }
  std::optional<std::vector<std::string>> references;
  if (!spec.references_path.empty()) {
    references = read_lines(spec.references_path);
    while (!references->empty() && split_words(references->back()).empty()) references->pop_back();
  }

  const auto started = std::chrono::steady_clock::now();
  RunOutput out = run_session(spec.mode, vocab, model, spec.engine, events, references);
  if (spec.record_wall_clock) {
    out.report.counters.wall_clock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                            std::chrono::steady_clock::now() - started)
                                            .count();
  }

  const std::filesystem::path dir(spec.output_dir);
  std::filesystem::create_directories(dir);
  open_output(dir / "report.json") << to_json(out.report) << '\n';
  {
    auto f = open_output(dir / "events.jsonl");
    for (const auto& [step, ev] : out.events) {
      auto j = nlohmann::ordered_json::parse(to_jsonl(ev));
      j["step"] = step;
      f << j.dump() << '\n';
    }
  }
  {
    auto f = open_output(dir / "display.jsonl");
    for (std::size_t i = 0; i < out.display.states.size(); ++i) {
      nlohmann::ordered_json j;
      j["write"] = i;
      j["display"] = out.display.states[i];
      f << j.dump() << '\n';
    }
  }
  {
    auto f = open_output(dir / "sentences.jsonl");
    for (std::size_t i = 0; i < out.sentences.size(); ++i) {
      const auto& s = out.sentences[i];
      nlohmann::ordered_json j;
      j["index"] = i;
      j["source"] = s.source;
      j["translation"] = s.translation;
      if (s.average_lag) {
        j["average_lag"] = *s.average_lag;
      } else {
        j["average_lag"] = nullptr;
      }
      j["char_flicker_pct"] = s.char_flicker_pct;
      f << j.dump() << '\n';
    }
  }
  {
    auto f = open_output(dir / "asr_events.jsonl");
    write_event_log(f, events);
  }
  return out.report;
}

}  // namespace simulbeam
