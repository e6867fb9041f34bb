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

#include "simulbeam/stream_beam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace simulbeam {

// --- configuration ------------------------------------------------------

void validate(const EngineConfig& config) {
  if (config.beam_size < 1) throw ContractError("beam_size must be >= 1");
  if (!(config.write_threshold >= 0.0 && config.write_threshold <= 1.0)) {
    throw ContractError("write_threshold must lie in [0, 1]");
  }
  if (!std::isfinite(config.len_a) || !std::isfinite(config.len_b) || config.len_a < 0.0) {
    throw ContractError("len_a must be finite and >= 0, len_b finite");
  }
}

EngineConfig parse_engine_config(const std::string& json_text) {
  EngineConfig config;
  try {
    const auto j = nlohmann::json::parse(json_text);
    config.beam_size = j.value("beam_size", config.beam_size);
    config.write_threshold = j.value("write_threshold", config.write_threshold);
    config.len_a = j.value("len_a", config.len_a);
    config.len_b = j.value("len_b", config.len_b);
    config.max_expansions = j.value("max_expansions", config.max_expansions);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("engine config: ") + e.what());
  }
  try {
    validate(config);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("engine config: ") + e.what());
  }
  return config;
}

EngineConfig load_engine_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open engine config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_engine_config(buf.str());
}

std::string to_json(const EngineConfig& config) {
  nlohmann::ordered_json j;
  j["beam_size"] = config.beam_size;
  j["write_threshold"] = config.write_threshold;
  j["len_a"] = config.len_a;
  j["len_b"] = config.len_b;
  j["max_expansions"] = config.max_expansions;
  return j.dump();
}

std::size_t output_cap(const EngineConfig& config, std::size_t input_tokens) {
  const double cap = std::floor(config.len_a * static_cast<double>(input_tokens) + config.len_b);
  return cap < 1.0 ? 1 : static_cast<std::size_t>(cap);
}

// --- hypotheses ---------------------------------------------------------

double score(const Hypothesis& hyp) {
  return hyp.sum_log_prob / static_cast<double>(std::max<std::size_t>(1, hyp.tokens.size()));
}

SearchState SearchState::fresh(const EngineConfig& config) {
  validate(config);
  SearchState state;
  state.config = config;
  Hypothesis root;
  root.id = state.next_id++;
  state.beam.push_back(std::move(root));
  return state;
}

namespace {

std::size_t current_cap(const SearchState& state) {
  return output_cap(state.config, state.source_tokens_read.size());
}

// After input EOS, hypotheses at the length cap are done.
void close_capped(SearchState& state) {
  if (!state.input_eos) return;
  const std::size_t cap = current_cap(state);
  for (auto& hyp : state.beam) {
    if (!hyp.finished && hyp.tokens.size() >= cap) hyp.finished = true;
  }
}

bool better(const Hypothesis& a, const Hypothesis& b) {
  const double sa = score(a);
  const double sb = score(b);
  if (sa != sb) return sa > sb;
  return a.id < b.id;
}

// Tokens a writer is expanded with, in ascending id order.
std::vector<TokenId> expansion_tokens(const SearchState& state, const DecoderOutput& output) {
  std::vector<TokenId> tokens;
  tokens.reserve(output.log_probs.size());
  for (std::size_t v = 0; v < output.log_probs.size(); ++v) {
    const auto id = static_cast<TokenId>(v);
    if (id == Vocabulary::kBos) continue;
    if (id == Vocabulary::kEos && !state.input_eos) continue;
    if (std::isinf(output.log_probs[v]) || std::isnan(output.log_probs[v])) continue;
    tokens.push_back(id);
  }
  const std::size_t limit = state.config.max_expansions;
  if (limit > 0 && tokens.size() > limit) {
    std::partial_sort(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(limit), tokens.end(),
                      [&](TokenId a, TokenId b) {
                        const double la = output.log_probs[static_cast<std::size_t>(a)];
                        const double lb = output.log_probs[static_cast<std::size_t>(b)];
                        return la != lb ? la > lb : a < b;
                      });
    tokens.resize(limit);
    std::sort(tokens.begin(), tokens.end());
  }
  return tokens;
}

}  // namespace

bool wants_write(const SearchState& state, const Hypothesis& hyp) {
  if (hyp.finished) return false;
  if (state.input_eos) return true;
  if (!hyp.step) return false;
  return hyp.step->output.write_prob >= state.config.write_threshold &&
         hyp.tokens.size() < current_cap(state);
}

void evaluate_pending(SearchState& state, const StreamingModel& model, CostCounters& counters) {
  std::vector<std::size_t> indices;
  std::vector<ModelState> states;
  std::vector<TokenId> last;
  for (std::size_t i = 0; i < state.beam.size(); ++i) {
    const auto& hyp = state.beam[i];
    if (hyp.finished || hyp.step) continue;
    indices.push_back(i);
    states.push_back(hyp.state);
    last.push_back(hyp.last_token());
  }
  if (indices.empty()) return;
  auto results = model.decoder_step_batched(states, last);
  counters = record_step(counters, StepKind::Decoder, indices.size());
  for (std::size_t b = 0; b < indices.size(); ++b) {
    state.beam[indices[b]].step = std::move(results[b]);
  }
}

void expand_writers(SearchState& state, const StreamingModel& model, CostCounters& counters) {
  close_capped(state);
  const std::size_t cap = current_cap(state);
  while (true) {
    evaluate_pending(state, model, counters);

    bool any_writer = false;
    for (const auto& hyp : state.beam) any_writer = any_writer || wants_write(state, hyp);
    if (!any_writer) break;

    std::vector<Hypothesis> candidates;
    for (auto& hyp : state.beam) {
      if (!wants_write(state, hyp)) {
        candidates.push_back(std::move(hyp));
        continue;
      }
      const StepResult& step = *hyp.step;
      for (TokenId v : expansion_tokens(state, step.output)) {
        Hypothesis child;
        child.tokens = hyp.tokens;
        child.tokens.push_back(v);
        child.sum_log_prob = hyp.sum_log_prob + step.output.log_probs[static_cast<std::size_t>(v)];
        child.reads = hyp.reads;
        child.state = step.state;
        child.finished = v == Vocabulary::kEos || (state.input_eos && child.tokens.size() >= cap);
        child.id = state.next_id++;
        candidates.push_back(std::move(child));
      }
    }

    const std::size_t keep = std::min(state.config.beam_size, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), better);
    candidates.resize(keep);
    state.beam = std::move(candidates);
  }
}

void read_token(SearchState& state, TokenId token, const StreamingModel& model,
                CostCounters& counters) {
  if (state.input_eos) throw ContractError("read_token: input EOS already consumed");
  if (token < 0 || static_cast<std::size_t>(token) >= model.vocab_size()) {
    throw ContractError("read_token: token id " + std::to_string(token) + " out of range");
  }
  const Hypothesis* donor = nullptr;
  for (const auto& hyp : state.beam) {
    if (hyp.finished) continue;
    if (wants_write(state, hyp)) {
      throw ContractError("read_token: a live hypothesis still wants to write");
    }
    if (!donor) donor = &hyp;
  }
  if (!donor) throw ContractError("read_token: no live hypothesis");

  // Every live hypothesis has read the same input, so one encoder step
  // serves the whole beam.
  const ModelState encoded = model.encoder_append(donor->state, token);
  counters = record_step(counters, StepKind::Encoder, 1);
  for (auto& hyp : state.beam) {
    if (hyp.finished) continue;
    hyp.state = hyp.state.with_encoder_of(encoded);
    hyp.reads += 1;
    hyp.step.reset();
  }
  if (token == Vocabulary::kEos) {
    state.input_eos = true;
  } else {
    state.source_tokens_read.push_back(token);
  }
}

namespace {

TokenSeq common_prefix(const std::vector<Hypothesis>& beam) {
  if (beam.empty()) return {};
  TokenSeq prefix = beam.front().tokens;
  for (const auto& hyp : beam) {
    std::size_t n = 0;
    while (n < prefix.size() && n < hyp.tokens.size() && prefix[n] == hyp.tokens[n]) ++n;
    prefix.resize(n);
  }
  return prefix;
}

TranslationEvent make_event(const SearchState& state, const Vocabulary& vocab, EventKind kind,
                            const TokenSeq& tokens) {
  TranslationEvent ev;
  ev.kind = kind;
  ev.text = detokenize(vocab, tokens);
  ev.source_reads = static_cast<std::int64_t>(state.source_tokens_read.size());
  ev.source_words = static_cast<std::int64_t>(count_words(detokenize(vocab, state.source_tokens_read)));
  return ev;
}

}  // namespace

std::optional<TranslationEvent> emit_final(SearchState& state, const Vocabulary& vocab) {
  TokenSeq prefix = common_prefix(state.beam);
  const std::size_t done = state.emitted_final_tokens.size();
  if (prefix.size() <= done) return std::nullopt;
  TokenSeq extension(prefix.begin() + static_cast<std::ptrdiff_t>(done), prefix.end());
  state.emitted_final_tokens = std::move(prefix);
  return make_event(state, vocab, EventKind::Final, extension);
}

std::size_t best_index(const SearchState& state) {
  if (state.beam.empty()) throw ContractError("empty beam");
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.beam.size(); ++i) {
    if (score(state.beam[i]) > score(state.beam[best])) best = i;
  }
  return best;
}

TranslationEvent emit_intermediate(const SearchState& state, const Vocabulary& vocab) {
  const auto& best = state.beam[best_index(state)];
  const std::size_t done = std::min(state.emitted_final_tokens.size(), best.tokens.size());
  TokenSeq suffix(best.tokens.begin() + static_cast<std::ptrdiff_t>(done), best.tokens.end());
  return make_event(state, vocab, EventKind::Intermediate, suffix);
}

void checkpoint(SearchState& state) {
  auto snap = std::make_shared<SearchState::Snapshot>();
  snap->beam = state.beam;
  snap->emitted_final_tokens = state.emitted_final_tokens;
  snap->source_tokens_read = state.source_tokens_read;
  snap->input_eos = state.input_eos;
  snap->next_id = state.next_id;
  state.checkpoint = std::move(snap);
}

void rewind(SearchState& state) {
  if (!state.checkpoint) throw ContractError("rewind without a checkpoint");
  const auto& snap = *state.checkpoint;
  state.beam = snap.beam;
  state.emitted_final_tokens = snap.emitted_final_tokens;
  state.source_tokens_read = snap.source_tokens_read;
  state.input_eos = snap.input_eos;
  state.next_id = snap.next_id;
}

std::vector<TranslationEvent> finalize_sentence(SearchState& state, const StreamingModel& model,
                                                const Vocabulary& vocab, CostCounters& counters) {
  if (!state.input_eos) throw ContractError("finalize_sentence before input EOS");
  expand_writers(state, model, counters);

  std::vector<TranslationEvent> events;
  const std::size_t best = best_index(state);
  Hypothesis top = std::move(state.beam[best]);
  state.beam.clear();
  state.beam.push_back(std::move(top));
  if (auto ev = emit_final(state, vocab)) events.push_back(std::move(*ev));
  return events;
}

// --- session driver -----------------------------------------------------

namespace {
void strip_leading_spaces(std::string& text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  text.erase(0, start == std::string::npos ? text.size() : start);
}
}  // namespace

StreamingTranslator::StreamingTranslator(const Vocabulary& vocab, const StreamingModel& model,
                                         EngineConfig config)
    : vocab_(vocab), model_(model), config_(config), state_(SearchState::fresh(config)) {
  if (model.vocab_size() != vocab.size()) {
    throw ContractError("model and vocabulary sizes differ");
  }
  checkpoint(state_);
}

void StreamingTranslator::notify() const {
  if (observer_) observer_(state_);
}

void StreamingTranslator::push(std::vector<TranslationEvent>& out, TranslationEvent ev) {
  ev.sentence = static_cast<std::int64_t>(sentences_.size());
  if (ev.kind == EventKind::Final) final_text_ += ev.text;
  out.push_back(std::move(ev));
}

std::vector<TranslationEvent> StreamingTranslator::process_event(const AsrEvent& event) {
  if (last_seq_no_ && event.seq_no <= *last_seq_no_) {
    throw ContractError("event seq_no " + std::to_string(event.seq_no) + " is not after " +
                        std::to_string(*last_seq_no_));
  }
  last_seq_no_ = event.seq_no;

  std::vector<TranslationEvent> out;
  if (event.kind == EventKind::Intermediate) {
    speculate(pending_ + event.text, out);
    return out;
  }

  transcript_ = accumulate_final(transcript_, event);
  SourceSplit split = split_stable_prefix(pending_ + event.text);
  pending_ = std::move(split.unstable);
  consume_stable(std::move(split.stable), out);
  checkpoint(state_);
  if (pending_.empty()) {
    push(out, emit_intermediate(state_, vocab_));
  } else {
    speculate(pending_, out);
  }
  return out;
}

std::vector<TranslationEvent> StreamingTranslator::finish() {
  std::vector<TranslationEvent> out;
  if (!pending_.empty()) {
    std::string rest = std::move(pending_);
    pending_.clear();
    consume_stable(std::move(rest), out);
  }
  if (!state_.source_tokens_read.empty()) end_sentence(out);
  checkpoint(state_);
  push(out, emit_intermediate(state_, vocab_));
  return out;
}

void StreamingTranslator::consume_stable(std::string text, std::vector<TranslationEvent>& out) {
  while (true) {
    if (state_.source_tokens_read.empty()) strip_leading_spaces(text);
    if (text.empty()) return;
    const std::size_t cut = first_sentence_end(text);
    const std::string segment = cut == std::string::npos ? text : text.substr(0, cut);
    read_text(segment, true, out);
    sentence_source_ += segment;
    if (cut == std::string::npos) return;
    end_sentence(out);
    text.erase(0, cut);
  }
}

void StreamingTranslator::read_text(const std::string& text, bool emit_finals,
                                    std::vector<TranslationEvent>& out) {
  for (TokenId id : tokenize(vocab_, text).ids) {
    read_token(state_, id, model_, counters_);
    expand_writers(state_, model_, counters_);
    if (emit_finals) {
      if (auto ev = emit_final(state_, vocab_)) push(out, std::move(*ev));
    }
    notify();
  }
}

void StreamingTranslator::end_sentence(std::vector<TranslationEvent>& out) {
  read_token(state_, Vocabulary::kEos, model_, counters_);
  notify();
  for (auto& ev : finalize_sentence(state_, model_, vocab_, counters_)) push(out, std::move(ev));
  notify();

  SentenceResult result;
  result.source = std::move(sentence_source_);
  result.source_tokens = state_.source_tokens_read;
  result.output_tokens = state_.emitted_final_tokens;
  result.translation = detokenize(vocab_, result.output_tokens);
  sentences_.push_back(std::move(result));

  sentence_source_.clear();
  state_ = SearchState::fresh(config_);
  checkpoint(state_);
}

void StreamingTranslator::speculate(const std::string& text, std::vector<TranslationEvent>& out) {
  std::string input = text;
  if (state_.source_tokens_read.empty()) strip_leading_spaces(input);
  if (!state_.checkpoint) checkpoint(state_);
  read_text(input, false, out);
  push(out, emit_intermediate(state_, vocab_));
  rewind(state_);
  notify();
}

}  // namespace simulbeam
