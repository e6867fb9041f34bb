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

#include "simulbeam/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace simulbeam {

ModelState NonStreamingModel::encode(const TokenSeq& input, CostCounters& counters) const {
  ModelState state;
  for (TokenId t : input) state = model_.encoder_append(state, t);
  state = model_.encoder_append(state, Vocabulary::kEos);
  counters = record_step(counters, StepKind::Encoder, input.size() + 1);
  return state;
}

std::vector<StepResult> NonStreamingModel::decode_batch(std::span<const ModelState> states,
                                                        std::span<const TokenId> last_outputs,
                                                        CostCounters& counters) const {
  auto out = model_.decoder_step_batched(states, last_outputs);
  counters = record_step(counters, StepKind::Decoder, states.size());
  return out;
}

namespace {

struct Entry {
  TokenSeq tokens;
  double sum_log_prob = 0.0;
  ModelState state;
  std::uint64_t id = 0;

  double score() const {
    return sum_log_prob / static_cast<double>(std::max<std::size_t>(1, tokens.size()));
  }
};

bool better(const Entry& a, const Entry& b) {
  const double sa = a.score();
  const double sb = b.score();
  return sa != sb ? sa > sb : a.id < b.id;
}

}  // namespace

TokenSeq beam_search_full(const NonStreamingModel& model, const TokenSeq& input, std::size_t k,
                          std::size_t cap, CostCounters& counters) {
  if (input.empty()) throw ContractError("beam_search_full: empty input");
  if (k < 1) throw ContractError("beam_search_full: k must be >= 1");
  if (cap < 1) throw ContractError("beam_search_full: cap must be >= 1");

  std::uint64_t next_id = 1;
  std::vector<Entry> live(1);
  live[0].state = model.encode(input, counters);
  live[0].id = next_id++;
  std::vector<Entry> finished;

  while (!live.empty() && finished.size() < k) {
    std::vector<ModelState> states;
    std::vector<TokenId> last;
    for (const auto& e : live) {
      states.push_back(e.state);
      last.push_back(e.tokens.empty() ? Vocabulary::kBos : e.tokens.back());
    }
    const auto steps = model.decode_batch(states, last, counters);

    std::vector<Entry> candidates;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const auto& lp = steps[i].output.log_probs;
      for (std::size_t v = 0; v < lp.size(); ++v) {
        if (static_cast<TokenId>(v) == Vocabulary::kBos || !std::isfinite(lp[v])) continue;
        Entry child;
        child.tokens = live[i].tokens;
        child.tokens.push_back(static_cast<TokenId>(v));
        child.sum_log_prob = live[i].sum_log_prob + lp[v];
        child.state = steps[i].state;
        child.id = next_id++;
        candidates.push_back(std::move(child));
      }
    }
    const std::size_t keep = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), better);
    candidates.resize(keep);

    live.clear();
    for (auto& c : candidates) {
      if (c.tokens.back() == Vocabulary::kEos || c.tokens.size() >= cap) {
        finished.push_back(std::move(c));
      } else {
        live.push_back(std::move(c));
      }
    }
  }
  const auto best = std::min_element(finished.begin(), finished.end(), better);
  return best->tokens;
}

// --- retranslation driver ----------------------------------------------

namespace {
void strip_leading_spaces(std::string& text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  text.erase(0, start == std::string::npos ? text.size() : start);
}
}  // namespace

RetranslationSession::RetranslationSession(const Vocabulary& vocab, const StreamingModel& model,
                                           EngineConfig config)
    : vocab_(vocab), model_(model), config_(config) {
  validate(config_);
  if (model.vocab_size() != vocab.size()) throw ContractError("model and vocabulary sizes differ");
}

std::string RetranslationSession::translate(const std::string& source, TokenSeq* source_tokens,
                                            TokenSeq* output) {
  TokenSeq input = tokenize(vocab_, source).ids;
  if (input.empty()) return {};
  ++decodes_;
  TokenSeq result = beam_search_full(model_, input, config_.beam_size,
                                     output_cap(config_, input.size()), counters_);
  std::string text = detokenize(vocab_, result);
  if (source_tokens) *source_tokens = std::move(input);
  if (output) *output = std::move(result);
  return text;
}

TranslationEvent RetranslationSession::make(EventKind kind, std::string text,
                                            const std::string& source) const {
  TranslationEvent ev;
  ev.kind = kind;
  ev.text = std::move(text);
  ev.source_reads = static_cast<std::int64_t>(tokenize(vocab_, source).ids.size());
  ev.source_words = static_cast<std::int64_t>(count_words(source));
  ev.sentence = static_cast<std::int64_t>(sentences_.size());
  return ev;
}

void RetranslationSession::complete_sentence(const std::string& source,
                                             std::vector<TranslationEvent>& out) {
  SentenceResult result;
  result.source = source;
  result.translation = translate(source, &result.source_tokens, &result.output_tokens);
  out.push_back(make(EventKind::Final, result.translation, source));
  sentences_.push_back(std::move(result));
}

std::vector<TranslationEvent> RetranslationSession::process_event(const AsrEvent& event) {
  if (last_seq_no_ && event.seq_no <= *last_seq_no_) {
    throw ContractError("event seq_no " + std::to_string(event.seq_no) + " is not after " +
                        std::to_string(*last_seq_no_));
  }
  last_seq_no_ = event.seq_no;

  std::vector<TranslationEvent> out;
  std::string prefix;
  if (event.kind == EventKind::Final) {
    sentence_ += event.text;
    while (true) {
      strip_leading_spaces(sentence_);
      const std::size_t cut = first_sentence_end(sentence_);
      if (cut == std::string::npos) break;
      complete_sentence(sentence_.substr(0, cut), out);
      sentence_.erase(0, cut);
    }
    prefix = sentence_;
  } else {
    prefix = sentence_ + event.text;
    strip_leading_spaces(prefix);
  }
  out.push_back(make(EventKind::Intermediate, translate(prefix, nullptr, nullptr), prefix));
  return out;
}

std::vector<TranslationEvent> RetranslationSession::finish() {
  std::vector<TranslationEvent> out;
  strip_leading_spaces(sentence_);
  if (!sentence_.empty() && !tokenize(vocab_, sentence_).ids.empty()) {
    complete_sentence(sentence_, out);
  }
  sentence_.clear();
  out.push_back(make(EventKind::Intermediate, {}, {}));
  return out;
}

}  // namespace simulbeam
