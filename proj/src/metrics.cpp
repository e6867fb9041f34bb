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

#include "simulbeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "simulbeam/events.hpp"
#include "simulbeam/utf8.hpp"

namespace simulbeam {

CostCounters record_step(CostCounters counters, StepKind kind, std::size_t batch_size) {
  const auto n = static_cast<std::int64_t>(batch_size);
  if (kind == StepKind::Decoder) {
    counters.decoder_steps += n;
    counters.batched_calls += 1;
  } else {
    counters.encoder_steps += n;
  }
  return counters;
}

// --- BLEU ---------------------------------------------------------------

namespace {

constexpr int kMaxOrder = 4;
constexpr double kZeroPrecision = 1e-9;

using NgramCounts = std::map<WordSeq, std::int64_t>;

NgramCounts count_ngrams(const WordSeq& words, std::size_t order) {
  NgramCounts counts;
  if (words.size() < order) return counts;
  for (std::size_t i = 0; i + order <= words.size(); ++i) {
    counts[WordSeq(words.begin() + static_cast<std::ptrdiff_t>(i),
                   words.begin() + static_cast<std::ptrdiff_t>(i + order))] += 1;
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<WordSeq>& references, const std::vector<WordSeq>& hypotheses) {
  if (references.empty()) throw ContractError("bleu: empty corpus");
  if (references.size() != hypotheses.size()) {
    throw ContractError("bleu: reference and hypothesis counts differ");
  }
  std::int64_t matches[kMaxOrder] = {};
  std::int64_t totals[kMaxOrder] = {};
  std::int64_t ref_len = 0;
  std::int64_t hyp_len = 0;
  for (std::size_t s = 0; s < references.size(); ++s) {
    const WordSeq& ref = references[s];
    const WordSeq& hyp = hypotheses[s];
    ref_len += static_cast<std::int64_t>(ref.size());
    hyp_len += static_cast<std::int64_t>(hyp.size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      const NgramCounts ref_counts = count_ngrams(ref, static_cast<std::size_t>(n));
      for (const auto& [gram, count] : count_ngrams(hyp, static_cast<std::size_t>(n))) {
        totals[n - 1] += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (hyp_len == 0 || matches[0] == 0) return 0.0;

  // Orders longer than every hypothesis have no n-grams at all and are left
  // out of the geometric mean, so a corpus of short segments can still
  // score 100 against itself.
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (totals[n] == 0) continue;
    const double p = matches[n] == 0 ? kZeroPrecision
                                     : static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    log_sum += std::log(p);
    ++orders;
  }
  const double brevity =
      hyp_len >= ref_len ? 1.0
                         : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return 100.0 * brevity * std::exp(log_sum / orders);
}

// --- latency ------------------------------------------------------------

double average_lag(const LagTrace& trace) {
  if (trace.source_len == 0) throw ContractError("average_lag: source_len is 0");
  if (trace.target_len == 0) throw ContractError("average_lag: target_len is 0");
  if (trace.delays.size() != trace.target_len) {
    throw ContractError("average_lag: one delay per target word expected");
  }
  const double source_len = static_cast<double>(trace.source_len);
  const double gamma = static_cast<double>(trace.target_len) / source_len;
  std::size_t tau = trace.target_len;
  for (std::size_t t = 0; t < trace.delays.size(); ++t) {
    if (trace.delays[t] >= source_len) {
      tau = t + 1;
      break;
    }
  }
  double sum = 0.0;
  for (std::size_t t = 1; t <= tau; ++t) {
    sum += trace.delays[t - 1] - static_cast<double>(t - 1) / gamma;
  }
  return sum / static_cast<double>(tau);
}

LagTrace build_lag_trace(const std::vector<TimedText>& finals, std::size_t source_len) {
  LagTrace trace;
  trace.source_len = source_len;
  bool in_word = false;
  std::size_t last_delay = 0;
  for (const auto& chunk : finals) {
    for (char32_t cp : utf8::decode(chunk.text)) {
      if (is_space(cp)) {
        if (in_word) trace.delays.push_back(static_cast<double>(std::min(last_delay, source_len)));
        in_word = false;
      } else {
        in_word = true;
        last_delay = chunk.source_words;
      }
    }
  }
  if (in_word) trace.delays.push_back(static_cast<double>(std::min(last_delay, source_len)));
  trace.target_len = trace.delays.size();
  return trace;
}

// --- flicker ------------------------------------------------------------

double char_flicker(const DisplayTrace& trace) {
  if (trace.states.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t writes = 0;
  std::u32string previous = utf8::decode(trace.states.front());
  for (std::size_t i = 1; i < trace.states.size(); ++i) {
    std::u32string current = utf8::decode(trace.states[i]);
    if (!previous.empty()) {
      const auto mismatch = std::mismatch(previous.begin(), previous.end(), current.begin(), current.end());
      const auto lcp = static_cast<double>(mismatch.first - previous.begin());
      const auto len = static_cast<double>(previous.size());
      total += 100.0 * (len - lcp) / len;
      ++writes;
    }
    previous = std::move(current);
  }
  return writes == 0 ? 0.0 : total / static_cast<double>(writes);
}

// --- reports ------------------------------------------------------------

namespace {
nlohmann::ordered_json counters_json(const CostCounters& c) {
  nlohmann::ordered_json j;
  j["decoder_steps"] = c.decoder_steps;
  j["encoder_steps"] = c.encoder_steps;
  j["batched_calls"] = c.batched_calls;
  j["wall_clock_ms"] = c.wall_clock_ms;
  return j;
}
}  // namespace

std::string to_json(const CostCounters& counters) { return counters_json(counters).dump(); }

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  if (report.bleu) {
    j["bleu"] = *report.bleu;
  } else {
    j["bleu"] = nullptr;
  }
  j["average_lag"] = report.average_lag;
  j["char_flicker_pct"] = report.char_flicker_pct;
  j["counters"] = counters_json(report.counters);
  return j.dump(2);
}

}  // namespace simulbeam
