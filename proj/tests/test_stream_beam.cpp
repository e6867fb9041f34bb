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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "simulbeam/stream_beam.hpp"

using namespace simulbeam;
using namespace simulbeam::testing;

namespace {

Hypothesis hyp(TokenSeq tokens, double sum, std::uint64_t id) {
  Hypothesis h;
  h.tokens = std::move(tokens);
  h.sum_log_prob = sum;
  h.id = id;
  return h;
}

SyntheticModelConfig model_config(std::size_t n, std::uint64_t seed, int wait_k) {
  SyntheticModelConfig c;
  c.vocab_size = n;
  c.seed = seed;
  c.wait_k = wait_k;
  return c;
}

Vocabulary data_vocab() { return Vocabulary::load_file(std::string(SIMULBEAM_DATA_DIR) + "/vocab.txt"); }

AsrEvent final_event(std::string text, std::int64_t seq) { return {EventKind::Final, std::move(text), seq, 0}; }
AsrEvent partial_event(std::string text, std::int64_t seq) {
  return {EventKind::Intermediate, std::move(text), seq, 0};
}

std::string finals_of(const std::vector<TranslationEvent>& events) {
  std::string out;
  for (const auto& ev : events) {
    if (ev.kind == EventKind::Final) out += ev.text;
  }
  return out;
}

std::string run_finals(StreamingTranslator& t, const std::vector<AsrEvent>& events) {
  std::string out;
  for (const auto& e : events) out += finals_of(t.process_event(e));
  return out + finals_of(t.finish());
}

}  // namespace

TEST_CASE("score examples") {
  CHECK(score(hyp({3, 4}, -3.0, 1)) == -1.5);
  CHECK(score(hyp({}, 0.0, 1)) == 0.0);
  CHECK(score(hyp({3, 4, 5}, -3.0, 1)) > score(hyp({3, 4}, -3.0, 2)));
  CHECK(score(hyp({3, 4, 5}, -3.0, 1)) == -1.0);
}

TEST_CASE("output cap") {
  EngineConfig c;
  c.len_a = 1.5;
  c.len_b = 5.0;
  CHECK(output_cap(c, 10) == 20);
  CHECK(output_cap(c, 3) == 9);
  c.len_a = 0.0;
  c.len_b = 0.2;
  CHECK(output_cap(c, 7) == 1);
}

TEST_CASE("engine config JSON") {
  const EngineConfig c = parse_engine_config(R"({"beam_size": 3, "write_threshold": 0.25, "len_a": 2, "len_b": 1})");
  CHECK(c.beam_size == 3);
  CHECK(c.write_threshold == 0.25);
  CHECK(c.len_a == 2.0);
  CHECK(c.len_b == 1.0);
  CHECK(parse_engine_config(to_json(c)) == c);
  CHECK(parse_engine_config("{}") == EngineConfig{});
  CHECK_THROWS_AS(parse_engine_config(R"({"beam_size": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_engine_config(R"({"write_threshold": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_engine_config("[1,"), ConfigError);
  CHECK_THROWS_AS(parse_engine_config(R"({"len_a": "x"})"), ConfigError);
  CHECK_THROWS_AS(load_engine_config("/nonexistent/engine.json"), ConfigError);
}

TEST_CASE("emit_final examples") {
  const Vocabulary vocab = letter_vocab(8);  // a=3 b=4 c=5 d=6 e=7
  SearchState s = SearchState::fresh(EngineConfig{});

  SUBCASE("singleton beam finalizes everything") {
    s.beam = {hyp({3, 4, 5}, -1.0, 1)};
    const auto ev = emit_final(s, vocab);
    REQUIRE(ev);
    CHECK(ev->kind == EventKind::Final);
    CHECK(ev->text == "abc");
    CHECK(s.emitted_final_tokens == TokenSeq{3, 4, 5});
  }

  SUBCASE("common prefix of two hypotheses") {
    s.beam = {hyp({3, 4, 5}, -1.0, 1), hyp({3, 4, 6}, -2.0, 2)};
    const auto ev = emit_final(s, vocab);
    REQUIRE(ev);
    CHECK(ev->text == "ab");
    CHECK(s.emitted_final_tokens == TokenSeq{3, 4});
    CHECK_FALSE(emit_final(s, vocab));
  }

  SUBCASE("no new prefix") {
    s.beam = {hyp({3, 4}, -1.0, 1), hyp({5}, -2.0, 2)};
    CHECK_FALSE(emit_final(s, vocab));
    CHECK(s.emitted_final_tokens.empty());
  }
}

TEST_CASE("emit_intermediate examples") {
  const Vocabulary vocab = letter_vocab(8);
  SearchState s = SearchState::fresh(EngineConfig{});

  SUBCASE("best hypothesis equals the finals") {
    s.beam = {hyp({3}, -1.0, 1)};
    s.emitted_final_tokens = {3};
    const auto ev = emit_intermediate(s, vocab);
    CHECK(ev.kind == EventKind::Intermediate);
    CHECK(ev.text.empty());
  }

  SUBCASE("suffix beyond finals") {
    s.beam = {hyp({3, 6}, -4.0, 1), hyp({3, 4, 5}, -1.5, 2)};
    s.emitted_final_tokens = {3};
    CHECK(emit_intermediate(s, vocab).text == "bc");
  }

  SUBCASE("ties go to the lowest index") {
    s.beam = {hyp({3, 4}, -2.0, 5), hyp({3, 5}, -2.0, 1)};
    CHECK(best_index(s) == 0);
    CHECK(emit_intermediate(s, vocab).text == "ab");
  }
}

TEST_CASE("checkpoint and rewind") {
  const SyntheticModel model(model_config(8, 4, 1));
  CostCounters counters;
  SearchState s = SearchState::fresh(EngineConfig{});
  s.checkpoint.reset();
  CHECK_THROWS_AS(rewind(s), ContractError);

  read_token(s, 3, model, counters);
  expand_writers(s, model, counters);
  const auto before_tokens = s.beam.front().tokens;
  const auto before_size = s.beam.size();

  checkpoint(s);
  rewind(s);
  CHECK(s.beam.size() == before_size);
  CHECK(s.beam.front().tokens == before_tokens);
  CHECK(s.source_tokens_read == TokenSeq{3});

  for (int round = 0; round < 2; ++round) {
    read_token(s, 4, model, counters);
    expand_writers(s, model, counters);
    read_token(s, 5, model, counters);
    expand_writers(s, model, counters);
    CHECK(s.source_tokens_read.size() == 3);
    rewind(s);
    CHECK(s.source_tokens_read == TokenSeq{3});
    CHECK(s.beam.size() == before_size);
    CHECK(s.beam.front().tokens == before_tokens);
    CHECK(s.beam.front().state.read_count() == 1);
  }
}

TEST_CASE("read_token") {
  const SyntheticModel model(model_config(8, 4, 2));
  CostCounters counters;
  SearchState s = SearchState::fresh(EngineConfig{});
  read_token(s, 3, model, counters);
  for (const auto& h : s.beam) CHECK(h.reads == 1);
  CHECK(counters.encoder_steps == 1);
  CHECK_THROWS_AS(read_token(s, 8, model, counters), ContractError);
  read_token(s, Vocabulary::kEos, model, counters);
  CHECK(s.input_eos);
  CHECK(s.source_tokens_read == TokenSeq{3});
  CHECK_THROWS_AS(read_token(s, 3, model, counters), ContractError);
}

TEST_CASE("wait-1 model writes once per read in steady state") {
  const SyntheticModel model(model_config(10, 12, 1));
  CostCounters counters;
  EngineConfig engine;
  engine.beam_size = 1;
  SearchState s = SearchState::fresh(engine);
  for (std::size_t r = 1; r <= 8; ++r) {
    read_token(s, static_cast<TokenId>(3 + r % 7), model, counters);
    expand_writers(s, model, counters);
    REQUIRE(s.beam.size() == 1);
    CHECK(s.beam.front().tokens.size() == r);
  }
}

TEST_CASE("beam=1 matches the greedy reference") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 4 + rng() % 13;
    const SyntheticModel model(model_config(n, rng(), static_cast<int>(rng() % 4)));
    EngineConfig engine;
    engine.beam_size = 1;
    TokenSeq input(1 + rng() % 12);
    for (auto& t : input) t = static_cast<TokenId>(2 + rng() % (n - 2));
    CostCounters counters;
    CHECK(run_engine(model, letter_vocab(n), engine, input, counters) ==
          greedy_reference(model.config(), engine, input));
  }
}

TEST_CASE("exhaustive beam matches brute-force enumeration") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    const std::size_t n = 4 + rng() % 2;
    SyntheticModelConfig mc = model_config(n, rng(), static_cast<int>(rng() % 3));
    const SyntheticModel model(mc);
    EngineConfig engine;
    engine.beam_size = 100000;
    engine.len_a = 1.0;
    engine.len_b = 2.0;
    TokenSeq input(1 + rng() % 3);
    for (auto& t : input) t = static_cast<TokenId>(3 + rng() % (n - 3));
    CostCounters counters;
    const TokenSeq got = run_engine(model, letter_vocab(n), engine, input, counters);
    const ExhaustiveResult oracle = exhaustive_streaming(mc, engine, input);
    REQUIRE_FALSE(oracle.best.empty());
    CHECK(std::find(oracle.best.begin(), oracle.best.end(), got) != oracle.best.end());
  }
}

TEST_CASE("finalize requires input EOS and forces writes to the cap") {
  SyntheticModelConfig mc = model_config(9, 31, 3);
  mc.emit_eos = false;
  const SyntheticModel model(mc);
  const Vocabulary vocab = letter_vocab(9);
  EngineConfig engine;
  engine.beam_size = 3;
  CostCounters counters;

  SearchState s = SearchState::fresh(engine);
  CHECK_THROWS_AS(finalize_sentence(s, model, vocab, counters), ContractError);

  for (std::size_t x : {1u, 4u, 10u}) {
    TokenSeq input(x, 5);
    const TokenSeq out = run_engine(model, vocab, engine, input, counters);
    CHECK(out.size() == output_cap(engine, x));
    CHECK(std::count(out.begin(), out.end(), Vocabulary::kEos) == 0);
  }
  CHECK(run_engine(model, vocab, engine, TokenSeq(10, 4), counters).size() == 20);
}

TEST_CASE("no output EOS before input EOS; reads stay synchronized") {
  const Vocabulary vocab = text_vocab();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    SyntheticModelConfig mc = model_config(vocab.size(), rng(), static_cast<int>(rng() % 3));
    mc.eos_boost = 6.0;
    const SyntheticModel model(mc);
    EngineConfig engine;
    engine.beam_size = 1 + rng() % 4;
    StreamingTranslator t(vocab, model, engine);
    std::size_t violations = 0;
    t.set_step_observer([&](const SearchState& s) {
      std::optional<std::size_t> reads;
      for (const auto& h : s.beam) {
        if (!s.input_eos && std::count(h.tokens.begin(), h.tokens.end(), Vocabulary::kEos) > 0) ++violations;
        if (h.finished) continue;
        if (reads && *reads != h.reads) ++violations;
        reads = h.reads;
        const auto& fin = s.emitted_final_tokens;
        if (fin.size() > h.tokens.size() || !std::equal(fin.begin(), fin.end(), h.tokens.begin())) {
          ++violations;
        }
      }
    });
    run_finals(t, {final_event(random_sentence(rng, 2, 6) + " ", 0)});
    CHECK(violations == 0);
  }
}

TEST_CASE("split finals match a single final") {
  const Vocabulary vocab = data_vocab();
  SyntheticModelConfig mc = model_config(vocab.size(), 0, 1);
  const SyntheticModel model(mc);
  EngineConfig engine;
  engine.beam_size = 1;

  StreamingTranslator split(vocab, model, engine);
  StreamingTranslator whole(vocab, model, engine);
  const std::string a = run_finals(split, {final_event("hola ", 0), final_event("mundo.", 1)});
  const std::string b = run_finals(whole, {final_event("hola mundo.", 0)});
  CHECK(a == b);
  CHECK_FALSE(a.empty());
  REQUIRE(split.sentences().size() == 1);
  CHECK(split.sentences()[0].source_tokens == whole.sentences()[0].source_tokens);
  CHECK(split.sentences()[0].source == "hola mundo.");
}

TEST_CASE("an intermediate before a final does not change the finals") {
  const Vocabulary vocab = data_vocab();
  const SyntheticModel model(model_config(vocab.size(), 5, 1));
  for (std::size_t k : {1u, 3u}) {
    EngineConfig engine;
    engine.beam_size = k;
    StreamingTranslator with(vocab, model, engine);
    StreamingTranslator without(vocab, model, engine);
    const auto partial = with.process_event(partial_event("mund", 0));
    REQUIRE(partial.size() == 1);
    CHECK(partial[0].kind == EventKind::Intermediate);
    CHECK(finals_of(partial).empty());
    CHECK(run_finals(with, {final_event("mundo.", 1)}) == run_finals(without, {final_event("mundo.", 0)}));
    CHECK(with.counters().encoder_steps > without.counters().encoder_steps);
  }
}

TEST_CASE("a word split across finals is tokenized once") {
  const Vocabulary vocab = data_vocab();
  const SyntheticModel model(model_config(vocab.size(), 9, 1));
  EngineConfig engine;
  engine.beam_size = 2;
  StreamingTranslator split(vocab, model, engine);
  StreamingTranslator whole(vocab, model, engine);
  const std::string a = run_finals(split, {final_event("car", 0), final_event("pet ", 1)});
  const std::string b = run_finals(whole, {final_event("carpet ", 0)});
  CHECK(a == b);
  const TokenId carpet = *vocab.find("carpet");
  REQUIRE(split.sentences().size() == 1);
  CHECK(split.sentences()[0].source_tokens == TokenSeq{carpet, *vocab.find(" ")});
  CHECK(split.sentences()[0].source_tokens == whole.sentences()[0].source_tokens);
}

TEST_CASE("finals precede the trailing intermediate of a step") {
  const Vocabulary vocab = data_vocab();
  const SyntheticModel model(model_config(vocab.size(), 1, 1));
  StreamingTranslator t(vocab, model, EngineConfig{});
  const auto events = t.process_event(final_event("the market is open. hello ", 0));
  REQUIRE_FALSE(events.empty());
  CHECK(events.back().kind == EventKind::Intermediate);
  for (std::size_t i = 0; i + 1 < events.size(); ++i) CHECK(events[i].kind == EventKind::Final);
  CHECK(t.sentences().size() == 1);
  CHECK(events.front().sentence == 0);
  CHECK(events.back().sentence == 1);
}

TEST_CASE("events must arrive in order") {
  const Vocabulary vocab = data_vocab();
  const SyntheticModel model(model_config(vocab.size(), 1, 1));
  StreamingTranslator t(vocab, model, EngineConfig{});
  t.process_event(final_event("hola ", 4));
  CHECK_THROWS_AS(t.process_event(final_event("mundo", 4)), ContractError);
  CHECK_THROWS_AS(t.process_event(partial_event("mundo", 2)), ContractError);
  const SyntheticModel small(model_config(8, 1, 1));
  CHECK_THROWS_AS(StreamingTranslator(vocab, small, EngineConfig{}), ContractError);
}

TEST_CASE("k=1 streaming cost is linear in the input") {
  const Vocabulary vocab = text_vocab();
  const SyntheticModel model(model_config(vocab.size(), 3, 1));
  EngineConfig engine;
  engine.beam_size = 1;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    StreamingTranslator t(vocab, model, engine);
    const std::string sentence = random_sentence(rng, 3, 12);
    std::int64_t seq = 0;
    std::size_t start = 0;
    while (start < sentence.size()) {
      std::size_t end = sentence.find(' ', start);
      end = end == std::string::npos ? sentence.size() : end + 1;
      t.process_event(final_event(sentence.substr(start, end - start), seq++));
      start = end;
    }
    t.finish();
    REQUIRE(t.sentences().size() == 1);
    const auto tokens = static_cast<double>(t.sentences()[0].source_tokens.size());
    // The extra read is the sentence EOS.
    CHECK(t.counters().encoder_steps == static_cast<std::int64_t>(tokens) + 1);
    CHECK(static_cast<double>(t.counters().decoder_steps) <= (engine.len_a + 1.0) * (tokens + 1));
  }
}
