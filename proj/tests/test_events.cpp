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

#include <random>
#include <sstream>

#include "doctest.h"
#include "simulbeam/events.hpp"
#include "simulbeam/utf8.hpp"

using namespace simulbeam;

namespace {

AsrEvent final_event(std::string text, std::int64_t seq = 0) {
  return AsrEvent{EventKind::Final, std::move(text), seq, 0};
}

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  static const std::vector<std::string> pieces = {"a", "b", "c", "ñ", "é", " ", ".", ",", "?", "¿",
                                                  "'", "(", "x", "y", "ü", "!"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string out;
  for (std::size_t n = len(rng); n > 0; --n) out += pieces[pick(rng)];
  return out;
}

}  // namespace

TEST_CASE("split_stable_prefix keeps a trailing word fragment unstable") {
  const auto split = split_stable_prefix("the car");
  CHECK(split.stable == "the ");
  CHECK(split.unstable == "car");
}

TEST_CASE("split_stable_prefix edge cases") {
  auto empty = split_stable_prefix("");
  CHECK(empty.stable.empty());
  CHECK(empty.unstable.empty());

  auto whole = split_stable_prefix("hello world. ");
  CHECK(whole.stable == "hello world. ");
  CHECK(whole.unstable.empty());

  auto word = split_stable_prefix("carpet");
  CHECK(word.stable.empty());
  CHECK(word.unstable == "carpet");

  // Multi-byte boundary and word characters.
  auto unicode = split_stable_prefix("¿qué tal");
  CHECK(unicode.stable == "¿qué ");
  CHECK(unicode.unstable == "tal");
}

TEST_CASE("split_stable_prefix properties on random text") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const std::string t = random_text(rng, 12);
    const auto split = split_stable_prefix(t);
    REQUIRE(split.stable + split.unstable == t);
    const auto stable_cps = utf8::decode(split.stable);
    if (!stable_cps.empty()) CHECK(is_word_boundary(stable_cps.back()));
    for (char32_t cp : utf8::decode(split.unstable)) CHECK_FALSE(is_word_boundary(cp));

    // Appending text never shrinks the stable prefix.
    const std::string u = random_text(rng, 8);
    if (!t.empty()) {
      const auto longer = split_stable_prefix(t + " " + u);
      CHECK(longer.stable.rfind(t + " ", 0) == 0);
    }
  }
}

TEST_CASE("accumulate_final concatenates finals") {
  CHECK(accumulate_final("carpet", final_event(" sale")) == "carpet sale");
  CHECK(accumulate_final("", final_event("car")) == "car");
  CHECK(accumulate_final("car", final_event("pet")) == "carpet");
  CHECK_THROWS_AS(accumulate_final("x", AsrEvent{EventKind::Intermediate, "y", 0, 0}), ContractError);
}

TEST_CASE("accumulate_final folds like one concatenation") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    std::string folded;
    std::string joined;
    for (int k = 0; k < 5; ++k) {
      const std::string piece = random_text(rng, 6);
      folded = accumulate_final(folded, final_event(piece));
      joined += piece;
    }
    CHECK(folded == joined);
  }
}

TEST_CASE("detect_sentence_end") {
  CHECK(detect_sentence_end("hola mundo."));
  CHECK_FALSE(detect_sentence_end("hola mundo"));
  CHECK(detect_sentence_end("¿qué? "));
  CHECK(detect_sentence_end("wow!"));
  CHECK_FALSE(detect_sentence_end(""));
  CHECK_FALSE(detect_sentence_end("   "));
  CHECK_FALSE(detect_sentence_end("a, b;"));
}

TEST_CASE("first_sentence_end and word counting") {
  CHECK(first_sentence_end("ab. cd") == 3);
  CHECK(first_sentence_end("no end") == std::string_view::npos);
  CHECK(count_words("  hola   mundo. ") == 2);
  CHECK(count_words("") == 0);
  CHECK(split_words("a  b\tc") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("event log JSONL round trip") {
  const std::vector<AsrEvent> events = {
      {EventKind::Intermediate, "hol", 0, 10},
      {EventKind::Final, "hola \"mundo\"", 1, 25},
      {EventKind::Final, "¿qué?", 2, 0},
  };
  std::stringstream buf;
  write_event_log(buf, events);
  CHECK(read_event_log(buf) == events);
  CHECK(to_jsonl(events[0]) == R"({"kind":"intermediate","text":"hol","seq_no":0,"timestamp_ms":10})");
}

TEST_CASE("event log defaults and errors") {
  CHECK(asr_event_from_json(R"({"kind":"final","text":"x","seq_no":3})").timestamp_ms == 0);
  CHECK_THROWS_AS(asr_event_from_json(R"({"kind":"maybe","text":"x","seq_no":3})"), InputError);
  CHECK_THROWS_AS(asr_event_from_json(R"({"kind":"final","seq_no":3})"), InputError);
  CHECK_THROWS_AS(asr_event_from_json(R"({"kind":"final","text":"x","seq_no":"3"})"), InputError);
  CHECK_THROWS_AS(asr_event_from_json(R"({"kind":"final","text":"x","seq_no":1,"timestamp_ms":-4})"),
                  InputError);

  std::stringstream bad;
  bad << R"({"kind":"final","text":"ok ","seq_no":0})" << "\n\n" << R"({"kind": "final", "text": )" << "\n";
  try {
    read_event_log(bad);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("utf8 decode rejects malformed input") {
  CHECK_THROWS_AS(utf8::decode("\xC3"), InputError);
  CHECK_THROWS_AS(utf8::decode("\xFF"), InputError);
  CHECK_THROWS_AS(utf8::decode("\xC0\x80"), InputError);  // overlong
  CHECK(utf8::encode(utf8::decode("añ€😀")) == "añ€😀");
}
