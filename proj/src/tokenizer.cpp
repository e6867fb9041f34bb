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

#include "simulbeam/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "simulbeam/events.hpp"
#include "simulbeam/utf8.hpp"

namespace simulbeam {

Vocabulary::Vocabulary(std::vector<std::string> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 3) {
    throw InputError("vocabulary needs the three reserved entries BOS, EOS, UNK");
  }
  for (std::size_t id = 3; id < entries_.size(); ++id) {
    const std::u32string cps = utf8::decode(entries_[id]);
    if (cps.empty()) {
      throw InputError("vocabulary entry " + std::to_string(id) + " is empty");
    }
    if (cps.size() > 1) {
      for (char32_t cp : cps) {
        if (is_word_boundary(cp)) {
          throw InputError("vocabulary entry " + std::to_string(id) +
                           " contains a word-boundary character");
        }
      }
    }
    if (!lookup_.emplace(cps, static_cast<TokenId>(id)).second) {
      throw InputError("duplicate vocabulary entry '" + entries_[id] + "'");
    }
    max_chars_ = std::max(max_chars_, cps.size());
  }
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    entries.push_back(line);
  }
  return Vocabulary(std::move(entries));
}

Vocabulary Vocabulary::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open vocabulary file " + path);
  return load(in);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> entries{"<s>", "</s>", "<unk>"};
  entries.insert(entries.end(), tokens.begin(), tokens.end());
  return Vocabulary(std::move(entries));
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entries_.size()) {
    throw ContractError("token id " + std::to_string(id) + " out of range");
  }
  return entries_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::find(std::string_view text) const {
  return find(utf8::decode(text));
}

std::optional<TokenId> Vocabulary::find(const std::u32string& codepoints) const {
  auto it = lookup_.find(codepoints);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& e : entries_) out << e << '\n';
}

Tokenized tokenize(const Vocabulary& vocab, std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  Tokenized out;
  out.ids.reserve(cps.size());
  auto emit_single = [&](char32_t cp) {
    if (auto id = vocab.find(std::u32string(1, cp))) {
      out.ids.push_back(*id);
    } else {
      out.ids.push_back(Vocabulary::kUnk);
      out.has_unk = true;
    }
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_word_boundary(cps[i])) {
      emit_single(cps[i]);
      ++i;
      continue;
    }
    std::size_t word_end = i;
    while (word_end < cps.size() && !is_word_boundary(cps[word_end])) ++word_end;
    while (i < word_end) {
      bool matched = false;
      const std::size_t longest = std::min(vocab.max_token_chars(), word_end - i);
      for (std::size_t len = longest; len > 1; --len) {
        if (auto id = vocab.find(cps.substr(i, len))) {
          out.ids.push_back(*id);
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched) {
        emit_single(cps[i]);
        ++i;
      }
    }
  }
  return out;
}

std::string detokenize(const Vocabulary& vocab, const TokenSeq& seq) {
  std::string out;
  for (TokenId id : seq) {
    const std::string& piece = vocab.token(id);
    if (id == Vocabulary::kBos || id == Vocabulary::kEos) continue;
    out += piece;
  }
  return out;
}

}  // namespace simulbeam
