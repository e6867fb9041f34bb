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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simulbeam/types.hpp"

namespace simulbeam {

// Fixed token inventory. Ids are dense line numbers; ids 0, 1, 2 are BOS,
// EOS and UNK. Multi-character entries never contain a word-boundary
// character, so tokenization cannot reach across a word boundary.
class Vocabulary {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kUnk = 2;

  // `entries` includes the three reserved leading entries.
  explicit Vocabulary(std::vector<std::string> entries);

  // One token per line, line number = id.
  static Vocabulary load(std::istream& in);
  static Vocabulary load_file(const std::string& path);

  // Reserved entries followed by `tokens`.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::size_t size() const { return entries_.size(); }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> find(std::string_view text) const;
  std::optional<TokenId> find(const std::u32string& codepoints) const;
  bool is_special(TokenId id) const { return id >= 0 && id <= kUnk; }
  std::size_t max_token_chars() const { return max_chars_; }
  const std::vector<std::string>& entries() const { return entries_; }

  void save(std::ostream& out) const;

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::u32string, TokenId> lookup_;
  std::size_t max_chars_ = 1;
};

struct Tokenized {
  TokenSeq ids;
  // Set when a character outside the alphabet mapped to UNK; the
  // round-trip guarantee does not hold for such inputs.
  bool has_unk = false;
};

// Greedy longest match inside each word; boundary characters become
// single-character tokens.
Tokenized tokenize(const Vocabulary& vocab, std::string_view text);

// BOS and EOS render as nothing, UNK as its vocabulary entry.
std::string detokenize(const Vocabulary& vocab, const TokenSeq& seq);

}  // namespace simulbeam
