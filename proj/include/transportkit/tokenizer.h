// Copyright 2026 The transportkit Authors.
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

#ifndef TRANSPORTKIT_TOKENIZER_H_
#define TRANSPORTKIT_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace transportkit {

enum class SplitMode {
  // Split on whitespace only.
  kWhitespace,
  // Split on whitespace and around every punctuation code point.
  kUnicodeWord,
};

struct TokenizerConfig {
  bool lowercase = true;
  SplitMode split_mode = SplitMode::kUnicodeWord;
  int ngram_order = 1;
  bool strip_punctuation = true;

  // Throws a usage error when ngram_order < 1.
  void Validate() const;

  // Hex hash of the canonical serialization. Changes whenever any option
  // changes.
  std::string Hash() const;

  friend bool operator==(const TokenizerConfig&,
                         const TokenizerConfig&) = default;
};

void to_json(nlohmann::json& j, const TokenizerConfig& config);
void from_json(const nlohmann::json& j, TokenizerConfig& config);

std::string_view ToString(SplitMode mode);
SplitMode ParseSplitMode(std::string_view name);

// Tokenizes well-formed UTF-8 text. Never yields empty tokens.
std::vector<std::string> Tokenize(std::string_view text,
                                  const TokenizerConfig& config);

}  // namespace transportkit

#endif  // TRANSPORTKIT_TOKENIZER_H_
