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

#include "transportkit/tokenizer.h"

#include "transportkit/error.h"
#include "transportkit/hash.h"
#include "transportkit/utf8.h"

namespace transportkit {

void TokenizerConfig::Validate() const {
  if (ngram_order < 1) {
    throw UsageError("tokenizer ngram_order must be >= 1, got " +
                     std::to_string(ngram_order));
  }
}

std::string TokenizerConfig::Hash() const {
  nlohmann::json j = *this;
  return HashToHex(Fnv1a64(j.dump()));
}

std::string_view ToString(SplitMode mode) {
  return mode == SplitMode::kWhitespace ? "whitespace" : "unicode_word";
}

SplitMode ParseSplitMode(std::string_view name) {
  if (name == "whitespace") return SplitMode::kWhitespace;
  if (name == "unicode_word") return SplitMode::kUnicodeWord;
  throw UsageError("unknown split_mode '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const TokenizerConfig& config) {
  j = nlohmann::json{{"lowercase", config.lowercase},
                     {"ngram_order", config.ngram_order},
                     {"split_mode", ToString(config.split_mode)},
                     {"strip_punctuation", config.strip_punctuation}};
}

void from_json(const nlohmann::json& j, TokenizerConfig& config) {
  TokenizerConfig out;
  out.lowercase = j.value("lowercase", out.lowercase);
  out.ngram_order = j.value("ngram_order", out.ngram_order);
  out.strip_punctuation = j.value("strip_punctuation", out.strip_punctuation);
  if (j.contains("split_mode")) {
    out.split_mode = ParseSplitMode(j.at("split_mode").get<std::string>());
  }
  out.Validate();
  config = out;
}

std::vector<std::string> Tokenize(std::string_view text,
                                  const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = utf8::Next(text, pos);
    if (utf8::IsSpace(cp)) {
      flush();
      continue;
    }
    if (config.lowercase) cp = utf8::ToLower(cp);
    if (utf8::IsPunctuation(cp)) {
      if (config.split_mode == SplitMode::kUnicodeWord) {
        flush();
        if (!config.strip_punctuation) {
          utf8::Append(current, cp);
          flush();
        }
        continue;
      }
      if (config.strip_punctuation) continue;
    }
    utf8::Append(current, cp);
  }
  flush();
  return tokens;
}

}  // namespace transportkit
