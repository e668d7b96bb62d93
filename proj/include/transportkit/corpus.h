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

#ifndef TRANSPORTKIT_CORPUS_H_
#define TRANSPORTKIT_CORPUS_H_

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "transportkit/tokenizer.h"

namespace transportkit {

struct Document {
  std::vector<std::string> tokens;
  // Character (code point) count of the source text.
  std::size_t raw_length = 0;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Provenance {
  std::string source_path;
  // "conll", "jsonl", "plaintext" or "interchange".
  std::string format;
  std::string tokenizer_hash;
  // Records skipped during parsing (JSON-lines without any named field).
  std::size_t skipped_records = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// An immutable tokenized document collection tagged with its domain.
class Corpus {
 public:
  // Drops documents without tokens. Throws a data error "empty corpus" when
  // nothing remains and a usage error if any token is empty.
  Corpus(std::string domain_id, std::vector<Document> documents,
         TokenizerConfig tokenizer, Provenance provenance);

  const std::string& domain_id() const { return domain_id_; }
  const std::vector<Document>& documents() const { return documents_; }
  const TokenizerConfig& tokenizer() const { return tokenizer_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t token_count() const { return token_count_; }

 private:
  std::string domain_id_;
  std::vector<Document> documents_;
  TokenizerConfig tokenizer_;
  Provenance provenance_;
  std::size_t token_count_ = 0;
};

// Where a byte stream came from; only used for provenance and messages.
struct SourceInfo {
  std::string domain_id;
  std::string path;
};

// Column files: first column is the token, blank lines separate sentences,
// "-DOCSTART-" opens a new document.
Corpus ParseConll(std::istream& input, const TokenizerConfig& config,
                  const SourceInfo& source);

// Default JSON-lines fields: SNLI/MultiNLI/SciTail style sentence pairs.
const std::vector<std::string>& DefaultPairFields();

// One document per JSON line; the named string fields are tokenized and
// concatenated in the order given.
Corpus ParseJsonlPairs(std::istream& input,
                       const std::vector<std::string>& fields,
                       const TokenizerConfig& config,
                       const SourceInfo& source);

enum class PlaintextUnit { kLine, kParagraph };

Corpus ParsePlaintext(std::istream& input, const TokenizerConfig& config,
                      const SourceInfo& source,
                      PlaintextUnit unit = PlaintextUnit::kLine);

// Interchange format:
//   {"domain_id": ..., "tokenizer_config": {...}, "provenance": {...},
//    "documents": [[token, ...], ...], "raw_lengths": [...]}
nlohmann::ordered_json CorpusToJson(const Corpus& corpus);
Corpus CorpusFromJson(const nlohmann::json& j);

}  // namespace transportkit

#endif  // TRANSPORTKIT_CORPUS_H_
