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

#include "transportkit/corpus.h"

#include <iterator>
#include <sstream>

#include "transportkit/error.h"
#include "transportkit/utf8.h"

namespace transportkit {

namespace {

std::string Where(const SourceInfo& source) {
  return source.path.empty() ? source.domain_id : source.path;
}

std::string ReadValidated(std::istream& input, const SourceInfo& source) {
  std::string bytes{std::istreambuf_iterator<char>(input),
                    std::istreambuf_iterator<char>()};
  if (auto bad = utf8::FindInvalid(bytes)) {
    throw DataError(Where(source) + ": invalid UTF-8 at byte offset " +
                    std::to_string(*bad));
  }
  return bytes;
}

std::vector<std::string_view> SplitLines(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == bytes.size()) break;
    start = end + 1;
  }
  return lines;
}

bool IsAsciiSpace(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\v' || ch == '\f' || ch == '\r';
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsAsciiSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsAsciiSpace(s.back())) s.remove_suffix(1);
  return s;
}

bool IsBlank(std::string_view line) {
  std::size_t pos = 0;
  while (pos < line.size()) {
    if (!utf8::IsSpace(utf8::Next(line, pos))) return false;
  }
  return true;
}

void AppendText(Document& doc, std::string_view text,
                const TokenizerConfig& config) {
  if (doc.raw_length > 0) ++doc.raw_length;
  doc.raw_length += utf8::CodePointCount(text);
  for (auto& token : Tokenize(text, config)) {
    doc.tokens.push_back(std::move(token));
  }
}

Provenance MakeProvenance(const SourceInfo& source, std::string format,
                          const TokenizerConfig& config) {
  return Provenance{source.path, std::move(format), config.Hash(), 0};
}

}  // namespace

Corpus::Corpus(std::string domain_id, std::vector<Document> documents,
               TokenizerConfig tokenizer, Provenance provenance)
    : domain_id_(std::move(domain_id)),
      tokenizer_(tokenizer),
      provenance_(std::move(provenance)) {
  tokenizer_.Validate();
  documents_.reserve(documents.size());
  for (auto& doc : documents) {
    if (doc.tokens.empty()) continue;
    for (const auto& token : doc.tokens) {
      if (token.empty()) {
        throw UsageError("corpus '" + domain_id_ + "' contains an empty token");
      }
    }
    token_count_ += doc.tokens.size();
    documents_.push_back(std::move(doc));
  }
  if (documents_.empty()) {
    throw DataError("empty corpus");
  }
}

Corpus ParseConll(std::istream& input, const TokenizerConfig& config,
                  const SourceInfo& source) {
  config.Validate();
  const std::string bytes = ReadValidated(input, source);
  std::vector<Document> docs(1);
  std::size_t line_no = 0;
  for (std::string_view raw : SplitLines(bytes)) {
    ++line_no;
    if (IsBlank(raw)) continue;
    if (Trim(raw).starts_with("-DOCSTART-")) {
      if (!docs.back().tokens.empty()) docs.emplace_back();
      continue;
    }
    std::string_view token;
    if (raw.find('\t') != std::string_view::npos) {
      token = Trim(raw.substr(0, raw.find('\t')));
    } else {
      std::string_view line = Trim(raw);
      token = line.substr(0, line.find_first_of(" \v\f"));
    }
    if (token.empty()) {
      throw DataError(Where(source) + ": line " + std::to_string(line_no) +
                      ": malformed line, missing token column");
    }
    AppendText(docs.back(), token, config);
  }
  return Corpus(source.domain_id, std::move(docs), config,
                MakeProvenance(source, "conll", config));
}

const std::vector<std::string>& DefaultPairFields() {
  static const std::vector<std::string> kFields = {"sentence1", "sentence2",
                                                   "premise", "hypothesis"};
  return kFields;
}

Corpus ParseJsonlPairs(std::istream& input,
                       const std::vector<std::string>& fields,
                       const TokenizerConfig& config,
                       const SourceInfo& source) {
  config.Validate();
  if (fields.empty()) throw UsageError("no JSON-lines fields requested");
  const std::string bytes = ReadValidated(input, source);
  std::vector<Document> docs;
  std::size_t skipped = 0;
  std::size_t line_no = 0;
  for (std::string_view raw : SplitLines(bytes)) {
    ++line_no;
    if (IsBlank(raw)) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(Where(source) + ": line " + std::to_string(line_no) +
                      ": invalid JSON near column " +
                      std::to_string(e.byte));
    }
    if (!record.is_object()) {
      throw DataError(Where(source) + ": line " + std::to_string(line_no) +
                      ": expected a JSON object");
    }
    Document doc;
    bool found = false;
    for (const auto& field : fields) {
      auto it = record.find(field);
      if (it == record.end() || !it->is_string()) continue;
      found = true;
      AppendText(doc, it->get_ref<const std::string&>(), config);
    }
    if (!found) {
      ++skipped;
      continue;
    }
    docs.push_back(std::move(doc));
  }
  Provenance provenance = MakeProvenance(source, "jsonl", config);
  provenance.skipped_records = skipped;
  return Corpus(source.domain_id, std::move(docs), config,
                std::move(provenance));
}

Corpus ParsePlaintext(std::istream& input, const TokenizerConfig& config,
                      const SourceInfo& source, PlaintextUnit unit) {
  config.Validate();
  const std::string bytes = ReadValidated(input, source);
  std::vector<Document> docs;
  bool open = false;
  for (std::string_view line : SplitLines(bytes)) {
    if (IsBlank(line)) {
      open = false;
      continue;
    }
    if (unit == PlaintextUnit::kLine || !open) {
      docs.emplace_back();
      open = true;
    }
    AppendText(docs.back(), line, config);
  }
  return Corpus(source.domain_id, std::move(docs), config,
                MakeProvenance(source, "plaintext", config));
}

nlohmann::ordered_json CorpusToJson(const Corpus& corpus) {
  nlohmann::ordered_json docs = nlohmann::ordered_json::array();
  nlohmann::ordered_json lengths = nlohmann::ordered_json::array();
  for (const auto& doc : corpus.documents()) {
    docs.push_back(doc.tokens);
    lengths.push_back(doc.raw_length);
  }
  const Provenance& p = corpus.provenance();
  nlohmann::ordered_json out;
  out["domain_id"] = corpus.domain_id();
  out["tokenizer_config"] = nlohmann::json(corpus.tokenizer());
  out["provenance"] = {{"source_path", p.source_path},
                       {"format", p.format},
                       {"tokenizer_hash", p.tokenizer_hash},
                       {"skipped_records", p.skipped_records}};
  out["documents"] = std::move(docs);
  out["raw_lengths"] = std::move(lengths);
  return out;
}

Corpus CorpusFromJson(const nlohmann::json& j) {
  try {
    const auto config = j.at("tokenizer_config").get<TokenizerConfig>();
    const auto& docs_json = j.at("documents");
    const nlohmann::json lengths =
        j.value("raw_lengths", nlohmann::json::array());
    std::vector<Document> docs;
    docs.reserve(docs_json.size());
    for (std::size_t i = 0; i < docs_json.size(); ++i) {
      Document doc;
      doc.tokens = docs_json[i].get<std::vector<std::string>>();
      if (i < lengths.size()) doc.raw_length = lengths[i].get<std::size_t>();
      docs.push_back(std::move(doc));
    }
    Provenance provenance;
    if (j.contains("provenance")) {
      const auto& p = j.at("provenance");
      provenance.source_path = p.value("source_path", "");
      provenance.format = p.value("format", "interchange");
      provenance.skipped_records = p.value("skipped_records", std::size_t{0});
    } else {
      provenance.format = "interchange";
    }
    provenance.tokenizer_hash = config.Hash();
    return Corpus(j.at("domain_id").get<std::string>(), std::move(docs),
                  config, std::move(provenance));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed corpus interchange JSON: ") +
                    e.what());
  }
}

}  // namespace transportkit
