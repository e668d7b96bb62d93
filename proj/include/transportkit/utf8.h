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

#ifndef TRANSPORTKIT_UTF8_H_
#define TRANSPORTKIT_UTF8_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace transportkit::utf8 {

// Returns the byte offset of the first ill-formed sequence, or nullopt when
// the whole input is well-formed UTF-8 (no overlongs, no surrogates, nothing
// above U+10FFFF).
std::optional<std::size_t> FindInvalid(std::string_view bytes);

// Decodes the code point starting at bytes[pos] and advances pos. Input must
// already be validated.
char32_t Next(std::string_view bytes, std::size_t& pos);

void Append(std::string& out, char32_t cp);

std::size_t CodePointCount(std::string_view valid_bytes);

bool IsSpace(char32_t cp);
bool IsPunctuation(char32_t cp);

// Simple case folding for ASCII, Latin-1, Latin Extended-A, basic Greek and
// basic Cyrillic. Other scripts are returned unchanged.
char32_t ToLower(char32_t cp);

}  // namespace transportkit::utf8

#endif  // TRANSPORTKIT_UTF8_H_
