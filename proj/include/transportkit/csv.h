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

#ifndef TRANSPORTKIT_CSV_H_
#define TRANSPORTKIT_CSV_H_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace transportkit::csv {

using Row = std::vector<std::string>;

// RFC 4180: quoted fields may contain commas, CRLF and doubled quotes.
// Blank lines are skipped. Throws a data error on an unterminated quote.
std::vector<Row> Parse(std::string_view text);

void WriteRow(std::ostream& out, const Row& row);

// Shortest decimal form that round-trips to the same double.
std::string FormatDouble(double value);

// Strict full-string numeric parse; throws a data error naming the context.
double ParseDouble(std::string_view text, std::string_view context);

}  // namespace transportkit::csv

#endif  // TRANSPORTKIT_CSV_H_
