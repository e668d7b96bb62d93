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

#ifndef TRANSPORTKIT_HASH_H_
#define TRANSPORTKIT_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace transportkit {

// 64-bit FNV-1a over raw bytes.
//   Fnv1a64("")  == 0xcbf29ce484222325
//   Fnv1a64("a") == 0xaf63dc4c8601ec8c
constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t Fnv1a64(std::string_view bytes,
                                std::uint64_t basis = kFnvOffsetBasis) {
  std::uint64_t h = basis;
  for (char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= kFnvPrime;
  }
  return h;
}

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded feature hash used by the built-in embedding:
//   FeatureHash(f, seed) = Mix64(Fnv1a64(f) ^ seed)
// The bucket is FeatureHash % dimension and the sign is -1 when bit 63 is
// set, +1 otherwise.
constexpr std::uint64_t FeatureHash(std::string_view feature,
                                    std::uint64_t seed) {
  return Mix64(Fnv1a64(feature) ^ seed);
}

// Lower-case, zero-padded 16 digit hex rendering.
std::string HashToHex(std::uint64_t h);

// Incremental hasher for composite keys. Each field is length-prefixed so
// that ("ab","c") and ("a","bc") hash differently.
class KeyHasher {
 public:
  KeyHasher& Add(std::string_view field);
  KeyHasher& Add(std::uint64_t value);
  std::uint64_t value() const { return h_; }
  std::string hex() const { return HashToHex(h_); }

 private:
  std::uint64_t h_ = kFnvOffsetBasis;
};

}  // namespace transportkit

#endif  // TRANSPORTKIT_HASH_H_
