// Copyright 2026 The sdgcn Authors.
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

#include "sdgcn/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdgcn {

std::uint64_t Rng::mix(std::uint64_t x) {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  Rng r;
  std::uint64_t k = mix(seed ^ 0x6a09e667f3bcc908ULL);
  k = mix(k ^ (a + 0x9e3779b97f4a7c15ULL));
  k = mix(k ^ (b + 0x3c6ef372fe94f82bULL));
  k = mix(k ^ (c + 0xa54ff53a5f1d36f1ULL));
  r.key_ = k;
  return r;
}

Rng Rng::split(std::uint64_t tag) const {
  Rng r;
  r.key_ = mix(key_ ^ mix(tag + 0x510e527fade682d1ULL));
  return r;
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t x = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
  return mix(x);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Rejection on the top of the range removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sdgcn
