// Copyright 2026 The wcpdg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WCPDG_CORE_RANDOM_HPP_
#define WCPDG_CORE_RANDOM_HPP_

#include <cstdint>
#include <random>

#include "wcpdg/core/types.hpp"

namespace wcpdg {

/// Seed for sub-stream `index` of `seed` (splitmix64 finalizer), so sampled
/// work can be split across threads without changing results.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Vec normal_vector(Rng& rng, int dim, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = scale * normal(rng);
  return v;
}

inline Vec uniform_vector(Rng& rng, int dim, double radius) {
  std::uniform_real_distribution<double> uni(-radius, radius);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = uni(rng);
  return v;
}

}  // namespace wcpdg

#endif  // WCPDG_CORE_RANDOM_HPP_
