/*
 * Copyright 2026 The Sector Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SECTOR_RANDOM_H_
#define SECTOR_RANDOM_H_

#include <cstdint>
#include <random>
#include <vector>

namespace sector {

// Seeded generator whose derived draws are identical on every platform. The
// standard distributions are implementation-defined, so bounded integers,
// uniforms, normals and gammas are computed here from raw mt19937_64 output.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Seed derived from several integers, e.g. (seed, epoch, document).
  static uint64_t Mix(uint64_t a, uint64_t b, uint64_t c = 0);

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  uint64_t UniformInt(uint64_t bound);

  // Uniform integer in [lo, hi] (inclusive).
  int64_t UniformRange(int64_t lo, int64_t hi);

  // Uniform double in [0, 1).
  double Uniform();

  double Normal();

  // Gamma(shape, 1) via Marsaglia-Tsang.
  double Gamma(double shape);

  std::vector<double> Dirichlet(double concentration, size_t size);

  // Index drawn from an unnormalized categorical distribution.
  size_t Categorical(const std::vector<double>& weights);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace sector

#endif  // SECTOR_RANDOM_H_
