// Copyright 2026 The ifaa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IFAA_RNG_HPP
#define IFAA_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ifaa {

// Stream tags for deriving independent substreams from one master seed.
// Every parallel task seeds its own generator as
//   mix_seed(master, {tag, index...})
// so results never depend on scheduling or thread count.
enum SeedStream : std::uint64_t {
  kStreamRefs = 1,       // reference-set sampling
  kStreamPerm = 2,       // permutation p of phase 1b
  kStreamBootstrap = 3,  // bootstrap replicate of phase 2
  kStreamReplicate = 4,  // benchmark replicate dataset
  kStreamSubject = 5,    // per-subject draws in the simulators
  kStreamParams = 6,     // scenario-level parameter draws
  kStreamFolds = 7,      // CV fold assignment
  kStreamTaxon = 8,      // per-taxon estimation streams
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t root,
                              std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(root);
  for (std::uint64_t v : path) s = splitmix64(s ^ (v + 0xD1B54A32D192ED03ull));
  return s;
}

// Thin wrapper over mt19937_64 with the draw helpers used across the
// project. Seeded once, deterministic for a fixed libstdc++.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return unit_(gen_); }
  double uniform(double a, double b) { return a + (b - a) * unit_(gen_); }
  double normal(double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mean, sd);
    return d(gen_);
  }
  double gamma(double shape, double scale = 1.0) {
    std::gamma_distribution<double> d(shape, scale);
    return d(gen_);
  }
  long long poisson(double mean) {
    std::poisson_distribution<long long> d(mean);
    return d(gen_);
  }
  bool bernoulli(double p) { return unit_(gen_) < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(gen_);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace ifaa

#endif  // IFAA_RNG_HPP
