/*
 Copyright 2026 The pbctl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef PBCTL_RANDOM_HPP
#define PBCTL_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pbctl {

/// Mixes a 64-bit word (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Derives a substream seed from a master seed and a path of integer keys.
/// The mapping is a pure function of its inputs, so substreams can be
/// created in any order (or in parallel) and still agree.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Random stream used throughout the library.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// produces normals by inverse-CDF so a draw consumes exactly one engine word.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Substream keyed by (seed, path...).
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(seed, path));
  }

  /// Uniform draw on the open interval (0, 1).
  double uniform();

  /// Standard normal draw.
  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pbctl

#endif  // PBCTL_RANDOM_HPP
