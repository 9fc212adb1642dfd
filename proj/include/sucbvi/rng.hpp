// Copyright 2026 The shaped-ucbvi Authors.
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

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace sucbvi {

/// Counter-based pseudo-random generator.
///
/// The output for draw number i is a keyed mix of (key, i), so a stream is
/// fully described by its 64-bit key and position. Child streams derived with
/// split() are independent of the number of draws already taken from the
/// parent, which keeps per-run randomness stable when unrelated code changes
/// how many numbers it consumes.
///
/// Satisfies UniformRandomBitGenerator, but the helpers below are preferred:
/// they are bit-reproducible across standard libraries, unlike
/// std::*_distribution.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) noexcept;

  CounterRng split(std::string_view name) const noexcept;
  CounterRng split(std::uint64_t index) const noexcept;

  result_type operator()() noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Standard normal via Box-Muller (two draws per call, no caching).
  double normal() noexcept;
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Index drawn from a discrete distribution. Weights need not be normalized.
  std::size_t categorical(std::span<const double> weights) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  struct FromKey {};
  CounterRng(FromKey, std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sucbvi
