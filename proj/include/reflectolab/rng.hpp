// Copyright 2026 The Reflectolab Authors.
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

// Counter-based random numbers: Philox4x32-10 keyed by a 64-bit seed.
// Every draw is a pure function of (seed, counter), so paths and steps can be
// generated in any order on any thread.

#ifndef REFLECTOLAB_RNG_HPP_
#define REFLECTOLAB_RNG_HPP_

#include <array>
#include <cstdint>
#include <span>

namespace reflectolab {

using PhiloxBlock = std::array<std::uint32_t, 4>;

PhiloxBlock philox4x32(PhiloxBlock counter, std::array<std::uint32_t, 2> key) noexcept;

// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of the index-th child stream of `base_seed`.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  // Fills `out` with independent standard normals addressed by
  // (step, stream): the same address always yields the same values.
  void normals(std::uint64_t step, std::uint32_t stream, std::span<double> out) const noexcept;

  // Uniform in the open interval (0, 1).
  double uniform(std::uint64_t step, std::uint32_t stream, std::uint32_t lane) const noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace reflectolab

#endif  // REFLECTOLAB_RNG_HPP_
