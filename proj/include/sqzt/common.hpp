// Copyright 2026 The sqzt Authors
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

#ifndef SQZT_COMMON_HPP_
#define SQZT_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sqzt {

inline constexpr const char *kToolVersion = "sqzt 0.1.0";

//===========================================================================
// Error taxonomy. CLI exit codes: usage errors -> 2, data errors -> 3,
// numeric failures -> 4.
//===========================================================================

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidDimensionError : Error {
  using Error::Error;
};
struct TruncationOverflowError : Error {
  using Error::Error;
};
struct ContractViolationError : Error {
  using Error::Error;
};
struct NumericFailureError : Error {
  using Error::Error;
};
struct MalformedFileError : Error {
  using Error::Error;
};
struct VersionMismatchError : Error {
  using Error::Error;
};
struct InsufficientDataError : Error {
  using Error::Error;
};
struct DegenerateFactorError : Error {
  using Error::Error;
};

//===========================================================================
// Seed splitting.
//
// All randomness in the toolkit flows from one user seed through the
// "sqzt-splitmix-v1" scheme: a derived stream seed is
// splitmix64(splitmix64(base) ^ stream_id), and consumers construct an
// mt19937_64 from it. Stream ids are stable, documented constants (or
// base + sample index for per-sample streams), so every run is replayable
// from its manifest.
//===========================================================================

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline constexpr const char *kSeedScheme = "sqzt-splitmix-v1";

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id) {
  return splitmix64(splitmix64(base) ^ stream_id);
}

inline std::mt19937_64 make_rng(std::uint64_t base, std::uint64_t stream_id) {
  return std::mt19937_64(derive_seed(base, stream_id));
}

// Uniform double in [0, 1) from the top 53 bits. Used instead of
// std::uniform_real_distribution so sampled artifacts do not depend on the
// standard library's distribution internals.
inline double uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Box-Muller, always consuming exactly two draws.
inline double normal01(std::mt19937_64 &rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);  // guard log(0)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

//===========================================================================
// Thread control. --threads / SQZTOMO_THREADS set the global worker count;
// 1 selects the serial reference paths everywhere.
//===========================================================================

int thread_count();
void set_thread_count(int n);

}  // namespace sqzt

#endif  // SQZT_COMMON_HPP_
