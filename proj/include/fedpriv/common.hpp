// Copyright 2026 The Fedpriv Authors
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

#ifndef FEDPRIV_COMMON_HPP
#define FEDPRIV_COMMON_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fedpriv {

// ---------------------------------------------------------------------------
// Errors. Every failure surfaces as one of these categories so the CLI can
// map them to stable exit codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, unparseable or schema-violating data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Precondition or argument violation on an API call.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// No generalization satisfies the anonymity constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Model training diverged or cannot proceed.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic seeding. Stream keys are derived by hashing a base seed with
// an arbitrary sequence of tags (strings and integers), so that independent
// consumers (per round, per client, per mechanism) get independent streams
// that are reproducible across runs and platforms.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  return fnv1a64(s.data(), s.size());
}

namespace detail {
inline std::uint64_t mix_part(std::uint64_t state, std::string_view s) {
  return splitmix64(state ^ fnv1a64(s));
}
inline std::uint64_t mix_part(std::uint64_t state, std::uint64_t v) {
  return splitmix64(state ^ v);
}
}  // namespace detail

/// Derives a stream key from a base seed and a sequence of tags.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t seed, Parts&&... parts) {
  std::uint64_t state = splitmix64(seed ^ 0x5fe1dc4ad5a3b6c1ull);
  ((state = detail::mix_part(state, parts)), ...);
  return state;
}

/// Seeded random stream with explicit, platform-independent distributions.
/// std::<distribution> types are avoided on purpose: their output sequences
/// are implementation defined, which would break cross-toolchain
/// reproducibility of experiment artifacts.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Standard normal via Box-Muller; pairs are cached for determinism.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Laplace(0, scale) via the inverse CDF.
  double laplace(double scale) {
    double u;
    do {
      u = uniform01() - 0.5;
    } while (1.0 - 2.0 * std::abs(u) <= 0.0);
    double mag = std::log1p(-2.0 * std::abs(u));
    return u < 0.0 ? scale * mag : -scale * mag;
  }

  /// Fisher-Yates shuffle driven by this stream.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Small statistics helpers.
// ---------------------------------------------------------------------------

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw ValidationError("mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1 denominator); 0 for a single observation.
inline double sample_std(const std::vector<double>& v) {
  if (v.empty()) throw ValidationError("sample_std: empty sample");
  if (v.size() == 1) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double population_std(const std::vector<double>& v) {
  if (v.empty()) throw ValidationError("population_std: empty sample");
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

/// Percentile in [0, 100] with linear interpolation between order statistics
/// at rank p/100 * (n-1).
inline double percentile(std::vector<double> v, double p) {
  if (v.empty()) throw ValidationError("percentile: empty sample");
  if (p < 0.0 || p > 100.0) throw ValidationError("percentile: p outside [0, 100]");
  std::sort(v.begin(), v.end());
  double rank = p / 100.0 * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(rank);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = rank - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------------------
// Index-parallel loop. Work items must be independent; the first exception
// (if any) is rethrown on the caller thread after all workers join.
// ---------------------------------------------------------------------------

template <typename Fn>
void parallel_for(std::size_t n, unsigned max_workers, Fn&& fn) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  unsigned workers = std::min<std::size_t>(std::min(max_workers, hw ? hw : 1u), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fedpriv

#endif  // FEDPRIV_COMMON_HPP
