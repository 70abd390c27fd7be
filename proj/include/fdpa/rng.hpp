// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fdpa {

/// Independent channel kinds get independent sub-streams so that h and g
/// draws never share randomness (Theorem-level independence assumption) and
/// parallel drop evaluation stays bit-reproducible.
enum class StreamKind : std::uint64_t {
  layout = 0,
  downlink = 1,
  uplink = 2,
  inter_user = 3,
  self_interference = 4,
  generic = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// One deterministic stream keyed by (master_seed, drop_index, kind).
/// Draw routines are implemented on raw 64-bit outputs so the sequence does
/// not depend on standard-library distribution internals.
class StreamRng {
 public:
  StreamRng(std::uint64_t master_seed, std::uint64_t drop_index, StreamKind kind)
      : engine_(stream_key(master_seed, drop_index, kind)) {}

  static std::uint64_t stream_key(std::uint64_t master_seed,
                                  std::uint64_t drop_index, StreamKind kind) {
    std::uint64_t k = splitmix64(master_seed);
    k = splitmix64(k ^ (0x5851f42d4c957f2dULL * (drop_index + 1)));
    k = splitmix64(k ^ (0x14057b7ef767814fULL * (static_cast<std::uint64_t>(kind) + 1)));
    return k;
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1]; never returns 0 so logs are safe.
  double uniform_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  /// Standard real normal N(0, 1), Box-Muller.
  double standard_normal() {
    double u1 = uniform_unit();
    double u2 = uniform(0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Circularly symmetric CN(0, 1): E|z|^2 = 1.
  std::complex<double> complex_normal() {
    double u1 = uniform_unit();
    double u2 = uniform(0.0, 1.0);
    double r = std::sqrt(-std::log(u1));
    double phi = 6.283185307179586477 * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fdpa
