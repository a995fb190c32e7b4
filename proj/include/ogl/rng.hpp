#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ogl {

// SplitMix64 step; used to derive well-separated per-artifact stream seeds
// from a single user seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (tag + 1));
  splitmix64(s);
  return splitmix64(s);
}

// Deterministic scalar stream on top of mt19937_64. The standard pins the
// engine's output bit-exactly; uniforms and normals are built here from raw
// bits (std::normal_distribution is not portable across standard libraries).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n), n > 0. Rejection-free modulo is fine at our scales.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  // Standard normal via the polar (Marsaglia) method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double a, b, s;
    do {
      a = 2.0 * uniform() - 1.0;
      b = 2.0 * uniform() - 1.0;
      s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = b * m;
    have_spare_ = true;
    return a * m;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ogl
