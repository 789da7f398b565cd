#pragma once

// Deterministic random number generation.
//
// Every stochastic stage of the pipeline draws from its own stream derived
// from (master seed, stage tag, item index).  All samplers below are written
// against our own splitmix64 core instead of <random> distributions, whose
// algorithms are implementation-defined; this keeps results bit-identical
// across standard libraries, platforms, and thread counts.

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace septopic {

/// One splitmix64 step: mixes `state` and advances it.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent child seed from a master seed and a numeric index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9E3779B97F4A7C15ULL + index * 0xD1B54A32D192ED03ULL);
  splitmix64(s);
  return splitmix64(s);
}

/// Derives an independent child seed from a master seed and a stage tag.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  // FNV-1a over the tag, then mixed with the master through splitmix64.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return derive_seed(master, h);
}

/// Small deterministic generator; one instance per (stage, item) stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Decorrelate trivially related seeds (0, 1, 2, ...).
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1], safe as a log argument.
  double next_open_double() { return 1.0 - next_double(); }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Multiply-shift bounded draw; bias is < 2^-64, irrelevant here, and the
    // draw count per call is fixed, which keeps streams aligned.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (loop-free, stream-stable).
  double next_gaussian() {
    double u1 = next_open_double();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang, with the boost trick for shape < 1.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      double g = next_gamma(shape + 1.0);
      return g * std::pow(next_open_double(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_gaussian();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = next_open_double();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v;
      }
    }
  }

  /// Binomial(n, 1/2) by counting coin bits; n is small in our pipelines.
  std::uint32_t next_binomial_half(std::uint32_t n) {
    std::uint32_t heads = 0;
    while (n >= 64) {
      heads += static_cast<std::uint32_t>(__builtin_popcountll(next_u64()));
      n -= 64;
    }
    if (n > 0) {
      heads += static_cast<std::uint32_t>(
          __builtin_popcountll(next_u64() >> (64 - n)));
    }
    return heads;
  }

 private:
  std::uint64_t state_;
};

/// Dirichlet(alpha) draw via normalized gammas.
inline std::vector<double> sample_dirichlet(const std::vector<double>& alpha,
                                            Rng& rng) {
  std::vector<double> x(alpha.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    x[k] = rng.next_gamma(alpha[k]);
    sum += x[k];
  }
  // A zero sum has probability zero but would poison everything downstream.
  if (sum <= 0.0) {
    x.assign(alpha.size(), 1.0 / static_cast<double>(alpha.size()));
    return x;
  }
  for (double& v : x) v /= sum;
  return x;
}

/// Uniform direction on the unit sphere in `dim` dimensions
/// (iid gaussians, normalized).
inline std::vector<double> sample_unit_sphere(std::size_t dim, Rng& rng) {
  std::vector<double> g(dim);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    g[i] = rng.next_gaussian();
    norm2 += g[i] * g[i];
  }
  if (norm2 <= 0.0) {
    g.assign(dim, 0.0);
    g[0] = 1.0;
    return g;
  }
  double inv = 1.0 / std::sqrt(norm2);
  for (double& v : g) v *= inv;
  return g;
}

}  // namespace septopic
