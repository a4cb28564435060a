#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace projequiv {

// Deterministic random source. All sampling goes through the raw 64-bit
// output of mt19937_64 so that streams are reproducible bit-for-bit across
// standard-library implementations (std::uniform_real_distribution is not
// guaranteed portable; this mapping is).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range via rejection-free 128-bit scaling.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1u;
    const std::uint64_t r = gen_();
    return lo + static_cast<int>((static_cast<unsigned __int128>(r) * span) >> 64);
  }

  // Marsaglia polar method; consumes uniforms deterministically.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  Eigen::VectorXd gaussian_vector(int d) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x[i] = gaussian();
    return x;
  }

  // Euclidean unit vector, re-drawn on (vanishingly unlikely) tiny norms.
  Eigen::VectorXd unit_vector(int d) {
    for (;;) {
      Eigen::VectorXd x = gaussian_vector(d);
      const double n = x.norm();
      if (n > 1e-8) return x / n;
    }
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace projequiv
