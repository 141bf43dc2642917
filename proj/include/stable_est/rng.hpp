#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stable_est/common.hpp"

namespace stable_est {

struct Seed {
  std::uint64_t value = 0;
};

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Splittable derivation: child i jumps the master stream by a fixed odd gamma,
// so tasks get decorrelated streams independent of scheduling order.
inline Seed child_seed(Seed master, std::uint64_t index) {
  std::uint64_t s = master.value + 0x9E3779B97F4A7C15ull * (index + 1);
  return Seed{splitmix64_next(s)};
}

class Rng {
 public:
  explicit Rng(Seed s) : state_(s.value) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // uniform in [0, 1), 53-bit resolution
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1): the zero case is nudged so log() stays finite
  double next_unit_open() {
    double u = next_unit();
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller, cosine branch; two uniforms per draw, no cached state
  double normal() {
    double u1 = next_unit_open();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // inverse CDF; scale b, location 0
  double laplace(double b) {
    double u = next_unit_open();
    return u < 0.5 ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
  }

  bool bernoulli(double prob) { return next_unit() < prob; }

 private:
  std::uint64_t state_;
};

// Precomputed-CDF binomial sampler. The pmf is built in log space so large n
// and extreme probabilities cannot underflow the recurrence.
class BinomialSampler {
 public:
  BinomialSampler(int n, double prob) : n_(n), prob_(prob) {
    if (n < 0 || prob < 0.0 || prob > 1.0) throw std::invalid_argument("BinomialSampler: bad parameters");
    cdf_.resize(n + 1);
    std::vector<double> logpmf(n + 1);
    if (prob == 0.0 || prob == 1.0) {
      for (int k = 0; k <= n; ++k) cdf_[k] = (prob == 0.0) ? 1.0 : (k == n ? 1.0 : 0.0);
      return;
    }
    double lp = std::log(prob), lq = std::log1p(-prob);
    double mx = -kInf;
    for (int k = 0; k <= n; ++k) {
      logpmf[k] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq;
      mx = std::max(mx, logpmf[k]);
    }
    double total = 0.0;
    for (int k = 0; k <= n; ++k) {
      total += std::exp(logpmf[k] - mx);
      cdf_[k] = total;
    }
    for (int k = 0; k <= n; ++k) cdf_[k] /= total;
  }

  int draw(Rng& rng) const {
    double u = rng.next_unit();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return n_;
    return static_cast<int>(it - cdf_.begin());
  }

  // exact pmf, for enumeration-based risk evaluation
  double pmf(int k) const {
    if (k < 0 || k > n_) return 0.0;
    double lo = (k == 0) ? 0.0 : cdf_[k - 1];
    return cdf_[k] - lo;
  }

  int n() const { return n_; }
  double prob() const { return prob_; }

 private:
  int n_;
  double prob_;
  std::vector<double> cdf_;
};

}  // namespace stable_est
