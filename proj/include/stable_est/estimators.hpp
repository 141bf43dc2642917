#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stable_est/core.hpp"
#include "stable_est/stability.hpp"
#include "stable_est/wavelet.hpp"

namespace stable_est {

namespace detail {

inline EstimatorHandle scalar_mean_handle(std::string id, std::function<double(double)> map) {
  EstimatorHandle h;
  h.id = std::move(id);
  h.target_dim = 1;
  h.mean_map = map;
  h.mean_map_vec = [map](const std::vector<double>& m) { return std::vector<double>{map(m[0])}; };
  h.evaluate = [map](const Dataset& ds, Seed) {
    if (ds.dim() != 1) throw std::invalid_argument("dimension-mismatch: 1-d estimator");
    return std::vector<double>{map(sample_mean(ds)[0])};
  };
  return h;
}

inline EstimatorHandle vector_mean_handle(std::string id, std::function<std::vector<double>(const std::vector<double>&)> map) {
  EstimatorHandle h;
  h.id = std::move(id);
  h.target_dim = -1;  // follows the data dimension
  h.mean_map_vec = map;
  h.mean_map = [map](double m) { return map(std::vector<double>{m})[0]; };
  h.evaluate = [map](const Dataset& ds, Seed) { return map(sample_mean(ds)); };
  return h;
}

}  // namespace detail

struct BoundedMeanSpec {
  double r = 1.0;
  int n = 100;
  double beta_n = 0.1;
  StabilityOrder order = StabilityOrder::worst();
  int d = 1;

  void validate() const {
    if (r <= 0.0 || n < 1 || beta_n < 0.0 || d < 1 || !(order.p >= 1.0))
      throw std::invalid_argument("BoundedMeanSpec: invalid field");
  }
};

// c * mean with c = n beta / (2 r) ∧ 1; the refined flag sharpens the
// divisor to 2^{1-1/p} r, which buys a larger factor for finite p
inline EstimatorHandle shrinkage_bounded(const BoundedMeanSpec& spec, bool refined = false) {
  spec.validate();
  double ip = spec.order.infinite() ? 0.0 : 1.0 / spec.order.p;
  double divisor = refined ? std::pow(2.0, 1.0 - ip) * spec.r : 2.0 * spec.r;
  double c = std::min(1.0, spec.n * spec.beta_n / divisor);
  EstimatorHandle h = detail::vector_mean_handle(refined ? "bounded-shrinkage-refined" : "bounded-shrinkage",
                                                 [c](const std::vector<double>& m) {
                                                   auto out = m;
                                                   for (double& v : out) v *= c;
                                                   return out;
                                                 });
  h.target_dim = spec.d;
  h.linear_factor = c;
  h.certified = Certification{spec.order.p, spec.beta_n};
  return h;
}

// minimax-exact 1-d shrinkage: never shrinks past the 1/(1 + 1/sqrt(n))
// factor that already attains the unconstrained risk
inline EstimatorHandle exact_worst_bounded(int n, double r, double beta_n) {
  if (n < 1 || r <= 0.0 || beta_n < 0.0) throw std::invalid_argument("exact_worst_bounded: bad input");
  double c = std::min(n * beta_n / (2.0 * r), 1.0 / (1.0 + 1.0 / std::sqrt(static_cast<double>(n))));
  EstimatorHandle h = detail::scalar_mean_handle("bounded-worst-exact", [c](double m) { return c * m; });
  h.linear_factor = c;
  h.certified = Certification{kInf, beta_n};
  return h;
}

// magnitude-adaptive average-case shrinkage: subtracts mass only when the
// sample mean is large, keeping the bias cubic in the threshold distance
inline EstimatorHandle avg_bounded(int n, double r, double beta_n) {
  if (n < 1 || r <= 0.0 || beta_n < 0.0) throw std::invalid_argument("avg_bounded: bad input");
  double dlt = beta_n <= 0.0 ? kInf : pos_part(r / (n * beta_n) - 1.0);
  double a = std::min(dlt, 1.0);
  double margin = std::isinf(dlt) ? kInf : 2.0 * r * std::sqrt(dlt) + 2.0 * r / std::sqrt(static_cast<double>(n));
  EstimatorHandle h = detail::scalar_mean_handle("bounded-avg", [a, margin](double m) {
    double ratio = m == 0.0 ? 1.0 : std::min(margin / std::abs(m), 1.0);
    return (1.0 - a * ratio) * m;
  });
  h.certified = Certification{1.0, beta_n};
  return h;
}

// plain-shrinkage baseline with factor 1 - (r/(n beta) - 1)+ ∧ 1; loses a
// full power of the threshold distance against the adaptive version
inline EstimatorHandle naive_avg_bounded(int n, double r, double beta_n) {
  if (n < 1 || r <= 0.0 || beta_n < 0.0) throw std::invalid_argument("naive_avg_bounded: bad input");
  double dlt = beta_n <= 0.0 ? kInf : pos_part(r / (n * beta_n) - 1.0);
  double c = 1.0 - std::min(dlt, 1.0);
  EstimatorHandle h = detail::scalar_mean_handle("bounded-avg-naive", [c](double m) { return c * m; });
  h.linear_factor = c;
  h.certified = Certification{1.0, beta_n};
  return h;
}

struct HeavyTailSpec {
  double r = 1.0;   // moment radius: E ||X||^k <= r^k
  double k = 2.0;
  int n = 100;
  double beta_n = 0.1;
  StabilityOrder mode = StabilityOrder::worst();

  void validate() const {
    if (r <= 0.0 || k < 1.0 || n < 1 || beta_n < 0.0) throw std::invalid_argument("HeavyTailSpec: invalid field");
  }
  double rho() const {
    if (mode.infinite()) {
      double base = n * beta_n / 2.0;
      return k < 2.0 ? std::min(base, r * std::pow(static_cast<double>(n), 1.0 / k)) : base;
    }
    return k < 2.0 ? r * std::pow(static_cast<double>(n), 1.0 / k) : kInf;
  }
};

// worst-case mode: truncated mean (points beyond rho contribute zero);
// average-case mode: self-normalized mean with the stability-priced outer
// factor beta n / (24 r) ∧ 1
inline EstimatorHandle heavy_tail_estimator(const HeavyTailSpec& spec) {
  spec.validate();
  double rho = spec.rho();
  EstimatorHandle h;
  h.target_dim = -1;
  if (spec.mode.infinite()) {
    h.id = "heavy-truncated-mean";
    h.evaluate = [rho](const Dataset& ds, Seed) {
      std::vector<double> acc(ds.dim(), 0.0);
      for (const auto& p : ds.points) {
        if (!std::isinf(rho) && l2_norm(p) > rho) continue;
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += p[j];
      }
      for (double& v : acc) v /= static_cast<double>(ds.size());
      return acc;
    };
    h.certified = Certification{kInf, spec.beta_n};
    return h;
  }
  h.id = "heavy-self-normalized";
  double r = spec.r, beta_n = spec.beta_n;
  h.evaluate = [rho, r, beta_n](const Dataset& ds, Seed) {
    std::size_t m = ds.size();
    std::vector<double> acc(ds.dim(), 0.0);
    double norm_sum = 0.0;
    for (const auto& p : ds.points) {
      if (!std::isinf(rho) && l2_norm(p) > rho) continue;
      norm_sum += l2_norm(p);
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += p[j];
    }
    double inner = norm_sum <= 0.0 ? 1.0 : std::min(1.0, 2.0 * m * r / norm_sum);
    double outer = std::min(1.0, beta_n * m / (24.0 * r));
    for (double& v : acc) v *= inner * outer / static_cast<double>(m);
    return acc;
  };
  h.certified = Certification{1.0, spec.beta_n};
  return h;
}

struct SparseMeanSpec {
  double r = 1.0;
  int s = 1;
  int d = 2;
  int n = 100;
  double beta_n = 0.1;

  void validate() const {
    if (r <= 0.0 || s < 1 || n < 1 || beta_n <= 0.0) throw std::invalid_argument("SparseMeanSpec: invalid field");
    if (d <= s) throw std::invalid_argument("dimension-too-small: need d >= s + 1");
  }
  double shrink() const { return std::min(1.0, n * beta_n / (4.0 * std::sqrt(2.0 * s) * r)); }
};

// soft-threshold at the (s+1)-th largest absolute mean coordinate; the
// data-driven threshold keeps at most s coordinates alive, and the shrink
// factor prices the worst-case jump of the threshold itself
inline EstimatorHandle sparse_soft(const SparseMeanSpec& spec) {
  spec.validate();
  double c = spec.shrink();
  int s = spec.s;
  EstimatorHandle h = detail::vector_mean_handle("sparse-soft", [c, s](const std::vector<double>& m) {
    std::vector<double> mag(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) mag[j] = std::abs(m[j]);
    std::vector<double> sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + s, sorted.end(), std::greater<double>());
    double tau = sorted[s];  // (s+1)-th largest; ties at tau map to zero
    std::vector<double> out(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) out[j] = c * (m[j] < 0 ? -1.0 : 1.0) * pos_part(mag[j] - tau);
    return out;
  });
  h.target_dim = spec.d;
  h.certified = Certification{kInf, spec.beta_n};
  return h;
}

// fixed-threshold baselines; hard jumps by O(tau) when a coordinate crosses
inline std::pair<EstimatorHandle, EstimatorHandle> classical_thresholds(double tau) {
  if (tau < 0.0) throw std::invalid_argument("classical_thresholds: tau >= 0");
  EstimatorHandle hard = detail::vector_mean_handle("hard-threshold", [tau](const std::vector<double>& m) {
    std::vector<double> out(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) out[j] = std::abs(m[j]) >= tau ? m[j] : 0.0;
    return out;
  });
  EstimatorHandle soft = detail::vector_mean_handle("soft-threshold", [tau](const std::vector<double>& m) {
    std::vector<double> out(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) out[j] = (m[j] < 0 ? -1.0 : 1.0) * pos_part(std::abs(m[j]) - tau);
    return out;
  });
  return {hard, soft};
}

enum class WaveletMode { worst, average, baseline };

struct WaveletEstimatorSpec {
  WaveletBasis basis = make_haar();
  double x0 = 0.3;
  double nu = 0.5;  // Hölder/Besov smoothness; requires nu < basis regularity
  int n = 1024;
  double beta_n = 0.1;
  WaveletMode mode = WaveletMode::worst;
  double sigma_assumed = 0.2;
  double m_f_assumed = 1.0;
  double c_t = 0.0;     // 0 -> 4 (sigma + M_f)
  double c_bl = 0.0;    // 0 -> sigma + M_f
  double c_star = 0.0;  // 0 -> 48 K_loc C_psi c_bl_eff / ln 2

  void validate() const {
    if (!(x0 > 0.0 && x0 < 1.0)) throw std::invalid_argument("x0-out-of-range");
    if (!(nu > 0.0) || nu >= basis.regularity) throw std::invalid_argument("regularity-violation: need nu < A");
    if (n < 4 || beta_n < 0.0) throw std::invalid_argument("WaveletEstimatorSpec: bad n or beta");
    if (is_dyadic_at_levels(x0, l_opt() + 1)) throw std::invalid_argument("x0-out-of-range: dyadic at an active level");
  }
  int l_opt() const { return static_cast<int>(std::floor(std::log2(static_cast<double>(n)) / (2.0 * nu + 1.0))); }
  double c_t_eff() const { return c_t > 0.0 ? c_t : 4.0 * (sigma_assumed + m_f_assumed); }
  double c_bl_eff() const { return c_bl > 0.0 ? c_bl : sigma_assumed + m_f_assumed; }
  double c_star_eff() const {
    return c_star > 0.0 ? c_star : 48.0 * basis.k_loc * basis.c_psi * c_bl_eff() / std::log(2.0);
  }
  double clip_level() const { return c_t_eff() * std::sqrt(std::log(static_cast<double>(n))); }
  double b_l() const { return c_bl_eff() * std::log(static_cast<double>(n)); }
  double alpha() const { return std::min(1.0, n * beta_n / (c_star_eff() * sq(std::log(static_cast<double>(n))))); }
  int level_cap() const {  // worst-case mode: deepest mother level kept
    double c_psi_small = 1.0 / (2.0 * basis.kernel_envelope());
    double budget = c_psi_small * n * beta_n / clip_level();
    int lev = budget > 0.0 ? static_cast<int>(std::floor(std::log2(budget))) : basis.l0 - 1;
    lev = std::max(lev, basis.l0 - 1);
    return std::min(lev, l_opt());
  }
};

// pointwise wavelet regression estimate at x0; only the translates active at
// x0 matter, so one pass over the data per level suffices
inline EstimatorHandle wavelet_estimator(const WaveletEstimatorSpec& spec) {
  spec.validate();
  EstimatorHandle h;
  h.target_dim = 1;
  WaveletEstimatorSpec s = spec;
  int L = s.mode == WaveletMode::worst ? s.level_cap() : s.l_opt();
  double clip_t = s.mode == WaveletMode::worst ? s.clip_level() : kInf;
  h.id = s.mode == WaveletMode::worst ? "wavelet-worst" : s.mode == WaveletMode::average ? "wavelet-avg" : "wavelet-baseline";

  h.evaluate = [s, L, clip_t](const Dataset& ds, Seed) {
    if (ds.kind != DatasetKind::regression_pairs) throw std::invalid_argument("wavelet_estimator: regression pairs required");
    std::size_t m = ds.size();
    const WaveletBasis& b = s.basis;
    double total = 0.0;
    // father slice at l0, then mother slices l0..L
    for (int slice = 0; slice <= L - b.l0 + 1; ++slice) {
      bool father = slice == 0;
      int l = father ? b.l0 : b.l0 + slice - 1;
      for (int k : active_ks(b, l, s.x0)) {
        double w0 = father ? eval_father(b, l, k, s.x0) : eval_basis(b, l, k, s.x0);
        if (w0 == 0.0) continue;
        double f_hat = 0.0, s_lk = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          double w = father ? eval_father(b, l, k, ds.points[i][0]) : eval_basis(b, l, k, ds.points[i][0]);
          if (w == 0.0) continue;
          double y = ds.points[i][1];
          double yc = std::isinf(clip_t) ? y : clip(y, clip_t);
          f_hat += yc * w;
          s_lk += std::abs(y * w);
        }
        f_hat /= static_cast<double>(m);
        s_lk /= static_cast<double>(m);
        double coeff = f_hat;
        if (s.mode == WaveletMode::average && s_lk > 0.0)
          coeff *= std::min(1.0, s.b_l() * std::pow(2.0, -l / 2.0) / s_lk);
        total += coeff * w0;
      }
    }
    if (s.mode == WaveletMode::average) total *= s.alpha();
    return std::vector<double>{total};
  };

  // the realized replace-one bound; it sits below beta_n whenever the level
  // budget was achievable, and honestly above it when the father floor binds
  if (s.mode == WaveletMode::worst)
    h.certified = Certification{kInf, 2.0 * clip_t * s.basis.kernel_envelope() * std::pow(2.0, L) / s.n};
  else if (s.mode == WaveletMode::average)
    h.certified = Certification{1.0, s.beta_n};
  return h;
}

}  // namespace stable_est
