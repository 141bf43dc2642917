#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stable_est/core.hpp"
#include "stable_est/rng.hpp"

namespace stable_est {

inline DiscreteDist discretize(const BinaryDist& b) {
  DiscreteDist d;
  d.support = {{b.r}, {-b.r}};
  d.probs = {b.prob_plus, 1.0 - b.prob_plus};
  return d;
}

inline DiscreteDist discretize(const HeavyTwoPointDist& h) {
  DiscreteDist d;
  d.support = {{0.0}, {h.r * std::pow(h.eps, -1.0 / h.k)}};
  d.probs = {1.0 - h.eps, h.eps};
  return d;
}

namespace detail {

inline void check_discrete(const DiscreteDist& d) {
  DistributionSpec spec;
  spec.v = d;
  validate(spec);
}

}  // namespace detail

inline double tv_discrete(const DiscreteDist& p1, const DiscreteDist& p2) {
  detail::check_discrete(p1);
  detail::check_discrete(p2);
  std::map<std::vector<double>, std::pair<double, double>> merged;
  for (std::size_t i = 0; i < p1.support.size(); ++i) merged[p1.support[i]].first += p1.probs[i];
  for (std::size_t i = 0; i < p2.support.size(); ++i) merged[p2.support[i]].second += p2.probs[i];
  double s = 0.0;
  for (const auto& [pt, pr] : merged) s += std::abs(pr.first - pr.second);
  return 0.5 * s;
}

// n i.i.d. pairs under the per-coordinate maximal coupling: each pair agrees
// with probability 1 - TV and otherwise draws independently from the
// normalized residual measures, whose supports are disjoint
inline std::pair<Dataset, Dataset> maximal_coupling_sample(const DiscreteDist& p1, const DiscreteDist& p2, int n,
                                                           Seed seed) {
  detail::check_discrete(p1);
  detail::check_discrete(p2);
  if (n < 1) throw std::invalid_argument("maximal_coupling_sample: n >= 1");
  std::map<std::vector<double>, std::pair<double, double>> merged;
  for (std::size_t i = 0; i < p1.support.size(); ++i) merged[p1.support[i]].first += p1.probs[i];
  for (std::size_t i = 0; i < p2.support.size(); ++i) merged[p2.support[i]].second += p2.probs[i];
  std::vector<std::vector<double>> pts;
  std::vector<double> overlap, res1, res2;
  for (const auto& [pt, pr] : merged) {
    pts.push_back(pt);
    double w = std::min(pr.first, pr.second);
    overlap.push_back(w);
    res1.push_back(pr.first - w);
    res2.push_back(pr.second - w);
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) tv += res1[i];

  auto draw_from = [&](const std::vector<double>& w, double total, Rng& rng) -> std::size_t {
    double u = rng.next_unit() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    for (std::size_t i = w.size(); i-- > 0;)
      if (w[i] > 0.0) return i;
    return 0;
  };

  Dataset a, b;
  a.domain_radius = kInf;
  b.domain_radius = kInf;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    if (rng.next_unit() >= tv) {
      std::size_t idx = draw_from(overlap, 1.0 - tv, rng);
      a.points.push_back(pts[idx]);
      b.points.push_back(pts[idx]);
    } else {
      a.points.push_back(pts[draw_from(res1, tv, rng)]);
      b.points.push_back(pts[draw_from(res2, tv, rng)]);
    }
  }
  return {a, b};
}

// two-point risk bound under the worst-case constraint: any estimator whose
// replace-one gap is at most beta_n moves by at most E[d_Ham] * beta_n
// between coupled samples, so it cannot track both population targets
inline double lower_worst(double delta_theta, double e_dham, double beta_n) {
  if (delta_theta < 0.0 || e_dham < 0.0 || beta_n < 0.0) throw std::invalid_argument("lower_worst: negative input");
  return sq(pos_part(delta_theta - e_dham * beta_n) / 2.0);
}

struct LpLowerBound {
  double general = 0.0;
  std::optional<double> linear;
  double value = 0.0;
  std::optional<double> argmax_eta;
};

inline double lower_lp_linear_term(double delta_theta, int n, double p, double beta_n, double eta) {
  double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  double half_p = std::isinf(p) ? kInf : p / (2.0 * (n + 1.0));
  double first = (1.0 - 2.0 * eta + half_p) / std::pow(2.0 * eta, ip);
  double branch = std::min(first, std::pow(n + 1.0, ip));
  double num = (1.0 - 2.0 * eta) * delta_theta - std::pow(2.0, ip) * (n + 1.0) * beta_n * branch;
  return sq(pos_part(num) / 2.0);
}

inline LpLowerBound lower_lp(double delta_theta, int n, double p, double beta_n, bool linear,
                             const std::vector<double>& eta_grid = {}) {
  if (!(p >= 1.0)) throw std::invalid_argument("lower_lp: p >= 1");
  if (delta_theta < 0.0 || beta_n < 0.0 || n < 1) throw std::invalid_argument("lower_lp: bad input");
  LpLowerBound out;
  double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  out.general = sq(pos_part(delta_theta - (n + 1.0) * std::pow(std::log(static_cast<double>(n)) + 1.0, ip) * beta_n) / 2.0);
  out.value = out.general;
  if (linear) {
    std::vector<double> grid = eta_grid.empty() ? linspace(0.0, 0.5, 200) : eta_grid;
    double best = 0.0, best_eta = grid.front();
    for (double eta : grid) {
      if (eta < 0.0 || eta > 0.5) throw std::invalid_argument("lower_lp: eta grid outside [0, 1/2]");
      double v = lower_lp_linear_term(delta_theta, n, p, beta_n, eta);
      if (v > best) {
        best = v;
        best_eta = eta;
      }
    }
    out.linear = best;
    out.argmax_eta = best_eta;
    out.value = std::max(out.value, best);
  }
  return out;
}

// the loosened p = 1 specialization for linear functionals
inline double loosened_avg_lower(double delta_theta, int n, double beta_n) {
  return sq(pos_part(0.25 * delta_theta - 2.0 * (n + 1.0) * beta_n));
}

inline double lower_avg_sharper_term(double delta_theta, int n, double beta_n, double eta) {
  if (eta < 0.25 || eta > 0.5) throw std::invalid_argument("lower_avg_sharper: eta in [1/4, 1/2]");
  return sq(pos_part((1.0 - 2.0 * eta) * delta_theta - n * beta_n * std::log(1.0 / eta - 1.0) - 6.0 * beta_n));
}

inline double lower_avg_sharper(double delta_theta, int n, double beta_n, const std::vector<double>& eta_grid = {}) {
  std::vector<double> grid = eta_grid.empty() ? linspace(0.25, 0.5, 200) : eta_grid;
  double best = 0.0;
  for (double eta : grid) best = std::max(best, lower_avg_sharper_term(delta_theta, n, beta_n, eta));
  return best;
}

// exact minimax risk for 1-d bounded mean estimation under the worst-case
// constraint: shrinkage error against the binary family vs the unconstrained
// value r^2/(sqrt(n)+1)^2
inline double exact_risk_worst_bounded(int n, double r, double beta_n) {
  if (n < 1 || r <= 0.0 || beta_n < 0.0) throw std::invalid_argument("exact_risk_worst_bounded: bad input");
  double t = beta_n == 0.0 ? kInf : pos_part(2.0 * r / (n * beta_n) - 1.0);
  double constrained = std::isinf(t) ? r * r : sq(t / (1.0 + t)) * r * r;
  return std::max(constrained, r * r / sq(std::sqrt(static_cast<double>(n)) + 1.0));
}

// average-case analogue, sharp up to constants with a cubic threshold factor
inline double rate_avg_bounded(int n, double r, double beta_n) {
  if (n < 1 || r <= 0.0 || beta_n < 0.0) throw std::invalid_argument("rate_avg_bounded: bad input");
  double t = beta_n == 0.0 ? kInf : pos_part(r / (n * beta_n) - 1.0);
  double constrained = std::isinf(t) ? r * r : sq(t / (1.0 + t)) * (t / (1.0 + t)) * r * r;
  return std::max(constrained, r * r / n);
}

// ---- exact finite-sum oracles for the binomial lemmas ----

struct BinomialOracleSpec {
  int n = 10;
  double q = 0.5;
  double p = 1.0;  // the power in the ratio oracle; ignored by the log oracle
};

struct OraclePair {
  double exact = 0.0;
  double bound = 0.0;
};

inline double log_binom_pmf(int n, int k, double q) {
  if (k < 0 || k > n) return -kInf;
  if (q <= 0.0) return k == 0 ? 0.0 : -kInf;
  if (q >= 1.0) return k == n ? 0.0 : -kInf;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(q) +
         (n - k) * std::log1p(-q);
}

// E[ log((n - T1 + T2)/(T2 + 1)) + 1/(T2 + 1) | T1 = t1 ], T2 ~ Binomial(t1, 1/2).
// At t1 = n the t2 = 0 term is log(0) = -inf; that event has positive
// probability, so the value (and the unconditional expectation for q > 0)
// is -inf in exact arithmetic. The upper bound needs this: at small n and
// large q it dips below the finite part of the sum.
inline OraclePair binom_log_oracle_conditional(int n, int t1) {
  if (n < 1 || t1 < 0 || t1 > n) throw std::invalid_argument("binom_log_oracle_conditional: bad input");
  double exact = 0.0;
  for (int t2 = 0; t2 <= t1; ++t2) {
    double w = std::exp(log_binom_pmf(t1, t2, 0.5));
    double term = std::log((n - t1 + t2) / (t2 + 1.0)) + 1.0 / (t2 + 1.0);
    exact += w * term;  // -inf propagates when t1 = n, t2 = 0
  }
  return {exact, std::log(2.0 * n / (t1 + 1.0) - 1.0) + 2.0 / (t1 + 1.0)};
}

inline OraclePair binom_log_oracle(const BinomialOracleSpec& spec) {
  if (spec.n < 1 || spec.n > 60 || spec.q < 0.0 || spec.q > 1.0)
    throw std::invalid_argument("binom_log_oracle: need 1 <= n <= 60, q in [0,1]");
  double exact = 0.0;
  for (int t1 = 0; t1 <= spec.n; ++t1) {
    double w1 = std::exp(log_binom_pmf(spec.n, t1, spec.q));
    if (w1 == 0.0) continue;
    exact += w1 * binom_log_oracle_conditional(spec.n, t1).exact;
  }
  double bound = spec.q == 0.0 ? kInf : std::log(2.0 * spec.n / (spec.q * (spec.n + 1.0)) - 1.0) + 2.0 / (spec.q * (spec.n + 1.0));
  return {exact, bound};
}

// E[(n - T1)^p / (T1 + 1)] vs ((n+1)(1-q) + p/2)^p / ((n+1) q)  ∧  n^p;
// the first branch is the display's ((n+1)(1-q))^p (1 + p/(2(n+1)(1-q)))^p
// factored so q = 1 does not produce 0 * inf
inline OraclePair binom_ratio_oracle(const BinomialOracleSpec& spec) {
  if (spec.n < 1 || spec.n > 200 || spec.q < 0.0 || spec.q > 1.0 || spec.p <= 0.0)
    throw std::invalid_argument("binom_ratio_oracle: need 1 <= n <= 200, q in [0,1], p > 0");
  double exact = 0.0;
  for (int k = 0; k <= spec.n; ++k) {
    double w = std::exp(log_binom_pmf(spec.n, k, spec.q));
    exact += w * std::pow(static_cast<double>(spec.n - k), spec.p) / (k + 1.0);
  }
  double np1 = spec.n + 1.0;
  double first = spec.q == 0.0 ? kInf : std::pow(np1 * (1.0 - spec.q) + spec.p / 2.0, spec.p) / (np1 * spec.q);
  return {exact, std::min(first, std::pow(static_cast<double>(spec.n), spec.p))};
}

// raw binomial moment E[X^m] vs (nq + m/2)^m
inline OraclePair binom_moment_check(int n, double q, double m) {
  if (n < 1 || n > 200 || q < 0.0 || q > 1.0 || m < 1.0)
    throw std::invalid_argument("binom_moment_check: need 1 <= n <= 200, q in [0,1], m >= 1");
  double exact = 0.0;
  for (int k = 0; k <= n; ++k) exact += std::exp(log_binom_pmf(n, k, q)) * std::pow(static_cast<double>(k), m);
  return {exact, std::pow(n * q + m / 2.0, m)};
}

// ---- phase-transition catalog ----

struct PhaseQuery {
  int n = 100;
  double r = 1.0;
  double s = 1.0;  // sparsity for the sparse row; unused elsewhere
};

struct PhaseEntry {
  std::string problem;
  std::string order;      // "worst", "average", or "lp"
  std::string transition;  // "sharp" or "gradual"
  std::string threshold_expr;
  double (*threshold)(const PhaseQuery&);
};

inline std::vector<PhaseEntry> phase_catalog() {
  return {
      {"bounded", "worst", "sharp", "r/n", [](const PhaseQuery& p) { return p.r / p.n; }},
      {"bounded", "average", "sharp", "r/n", [](const PhaseQuery& p) { return p.r / p.n; }},
      {"bounded", "lp", "sharp", "2^(1-1/p) r/n",
       [](const PhaseQuery& p) { return 2.0 * p.r / p.n; }},  // p -> inf envelope of the refined constant
      {"heavy-tail", "worst", "gradual", "r/n .. r n^(1/k-1)", [](const PhaseQuery& p) { return p.r / p.n; }},
      {"heavy-tail", "average", "sharp", "24 r/n", [](const PhaseQuery& p) { return 24.0 * p.r / p.n; }},
      {"sparse", "worst", "sharp", "r sqrt(s)/n", [](const PhaseQuery& p) { return p.r * std::sqrt(p.s) / p.n; }},
      {"nonparametric", "worst", "gradual", "polylog(n)/n .. n^(-1/(2 nu + 1))",
       [](const PhaseQuery& p) { return std::log(static_cast<double>(p.n)) / p.n; }},
      {"nonparametric", "average", "sharp", "log^2(n)/n",
       [](const PhaseQuery& p) { return sq(std::log(static_cast<double>(p.n))) / p.n; }},
  };
}

}  // namespace stable_est
