#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stable_est/bounds.hpp"
#include "stable_est/core.hpp"
#include "stable_est/rng.hpp"

namespace stable_est {

struct PrivacyBudget {
  double eps = 1.0;
  void validate() const {
    if (!(eps > 0.0) || std::isinf(eps)) throw std::invalid_argument("PrivacyBudget: eps finite positive");
  }
};

// additive Laplace noise at scale beta_n / eps on top of a worst-case
// certified scalar estimator
inline EstimatorHandle laplace_mechanism(const EstimatorHandle& base, PrivacyBudget budget) {
  budget.validate();
  if (!base.certified || !std::isinf(base.certified->p)) throw std::invalid_argument("uncertified-base");
  if (base.target_dim != 1) throw std::invalid_argument("multi-dim-unsupported");
  double scale = base.certified->beta / budget.eps;
  EstimatorHandle mech;
  mech.id = base.id + "+laplace";
  mech.target_dim = 1;
  mech.randomized = true;
  mech.seed_average_reps = 64;
  // coupled-seed convention: equal seeds draw equal noise, so the certified
  // stability of the base carries over to the mechanism
  mech.certified = base.certified;
  auto base_eval = base.evaluate;
  mech.evaluate = [base_eval, scale](const Dataset& ds, Seed seed) {
    std::vector<double> out = base_eval(ds, child_seed(seed, 0));
    Rng rng(child_seed(seed, 1));
    out[0] += rng.laplace(scale);
    return out;
  };
  return mech;
}

struct DpStability {
  double beta = 0.0;             // r (e^eps - 1), always valid
  bool small_eps = false;        // eps < 1
  double simplified_beta = 0.0;  // 2 r eps, a valid bound only when small_eps
};

inline DpStability dp_to_stability(PrivacyBudget budget, double r) {
  budget.validate();
  if (!(r > 0.0)) throw std::invalid_argument("dp_to_stability: r > 0");
  DpStability conv;
  conv.beta = r * std::expm1(budget.eps);
  conv.small_eps = budget.eps < 1.0;
  conv.simplified_beta = 2.0 * r * budget.eps;
  return conv;
}

// ---- trade-off curve conversions ----

struct BoundCurvePoint {
  double x = 0.0;      // eps for the privacy curve, beta_n for the stability curve
  double lower = 0.0;
  double upper = 0.0;
  double arg = 0.0;    // optimizer: beta_n attaining the upper inf / eps attaining the lower sup
};

struct BoundCurvePair {
  std::string problem;
  bool rate_only = false;  // heavy-tail feed uses a constants-1 rate expression
  std::vector<BoundCurvePoint> dp;         // risk under an eps-privacy constraint
  std::vector<BoundCurvePoint> stability;  // risk under a beta_n-stability constraint
};

namespace detail {

// the worst-case trade-off feeding the conversions: exact for the bounded
// family, rate expression with unit constants for the heavy-tail family
inline double worst_curve_value(const std::string& problem, double k, int n, double r, double beta_n) {
  if (problem == "bounded") return exact_risk_worst_bounded(n, r, beta_n);
  if (problem == "heavy") {
    double finite_term = r * r / std::pow(static_cast<double>(n), std::min(1.0, 2.0 - 2.0 / k));
    if (beta_n <= 0.0) return r * r + finite_term;
    double constrained = std::min(std::pow(r, 2.0 * k) / std::pow(n * beta_n, 2.0 * (k - 1.0)), r * r);
    return constrained + finite_term;
  }
  throw std::invalid_argument("prop1_curves: unknown problem '" + problem + "'");
}

}  // namespace detail

// upper/lower envelopes for the privacy curve from the stability curve and
// back, keeping only constant-free inequalities so orderings are guaranteed
inline BoundCurvePair prop1_curves(const std::string& problem, double k, int n, double r,
                                   const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("prop1_curves: empty grid");
  BoundCurvePair pair;
  pair.problem = problem;
  pair.rate_only = problem == "heavy";
  auto r_inf = [&](double beta) { return detail::worst_curve_value(problem, k, n, r, beta); };

  std::vector<double> beta_scan = logspace(r / (1000.0 * n), 10.0 * r, 400);
  std::vector<double> eps_scan = logspace(0.01 / n, 10.0, 400);

  auto dp_upper = [&](double eps) {
    double best = kInf, arg = beta_scan.front();
    for (double b : beta_scan) {
      double v = r_inf(b) + 2.0 * b * b / (eps * eps);
      if (v < best) {
        best = v;
        arg = b;
      }
    }
    return std::pair<double, double>{best, arg};
  };
  auto dp_lower = [&](double eps) { return r_inf(r * std::expm1(eps)); };

  for (double eps : grid) {
    BoundCurvePoint pt;
    pt.x = eps;
    auto [up, arg] = dp_upper(eps);
    pt.upper = up;
    pt.arg = arg;
    pt.lower = dp_lower(eps);
    pair.dp.push_back(pt);
  }
  for (double beta : grid) {
    BoundCurvePoint pt;
    pt.x = beta;
    pt.upper = dp_upper(std::log1p(beta / r)).first;
    double best = 0.0, arg = eps_scan.front();
    for (double eps : eps_scan) {
      double v = dp_lower(eps) - 2.0 * beta * beta / (eps * eps);
      if (v > best) {
        best = v;
        arg = eps;
      }
    }
    pt.lower = best;
    pt.arg = arg;
    pair.stability.push_back(pt);
  }
  return pair;
}

// ---- empirical differential privacy audit ----

struct AuditConfig {
  int bins = 60;
  int reps = 100000;
  int min_count = 20;         // bins with fewer pooled hits are skipped
  double slack_factor = 10.0;  // statistical allowance multiplier
};

struct DpAuditReport {
  double eps = 0.0;
  double max_log_ratio = 0.0;
  double slack = 0.0;
  int bins_used = 0;
  int reps = 0;
  bool pass = false;
};

// binned histogram check of the privacy inequality on one neighboring pair;
// both runs replay the same seed stream, which leaves the marginal law of
// each run untouched and makes identical inputs compare exactly
inline DpAuditReport dp_audit(const EstimatorHandle& mech, const Dataset& ds1, const Dataset& ds2,
                              PrivacyBudget budget, AuditConfig cfg, Seed seed) {
  budget.validate();
  if (mech.target_dim != 1) throw std::invalid_argument("dp_audit: 1-d output required");
  if (cfg.reps < 1000) throw std::invalid_argument("insufficient-reps");
  if (hamming_distance(ds1, ds2) > 1) throw std::invalid_argument("dp_audit: datasets must be neighbors");

  std::vector<double> out1(cfg.reps), out2(cfg.reps);
  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t t) {
    Seed rep_seed = child_seed(seed, t);
    out1[t] = mech.evaluate(ds1, rep_seed)[0];
    out2[t] = mech.evaluate(ds2, rep_seed)[0];
  });

  double lo = kInf, hi = -kInf;
  for (double v : out1) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : out2) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  DpAuditReport report;
  report.eps = budget.eps;
  report.reps = cfg.reps;
  report.slack = cfg.slack_factor * std::sqrt(static_cast<double>(cfg.bins) / cfg.reps);
  if (hi <= lo) {  // all outputs identical
    report.bins_used = 1;
    report.max_log_ratio = 0.0;
    report.pass = true;
    return report;
  }
  double width = (hi - lo) / cfg.bins;
  std::vector<long> c1(cfg.bins, 0), c2(cfg.bins, 0);
  auto bin_of = [&](double v) {
    int b = static_cast<int>((v - lo) / width);
    return std::min(std::max(b, 0), cfg.bins - 1);
  };
  for (double v : out1) ++c1[bin_of(v)];
  for (double v : out2) ++c2[bin_of(v)];
  for (int b = 0; b < cfg.bins; ++b) {
    if (c1[b] + c2[b] < cfg.min_count) continue;
    ++report.bins_used;
    double ratio = std::fabs(std::log((c1[b] + 0.5) / (c2[b] + 0.5)));
    report.max_log_ratio = std::max(report.max_log_ratio, ratio);
  }
  report.pass = report.max_log_ratio <= budget.eps + report.slack;
  return report;
}

// ---- distribution checks for the mechanism noise ----

inline double laplace_cdf(double x, double scale) {
  return x < 0.0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

// one-sample Kolmogorov-Smirnov statistic against a supplied CDF
inline double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  double stat = 0.0;
  std::size_t m = draws.size();
  for (std::size_t i = 0; i < m; ++i) {
    double f = cdf(draws[i]);
    stat = std::max(stat, std::max(f - static_cast<double>(i) / m, (i + 1.0) / m - f));
  }
  return stat;
}

}  // namespace stable_est
