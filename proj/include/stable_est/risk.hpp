#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stable_est/bounds.hpp"
#include "stable_est/core.hpp"
#include "stable_est/estimators.hpp"
#include "stable_est/rng.hpp"

namespace stable_est {

struct RiskEstimate {
  double mse = 0.0;
  double std_error = 0.0;
  int reps = 0;
  Seed seed;
};

namespace detail {

inline RiskEstimate summarize(const std::vector<double>& sqerr, Seed seed) {
  RiskEstimate est;
  est.reps = static_cast<int>(sqerr.size());
  est.seed = seed;
  double mean = 0.0;
  for (double v : sqerr) mean += v;
  mean /= sqerr.size();
  double var = 0.0;
  for (double v : sqerr) var += sq(v - mean);
  var = sqerr.size() > 1 ? var / (sqerr.size() - 1) : 0.0;
  est.mse = mean;
  est.std_error = std::sqrt(var / sqerr.size());
  return est;
}

// one squared error for a mean-map estimator fed by per-coordinate binomial
// counts instead of materialized datasets
inline double binary_fast_sqerr(const EstimatorHandle& est, const BinaryDist& b, int n, BinomialSampler& sampler,
                                Rng& rng, double theta) {
  long cnt = sampler.draw(rng);
  double xbar = b.r * (2.0 * cnt - n) / n;
  return sq(est.mean_map(xbar) - theta);
}

}  // namespace detail

// Monte Carlo estimate of E || est(D) - theta(P) ||^2 over fresh samples,
// one randomness draw per replicate
inline RiskEstimate mc_risk(const EstimatorHandle& est, const DistributionSpec& dist, int n, int reps, Seed seed) {
  if (reps < 2) throw std::invalid_argument("mc_risk: reps >= 2");
  std::vector<double> tgt = target(dist);
  std::vector<double> sqerr(reps, 0.0);

  if (est.mean_map && std::holds_alternative<BinaryDist>(dist.v)) {
    const auto& b = std::get<BinaryDist>(dist.v);
    BinomialSampler sampler(n, b.prob_plus);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t t) {
      Rng rng(child_seed(seed, t));
      sqerr[t] = detail::binary_fast_sqerr(est, b, n, sampler, rng, tgt[0]);
    });
    return detail::summarize(sqerr, seed);
  }
  if (est.mean_map_vec && std::holds_alternative<SparseMeanDist>(dist.v)) {
    const auto& sp = std::get<SparseMeanDist>(dist.v);
    // one sampler per distinct coordinate mean, shared across replicates
    std::vector<double> means(sp.d, 0.0);
    for (int j = 0; j < sp.d && j < static_cast<int>(sp.active.size()); ++j) means[j] = sp.active[j];
    std::vector<std::unique_ptr<BinomialSampler>> samplers;
    std::vector<int> which(sp.d);
    std::vector<double> seen;
    for (int j = 0; j < sp.d; ++j) {
      auto it = std::find(seen.begin(), seen.end(), means[j]);
      if (it == seen.end()) {
        seen.push_back(means[j]);
        samplers.push_back(std::make_unique<BinomialSampler>(n, 0.5 * (1.0 + means[j] / sp.r)));
        which[j] = static_cast<int>(seen.size()) - 1;
      } else {
        which[j] = static_cast<int>(it - seen.begin());
      }
    }
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t t) {
      Rng rng(child_seed(seed, t));
      std::vector<double> xbar(sp.d);
      for (int j = 0; j < sp.d; ++j) xbar[j] = sp.r * (2.0 * samplers[which[j]]->draw(rng) - n) / n;
      sqerr[t] = sq(l2_dist(est.mean_map_vec(xbar), tgt));
    });
    return detail::summarize(sqerr, seed);
  }

  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t t) {
    Seed rep_seed = child_seed(seed, t);
    Dataset ds = sample(dist, n, rep_seed);
    std::vector<double> out = est.evaluate(ds, child_seed(rep_seed, 1));
    sqerr[t] = sq(l2_dist(out, tgt));
  });
  return detail::summarize(sqerr, seed);
}

// ---- parametrized extremal subfamilies (the lower-bound witness classes) ----

struct ParamFamily {
  std::string id;
  std::vector<double> grid;
  std::function<DistributionSpec(double)> make;
};

inline ParamFamily binary_family(double r, int grid_points = 41) {
  ParamFamily fam;
  fam.id = "binary";
  fam.grid = linspace(-r, r, grid_points);
  fam.make = [r](double theta) {
    DistributionSpec spec;
    spec.v = BinaryDist{r, 0.5 * (1.0 + theta / r)};
    return spec;
  };
  return fam;
}

inline ParamFamily heavy_family(double r, double k, const std::vector<double>& eps_grid) {
  ParamFamily fam;
  fam.id = "heavy-two-point";
  fam.grid = eps_grid;
  fam.make = [r, k](double eps) {
    DistributionSpec spec;
    spec.v = HeavyTwoPointDist{r, k, eps};
    return spec;
  };
  return fam;
}

inline ParamFamily sparse_family(double r, int d, int s, int grid_points = 21) {
  ParamFamily fam;
  fam.id = "sparse-mean";
  fam.grid = linspace(0.0, r, grid_points);
  fam.make = [r, d, s](double t) {
    DistributionSpec spec;
    spec.v = SparseMeanDist{d, s, r, std::vector<double>(s, t)};
    return spec;
  };
  return fam;
}

struct SupRiskResult {
  double sup_mse = 0.0;
  double argmax_param = 0.0;
  double ci_halfwidth = 0.0;  // 2 x std error at the argmax
  std::vector<RiskEstimate> per_point;
};

// max Monte Carlo risk over the family grid, common random numbers across
// grid points so curves inherit the true monotonicity up to noise
inline SupRiskResult sup_risk(const EstimatorHandle& est, const ParamFamily& fam, int n, int reps, Seed seed) {
  if (fam.grid.empty()) throw std::invalid_argument("sup_risk: empty grid");
  SupRiskResult res;
  res.per_point.resize(fam.grid.size());
  for (std::size_t g = 0; g < fam.grid.size(); ++g)
    res.per_point[g] = mc_risk(est, fam.make(fam.grid[g]), n, reps, seed);
  for (std::size_t g = 0; g < fam.grid.size(); ++g) {
    if (res.per_point[g].mse >= res.sup_mse) {
      res.sup_mse = res.per_point[g].mse;
      res.argmax_param = fam.grid[g];
      res.ci_halfwidth = 2.0 * res.per_point[g].std_error;
    }
  }
  return res;
}

// ---- closed-form risk paths (no Monte Carlo noise) ----

// linear shrinkage c * Xbar against the binary +-r family at mean theta:
// bias^2 + variance = (1-c)^2 theta^2 + c^2 (r^2 - theta^2)/n
inline double analytic_shrinkage_risk(double c, int n, double r, double theta) {
  return sq((1.0 - c) * theta) + sq(c) * (r * r - theta * theta) / n;
}

inline SupRiskResult analytic_shrinkage_sup(double c, int n, double r, int theta_points = 10000) {
  SupRiskResult res;
  for (double theta : linspace(-r, r, theta_points)) {
    double v = analytic_shrinkage_risk(c, n, r, theta);
    if (v >= res.sup_mse) {
      res.sup_mse = v;
      res.argmax_param = theta;
    }
  }
  return res;
}

// exact risk of a 1-d mean-map estimator against the binary family: the
// sample mean takes n+1 values, weighted by a binomial window covering all
// but ~1e-20 mass (window residual bounded by (2r)^2 * that mass); the pmf
// runs recursively from one anchored log value
inline double exact_binary_map_risk(const std::function<double(double)>& map, int n, double r, double theta) {
  double p = 0.5 * (1.0 + theta / r);
  p = std::min(1.0, std::max(0.0, p));
  if (p <= 0.0) return sq(map(-r) - theta);
  if (p >= 1.0) return sq(map(r) - theta);
  double sd = std::sqrt(n * p * (1.0 - p));
  int lo = std::max(0, static_cast<int>(std::floor(n * p - 10.0 * sd)) - 1);
  int hi = std::min(n, static_cast<int>(std::ceil(n * p + 10.0 * sd)) + 1);
  double odds = p / (1.0 - p);
  double acc = 0.0;
  double w = std::exp(log_binom_pmf(n, lo, p));
  for (int b = lo; b <= hi; ++b) {
    double xbar = r * (2.0 * b - n) / n;
    acc += w * sq(map(xbar) - theta);
    w *= odds * (n - b) / (b + 1.0);
  }
  return acc;
}

inline SupRiskResult exact_binary_map_sup(const std::function<double(double)>& map, int n, double r,
                                          int theta_points = 10000) {
  SupRiskResult res;
  std::vector<double> grid = linspace(-r, r, theta_points);
  std::vector<double> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { vals[i] = exact_binary_map_risk(map, n, r, grid[i]); });
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (vals[i] >= res.sup_mse) {
      res.sup_mse = vals[i];
      res.argmax_param = grid[i];
    }
  return res;
}

// exact risk of the truncated mean against the heavy two-point family:
// either the spike exceeds the truncation level (estimator collapses to 0,
// risk = theta^2) or the estimate is the unbiased spike average
inline double exact_heavy_truncated_risk(int n, double r, double k, double eps, double rho) {
  double spike = r * std::pow(eps, -1.0 / k);
  double theta = r * std::pow(eps, 1.0 - 1.0 / k);
  if (spike > rho) return sq(theta);
  return sq(spike) * eps * (1.0 - eps) / n;
}

// exact risk of the average-case heavy-tail estimator on the same family,
// by summation over the binomial spike count
inline double exact_heavy_avg_risk(int n, double r, double k, double eps, double beta_n) {
  HeavyTailSpec spec;
  spec.r = r;
  spec.k = k;
  spec.n = n;
  spec.beta_n = beta_n;
  spec.mode = StabilityOrder::average();
  double rho = spec.rho();
  double spike = r * std::pow(eps, -1.0 / k);
  double theta = r * std::pow(eps, 1.0 - 1.0 / k);
  if (!std::isinf(rho) && spike > rho) return sq(theta);
  double outer = std::min(1.0, beta_n * n / (24.0 * r));
  if (eps <= 0.0) return sq(theta);
  if (eps >= 1.0) {
    double inner = std::min(1.0, 2.0 * r / spike);
    return sq(outer * inner * spike - theta);
  }
  double sd = std::sqrt(n * eps * (1.0 - eps));
  int lo = std::max(0, static_cast<int>(std::floor(n * eps - 10.0 * sd)) - 1);
  int hi = std::min(n, static_cast<int>(std::ceil(n * eps + 10.0 * sd)) + 1);
  double odds = eps / (1.0 - eps);
  double acc = 0.0;
  double w = std::exp(log_binom_pmf(n, lo, eps));
  for (int b = lo; b <= hi; ++b) {
    double sum_norm = spike * b;
    double inner = sum_norm <= 0.0 ? 1.0 : std::min(1.0, 2.0 * n * r / sum_norm);
    acc += w * sq(outer * inner * sum_norm / n - theta);
    w *= odds * (n - b) / (b + 1.0);
  }
  return acc;
}

// ---- beta sweeps producing trade-off curves ----

struct SweepConfig {
  std::string problem = "bounded";  // bounded | heavy | sparse | nonparametric
  double p = kInf;
  int n = 200;
  double r = 1.0;
  double k = 2.0;  // heavy-tail moment order
  int s = 5;       // sparsity
  int d = 400;     // ambient dimension
  double nu = 0.5;
  double x0 = 0.3;
  double sigma = 0.2;
  std::vector<double> beta_grid;  // empty -> 30 log-spaced in [r/(50n), 10 r/n]
  int reps = 2000;
  int grid_points = 41;
  Seed seed;
};

struct RiskCurveRow {
  double beta_n = 0.0;
  double sup_mse = 0.0;
  double ci = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  double argmax_param = 0.0;
};

struct RiskCurve {
  std::string problem;
  double p = kInf;
  int n = 0;
  double r = 1.0;
  std::vector<RiskCurveRow> rows;
};

inline EstimatorHandle bounded_estimator_for(double p, int n, double r, double beta_n) {
  if (std::isinf(p)) return exact_worst_bounded(n, r, beta_n);
  if (p == 1.0) return avg_bounded(n, r, beta_n);
  BoundedMeanSpec spec;
  spec.r = r;
  spec.n = n;
  spec.beta_n = beta_n;
  spec.order = make_order(p);
  return shrinkage_bounded(spec, true);
}

inline RiskCurve sweep(const SweepConfig& cfg) {
  RiskCurve curve;
  curve.problem = cfg.problem;
  curve.p = cfg.p;
  curve.n = cfg.n;
  curve.r = cfg.r;
  std::vector<double> betas =
      cfg.beta_grid.empty() ? logspace(cfg.r / (50.0 * cfg.n), 10.0 * cfg.r / cfg.n, 30) : cfg.beta_grid;

  for (double beta : betas) {
    RiskCurveRow row;
    row.beta_n = beta;
    if (cfg.problem == "bounded") {
      EstimatorHandle est = bounded_estimator_for(cfg.p, cfg.n, cfg.r, beta);
      SupRiskResult sup = sup_risk(est, binary_family(cfg.r, cfg.grid_points), cfg.n, cfg.reps, cfg.seed);
      row.sup_mse = sup.sup_mse;
      row.ci = sup.ci_halfwidth;
      row.argmax_param = sup.argmax_param;
      if (std::isinf(cfg.p)) {
        row.bound_lower = row.bound_upper = exact_risk_worst_bounded(cfg.n, cfg.r, beta);
      } else if (cfg.p == 1.0) {
        row.bound_lower = row.bound_upper = rate_avg_bounded(cfg.n, cfg.r, beta);
      } else {
        row.bound_lower = rate_avg_bounded(cfg.n, cfg.r, beta);
        row.bound_upper = exact_risk_worst_bounded(cfg.n, cfg.r, beta);
      }
    } else if (cfg.problem == "heavy") {
      HeavyTailSpec spec;
      spec.r = cfg.r;
      spec.k = cfg.k;
      spec.n = cfg.n;
      spec.beta_n = beta;
      spec.mode = std::isinf(cfg.p) ? StabilityOrder::worst() : StabilityOrder::average();
      std::vector<double> eps_grid = logspace(1.0 / (cfg.n * static_cast<double>(cfg.n)), 0.5, 600);
      double best = 0.0, best_eps = eps_grid.front();
      for (double eps : eps_grid) {
        double v = std::isinf(cfg.p) ? exact_heavy_truncated_risk(cfg.n, cfg.r, cfg.k, eps, spec.rho())
                                     : exact_heavy_avg_risk(cfg.n, cfg.r, cfg.k, eps, beta);
        if (v > best) {
          best = v;
          best_eps = eps;
        }
      }
      row.sup_mse = best;
      row.argmax_param = best_eps;
      row.ci = 0.0;  // closed form, no sampling noise
      double finite_term = cfg.r * cfg.r / std::pow(static_cast<double>(cfg.n), std::min(1.0, 2.0 * (1.0 - 1.0 / cfg.k)));
      if (std::isinf(cfg.p)) {
        double constrained = std::min(std::pow(cfg.r, 2.0 * cfg.k) / std::pow(cfg.n * beta, 2.0 * (cfg.k - 1.0)),
                                      cfg.r * cfg.r);
        row.bound_lower = row.bound_upper = constrained + finite_term;
      } else {
        row.bound_lower = row.bound_upper = beta >= 24.0 * cfg.r / cfg.n ? finite_term : cfg.r * cfg.r;
      }
    } else if (cfg.problem == "sparse") {
      SparseMeanSpec spec;
      spec.r = cfg.r;
      spec.s = cfg.s;
      spec.d = cfg.d;
      spec.n = cfg.n;
      spec.beta_n = beta;
      SupRiskResult sup = sup_risk(sparse_soft(spec), sparse_family(cfg.r, cfg.d, cfg.s, std::min(cfg.grid_points, 21)),
                                   cfg.n, cfg.reps, cfg.seed);
      row.sup_mse = sup.sup_mse;
      row.ci = sup.ci_halfwidth;
      row.argmax_param = sup.argmax_param;
      double rate = cfg.r * cfg.r * cfg.s * std::log(4.0 * cfg.d) / cfg.n;
      row.bound_lower = rate;
      row.bound_upper = 144.0 * rate;
    } else if (cfg.problem == "nonparametric") {
      WaveletEstimatorSpec spec;
      spec.x0 = cfg.x0;
      spec.nu = cfg.nu;
      spec.n = cfg.n;
      spec.beta_n = beta;
      spec.sigma_assumed = cfg.sigma;
      spec.mode = std::isinf(cfg.p) ? WaveletMode::worst : WaveletMode::average;
      auto fixtures = besov_test_functions(cfg.nu, 1, spec.basis.regularity);
      spec.m_f_assumed = fixtures[0].sup_norm;
      EstimatorHandle est = wavelet_estimator(spec);
      DistributionSpec dist;
      dist.v = RegressionDist{fixtures[0].f, cfg.sigma, cfg.x0};
      RiskEstimate est_risk = mc_risk(est, dist, cfg.n, cfg.reps, cfg.seed);
      row.sup_mse = est_risk.mse;
      row.ci = 2.0 * est_risk.std_error;
      row.argmax_param = 0.0;
      double baseline_rate = std::pow(static_cast<double>(cfg.n), -2.0 * cfg.nu / (2.0 * cfg.nu + 1.0));
      if (std::isinf(cfg.p)) {
        double ln_n = std::log(static_cast<double>(cfg.n));
        double constrained = std::pow(cfg.n * beta, -2.0 * cfg.nu) * std::pow(ln_n, std::min(cfg.nu, 1.0));
        row.bound_lower = baseline_rate;
        row.bound_upper = constrained + baseline_rate;
      } else {
        row.bound_lower = row.bound_upper = beta >= spec.c_star_eff() * sq(std::log(static_cast<double>(cfg.n))) / cfg.n
                                                ? baseline_rate
                                                : 1.0;
      }
    } else {
      throw std::invalid_argument("sweep: unknown problem '" + cfg.problem + "'");
    }
    curve.rows.push_back(row);
  }
  return curve;
}

struct SlopeFit {
  double slope = 0.0;
  double r2 = 1.0;
};

// least squares on (log x, log y)
inline SlopeFit slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) throw std::invalid_argument("slope_fit: need >= 3 paired points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0 || ys[i] <= 0.0) throw std::invalid_argument("nonpositive-values");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += sq(lx[i] - mx);
    syy += sq(ly[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxx == 0.0 ? 0.0 : sxy / sxx;
  double ss_res = syy - (sxx == 0.0 ? 0.0 : sxy * sxy / sxx);
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

// ---- curve CSV round trip (the sweep subcommand's schema) ----

inline std::string order_to_string(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os << std::setprecision(17) << p;
  return os.str();
}

inline double order_from_string(const std::string& s) {
  if (s == "inf") return kInf;
  return std::stod(s);
}

inline void write_curve_csv(const RiskCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curve_csv: cannot open " + path);
  out << std::setprecision(17);
  out << "# schema_version=1\n";
  out << "# problem=" << curve.problem << " p=" << order_to_string(curve.p) << " n=" << curve.n << " r=" << curve.r
      << "\n";
  out << "beta,sup_mse,ci,bound_lower,bound_upper,argmax_param\n";
  for (const auto& row : curve.rows)
    out << row.beta_n << ',' << row.sup_mse << ',' << row.ci << ',' << row.bound_lower << ',' << row.bound_upper << ','
        << row.argmax_param << "\n";
}

inline RiskCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_curve_csv: cannot open " + path);
  RiskCurve curve;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "problem") curve.problem = val;
        if (key == "p") curve.p = order_from_string(val);
        if (key == "n") curve.n = std::stoi(val);
        if (key == "r") curve.r = std::stod(val);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "beta,sup_mse,ci,bound_lower,bound_upper,argmax_param")
        throw std::runtime_error("schema-mismatch: unexpected curve header");
      header_seen = true;
      continue;
    }
    std::istringstream row_in(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row_in, cell, ',')) cells.push_back(std::stod(cell));
    if (cells.size() != 6) throw std::runtime_error("schema-mismatch: wrong column count");
    curve.rows.push_back({cells[0], cells[1], cells[2], cells[3], cells[4], cells[5]});
  }
  if (!header_seen) throw std::runtime_error("schema-mismatch: missing curve header");
  return curve;
}

}  // namespace stable_est
