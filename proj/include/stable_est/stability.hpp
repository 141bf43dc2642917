#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "stable_est/core.hpp"

namespace stable_est {

struct StabilityOrder {
  double p = kInf;

  bool infinite() const { return std::isinf(p); }
  static StabilityOrder worst() { return {kInf}; }
  static StabilityOrder average() { return {1.0}; }
};

inline StabilityOrder make_order(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("stability order requires p >= 1");
  return {p};
}

struct SearchBudget {
  int random_restarts = 8;
  int ascent_iters = 3;
  int corner_enumeration_limit = 12;  // max n+1 for exhaustive +-r enumeration
  int per_coordinate_grid = 5;

  void validate() const {
    if (random_restarts < 1 || ascent_iters < 1 || corner_enumeration_limit < 1 || per_coordinate_grid < 1)
      throw std::invalid_argument("SearchBudget: all fields must be positive");
  }
};

struct SearchDomain {
  int n = 10;
  int d = 1;
  double r = 1.0;
  NormKind norm_kind = NormKind::l2;
  DatasetKind kind = DatasetKind::vector_sample;
  std::vector<std::pair<double, double>> box;  // per-coordinate bounds; overrides the r-ball when non-empty
};

struct StabilityReport {
  StabilityOrder order;
  double found_sup = 0.0;
  Dataset witness;                                         // size n+1 when p < inf
  std::optional<std::pair<Dataset, Dataset>> witness_pair;  // neighbor pair when p = inf
  std::optional<double> budget_claim;
  bool budget_satisfied = true;
  long evaluations = 0;
};

// E_xi || est(ds1) - est(ds2) || for datasets at Hamming distance <= 1,
// with the internal randomness coupled through a shared seed
inline double worst_case_gap(const EstimatorHandle& est, const Dataset& ds1, const Dataset& ds2, Seed seed = {}) {
  if (hamming_distance(ds1, ds2) > 1) throw std::invalid_argument("hamming-distance-exceeded");
  if (!est.randomized) return l2_dist(est.evaluate(ds1, seed), est.evaluate(ds2, seed));
  double acc = 0.0;
  for (int m = 0; m < est.seed_average_reps; ++m) {
    Seed s = child_seed(seed, m);
    acc += l2_dist(est.evaluate(ds1, s), est.evaluate(ds2, s));
  }
  return acc / est.seed_average_reps;
}

namespace detail {

// leave-one-out outputs for a size-(n+1) dataset; the mean-only fast path
// avoids n+1 full passes when the estimator is a function of the sample mean
inline std::vector<std::vector<double>> loo_outputs(const EstimatorHandle& est, const Dataset& ds, Seed seed) {
  std::size_t m = ds.size();
  std::vector<std::vector<double>> outs(m);
  if (est.mean_map_vec && !est.randomized) {
    std::vector<double> total(ds.dim(), 0.0);
    for (const auto& p : ds.points)
      for (std::size_t j = 0; j < total.size(); ++j) total[j] += p[j];
    std::vector<double> loo_mean(ds.dim());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < total.size(); ++j) loo_mean[j] = (total[j] - ds.points[i][j]) / (m - 1);
      outs[i] = est.mean_map_vec(loo_mean);
    }
    return outs;
  }
  for (std::size_t i = 0; i < m; ++i) outs[i] = expected_output(est, drop_point(ds, i), seed);
  return outs;
}

inline double lp_from_outputs(const std::vector<std::vector<double>>& outs, StabilityOrder order) {
  std::size_t m = outs.size();
  if (order.infinite()) {
    double mx = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) mx = std::max(mx, l2_dist(outs[i], outs[j]));
    return mx;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) s += 2.0 * std::pow(l2_dist(outs[i], outs[j]), order.p);
  return std::pow(s / (static_cast<double>(m) * static_cast<double>(m)), 1.0 / order.p);
}

}  // namespace detail

// the inner leave-one-out statistic for a fixed size-(n+1) dataset:
// { (n+1)^{-2} sum_{i,j} E || est(D minus i) - est(D minus j) ||^p }^{1/p},
// max over pairs at p = inf
inline double lp_statistic(const EstimatorHandle& est, const Dataset& ds, StabilityOrder order, Seed seed = {}) {
  if (ds.size() < 2) throw std::invalid_argument("lp_statistic: need n+1 >= 2");
  if (!est.randomized || order.infinite()) {
    // for randomized estimators at p = inf we take max_{i,j} of E_xi distances
    if (est.randomized) {
      std::size_t m = ds.size();
      std::vector<Dataset> loo;
      loo.reserve(m);
      for (std::size_t i = 0; i < m; ++i) loo.push_back(drop_point(ds, i));
      double mx = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) mx = std::max(mx, worst_case_gap(est, loo[i], loo[j], seed));
      return mx;
    }
    return detail::lp_from_outputs(detail::loo_outputs(est, ds, seed), order);
  }
  // randomized, p < inf: average the pairwise p-th powers over coupled seeds
  std::size_t m = ds.size();
  std::vector<Dataset> loo;
  loo.reserve(m);
  for (std::size_t i = 0; i < m; ++i) loo.push_back(drop_point(ds, i));
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      double acc = 0.0;
      for (int rep = 0; rep < est.seed_average_reps; ++rep) {
        Seed sd = child_seed(seed, rep);
        acc += std::pow(l2_dist(est.evaluate(loo[i], sd), est.evaluate(loo[j], sd)), order.p);
      }
      s += 2.0 * acc / est.seed_average_reps;
    }
  return std::pow(s / (static_cast<double>(m) * static_cast<double>(m)), 1.0 / order.p);
}

// exact supremum of the leave-one-out statistic for the 1-d sample mean over
// the +-r ball; the extreme datasets sit at the corners, reducing the search
// to the count of +r points
inline double closed_form_mean_stability(int n, double r, StabilityOrder order) {
  if (n < 1 || r <= 0.0) throw std::invalid_argument("closed_form_mean_stability: need n >= 1, r > 0");
  if (order.infinite()) return 2.0 * r / n;
  double best = 0.0;
  double np1 = n + 1.0;
  for (int m = 0; m <= n + 1; ++m) {
    double val = 2.0 * m * (n + 1.0 - m) * std::pow(2.0 * r, order.p) / (np1 * np1 * std::pow(static_cast<double>(n), order.p));
    best = std::max(best, val);
  }
  return std::pow(best, 1.0 / order.p);
}

// Drop-one discrepancy against the aggregated output (mean of the n+1
// leave-one-out estimates). Returns (pairwise statistic, drop-one statistic);
// the two are equivalent up to a factor of two: b <= a <= 2b.
inline std::pair<double, double> two_notion_gap_check(const EstimatorHandle& est, const Dataset& ds, Seed seed = {}) {
  auto outs = detail::loo_outputs(est, ds, seed);
  std::size_t m = outs.size();
  double a = detail::lp_from_outputs(outs, StabilityOrder::average());
  std::vector<double> centroid(outs[0].size(), 0.0);
  for (const auto& o : outs)
    for (std::size_t j = 0; j < centroid.size(); ++j) centroid[j] += o[j];
  for (double& x : centroid) x /= static_cast<double>(m);
  double b = 0.0;
  for (const auto& o : outs) b += l2_dist(o, centroid);
  b /= static_cast<double>(m);
  return {a, b};
}

namespace detail {

inline std::vector<double> random_domain_point(Rng& rng, const SearchDomain& dom) {
  std::vector<double> p(dom.d);
  if (!dom.box.empty()) {
    for (int c = 0; c < dom.d; ++c) p[c] = rng.uniform(dom.box[c].first, dom.box[c].second);
    return p;
  }
  if (dom.d == 1) {
    p[0] = rng.uniform(-dom.r, dom.r);
    return p;
  }
  if (dom.norm_kind == NormKind::linf) {
    for (double& x : p) x = rng.uniform(-dom.r, dom.r);
    return p;
  }
  // direction times radius, plus occasional axis corners which carry the
  // extreme configurations for coordinatewise estimators
  if (rng.next_unit() < 0.25) {
    std::fill(p.begin(), p.end(), 0.0);
    std::size_t axis = rng.next_u64() % dom.d;
    p[axis] = rng.bernoulli(0.5) ? dom.r : -dom.r;
    return p;
  }
  double norm2 = 0.0;
  for (double& x : p) {
    x = rng.normal();
    norm2 += x * x;
  }
  double scale = dom.r * std::pow(rng.next_unit_open(), 1.0 / dom.d) / std::sqrt(norm2);
  for (double& x : p) x *= scale;
  return p;
}

inline std::vector<double> coordinate_candidates(Rng& rng, const SearchDomain& dom, int grid, int coord) {
  std::vector<double> cands;
  double lo = dom.box.empty() ? -dom.r : dom.box[coord].first;
  double hi = dom.box.empty() ? dom.r : dom.box[coord].second;
  cands.push_back(lo);
  cands.push_back(hi);
  cands.push_back(0.5 * (lo + hi));
  for (int g = 0; g < grid; ++g) cands.push_back(rng.uniform(lo, hi));
  return cands;
}

inline void project_into_domain(std::vector<double>& p, const SearchDomain& dom) {
  if (!dom.box.empty()) {
    for (int c = 0; c < dom.d; ++c) p[c] = std::min(std::max(p[c], dom.box[c].first), dom.box[c].second);
    return;
  }
  if (dom.norm_kind == NormKind::linf || dom.d == 1) {
    for (double& x : p) x = clip(x, dom.r);
    return;
  }
  double nrm = l2_norm(p);
  if (nrm > dom.r)
    for (double& x : p) x *= dom.r / nrm;
}

}  // namespace detail

// Adversarial search for the stability supremum. The result is a lower
// estimate with a reproducible witness: global search over a black-box
// estimator cannot certify the supremum, only exhibit bad configurations.
inline StabilityReport certify_sup(const EstimatorHandle& est, const SearchDomain& dom, StabilityOrder order,
                                   const SearchBudget& budget, Seed seed = {},
                                   std::optional<double> budget_claim = std::nullopt) {
  budget.validate();
  if (!std::isfinite(dom.r) || dom.r <= 0.0) throw std::invalid_argument("unbounded-domain: finite search radius required");
  StabilityReport rep;
  rep.order = order;
  rep.budget_claim = budget_claim;
  long evals = 0;

  auto make_dataset = [&](const std::vector<std::vector<double>>& pts) {
    Dataset ds;
    ds.points = pts;
    ds.domain_radius = dom.box.empty() ? dom.r : kInf;
    ds.norm_kind = dom.norm_kind;
    ds.kind = dom.kind;
    return ds;
  };
  bool corner_init = dom.box.empty() && dom.d == 1;
  // improvements below 1e-12 relative are floating-point noise; ignoring them
  // keeps exact corner witnesses from being displaced by rounding artifacts
  auto improves = [](double v, double cur_best) { return v > cur_best + 1e-12 * std::fabs(cur_best); };

  if (!order.infinite()) {
    // state: a size-(n+1) dataset
    Dataset best_ds;
    double best = -1.0;
    auto consider = [&](const Dataset& ds) {
      double v = lp_statistic(est, ds, order, seed);
      ++evals;
      if (improves(v, best)) {
        best = v;
        best_ds = ds;
      }
    };
    if (corner_init && dom.n + 1 <= budget.corner_enumeration_limit) {
      // exchangeable corner sweep: only the count of +r points matters
      for (int m = 0; m <= dom.n + 1; ++m) {
        std::vector<std::vector<double>> pts(dom.n + 1);
        for (int i = 0; i <= dom.n; ++i) pts[i] = {i < m ? dom.r : -dom.r};
        consider(make_dataset(pts));
      }
    }
    for (int restart = 0; restart < budget.random_restarts; ++restart) {
      Rng rng(child_seed(seed, 1000 + restart));
      std::vector<std::vector<double>> pts(dom.n + 1);
      for (auto& p : pts) p = restart % 2 == 0 && corner_init
                                  ? std::vector<double>{rng.bernoulli(0.5) ? dom.r : -dom.r}
                                  : detail::random_domain_point(rng, dom);
      Dataset cur = make_dataset(pts);
      double cur_val = lp_statistic(est, cur, order, seed);
      ++evals;
      for (int pass = 0; pass < budget.ascent_iters; ++pass) {
        for (int i = 0; i <= dom.n; ++i) {
          for (int c = 0; c < dom.d; ++c) {
            for (double cand : detail::coordinate_candidates(rng, dom, budget.per_coordinate_grid, c)) {
              auto trial_point = cur.points[i];
              trial_point[c] = cand;
              detail::project_into_domain(trial_point, dom);
              Dataset trial = cur;
              trial.points[i] = trial_point;
              double v = lp_statistic(est, trial, order, seed);
              ++evals;
              if (v > cur_val) {
                cur_val = v;
                cur = std::move(trial);
              }
            }
          }
        }
      }
      if (improves(cur_val, best)) {
        best = cur_val;
        best_ds = cur;
      }
    }
    rep.found_sup = std::max(best, 0.0);
    rep.witness = best_ds;
  } else {
    // state: a size-n dataset plus one replaced point
    Dataset best_a, best_b;
    double best = -1.0;
    auto consider = [&](const Dataset& a, const Dataset& b) {
      double v = worst_case_gap(est, a, b, seed);
      ++evals;
      if (improves(v, best)) {
        best = v;
        best_a = a;
        best_b = b;
      }
    };
    if (corner_init && dom.n + 1 <= budget.corner_enumeration_limit) {
      for (int m = 0; m <= dom.n; ++m) {
        std::vector<std::vector<double>> pts(dom.n);
        for (int i = 0; i < dom.n; ++i) pts[i] = {i < m ? dom.r : -dom.r};
        Dataset base = make_dataset(pts);
        for (std::size_t i : {std::size_t{0}, static_cast<std::size_t>(dom.n - 1)}) {
          Dataset flipped = replace_point(base, i, {-base.points[i][0]});
          consider(base, flipped);
        }
      }
    }
    for (int restart = 0; restart < budget.random_restarts; ++restart) {
      Rng rng(child_seed(seed, 2000 + restart));
      std::vector<std::vector<double>> pts(dom.n);
      for (auto& p : pts) p = restart % 2 == 0 && corner_init
                                  ? std::vector<double>{rng.bernoulli(0.5) ? dom.r : -dom.r}
                                  : detail::random_domain_point(rng, dom);
      Dataset base = make_dataset(pts);
      std::size_t idx = 0;
      std::vector<double> repl = detail::random_domain_point(rng, dom);
      auto gap_of = [&](const Dataset& b, std::size_t i, const std::vector<double>& x) {
        Dataset nb = replace_point(b, i, x);
        double v = worst_case_gap(est, b, nb, seed);
        ++evals;
        return v;
      };
      double cur_val = gap_of(base, idx, repl);
      for (int pass = 0; pass < budget.ascent_iters; ++pass) {
        // move the replaced point
        for (int c = 0; c < dom.d; ++c) {
          for (double cand0 : detail::coordinate_candidates(rng, dom, budget.per_coordinate_grid, c)) {
            auto trial = repl;
            trial[c] = cand0;
            detail::project_into_domain(trial, dom);
            double v = gap_of(base, idx, trial);
            if (v > cur_val) {
              cur_val = v;
              repl = trial;
            }
          }
        }
        // try a different replacement index
        for (std::size_t i = 0; i < base.size(); ++i) {
          double v = gap_of(base, i, repl);
          if (v > cur_val) {
            cur_val = v;
            idx = i;
          }
        }
        // move the base points
        for (std::size_t i = 0; i < base.size(); ++i) {
          for (int c = 0; c < dom.d; ++c) {
            for (double cand : detail::coordinate_candidates(rng, dom, budget.per_coordinate_grid, c)) {
              auto trial_point = base.points[i];
              trial_point[c] = cand;
              detail::project_into_domain(trial_point, dom);
              Dataset trial = base;
              trial.points[i] = trial_point;
              double v = gap_of(trial, idx, repl);
              if (v > cur_val) {
                cur_val = v;
                base = std::move(trial);
              }
            }
          }
        }
      }
      consider(base, replace_point(base, idx, repl));
    }
    rep.found_sup = std::max(best, 0.0);
    rep.witness = best_a;
    rep.witness_pair = std::make_pair(best_a, best_b);
  }

  rep.evaluations = evals;
  if (budget_claim)
    rep.budget_satisfied = rep.found_sup <= *budget_claim * (1.0 + 1e-9);
  return rep;
}

// exhaustive +-r sign-pattern oracle (d = 1); exponential, test sizes only
inline double brute_force_corner_sup(const EstimatorHandle& est, int n, double r, StabilityOrder order, Seed seed = {}) {
  if (n + 1 > 24) throw std::invalid_argument("brute_force_corner_sup: too many corners");
  double best = 0.0;
  if (!order.infinite()) {
    for (std::uint64_t mask = 0; mask < (1ull << (n + 1)); ++mask) {
      Dataset ds;
      ds.domain_radius = r;
      for (int i = 0; i <= n; ++i) ds.points.push_back({(mask >> i) & 1 ? r : -r});
      best = std::max(best, lp_statistic(est, ds, order, seed));
    }
    return best;
  }
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    Dataset ds;
    ds.domain_radius = r;
    for (int i = 0; i < n; ++i) ds.points.push_back({(mask >> i) & 1 ? r : -r});
    for (int i = 0; i < n; ++i) {
      Dataset nb = replace_point(ds, i, {-ds.points[i][0]});
      best = std::max(best, worst_case_gap(est, ds, nb, seed));
    }
  }
  return best;
}

}  // namespace stable_est
