#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "stable_est/common.hpp"
#include "stable_est/rng.hpp"

namespace stable_est {

enum class DatasetKind { vector_sample, regression_pairs };
enum class NormKind { l2, linf };

// A fixed sample of n points in R^d. Regression pairs store (x, y) rows with
// x in [0,1]. The norm flag records which ball the domain radius bounds.
struct Dataset {
  std::vector<std::vector<double>> points;
  double domain_radius = kInf;
  DatasetKind kind = DatasetKind::vector_sample;
  NormKind norm_kind = NormKind::l2;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points[0].size(); }
};

inline void validate_point(const Dataset& ds, const std::vector<double>& p) {
  if (!ds.points.empty() && p.size() != ds.dim()) throw std::invalid_argument("point dimension mismatch");
  for (double x : p)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite coordinate");
  if (ds.kind == DatasetKind::vector_sample && std::isfinite(ds.domain_radius)) {
    double nrm = ds.norm_kind == NormKind::l2 ? l2_norm(p) : linf_norm(p);
    if (nrm > ds.domain_radius * (1.0 + 1e-12)) throw std::invalid_argument("point outside domain ball");
  }
}

inline Dataset replace_point(const Dataset& ds, std::size_t index, std::vector<double> new_point) {
  if (index >= ds.size()) throw std::out_of_range("replace_point: index out of range");
  validate_point(ds, new_point);
  Dataset out = ds;
  out.points[index] = std::move(new_point);
  return out;
}

inline Dataset drop_point(const Dataset& ds, std::size_t index) {
  if (ds.size() < 2) throw std::invalid_argument("drop_point: need at least two points");
  if (index >= ds.size()) throw std::out_of_range("drop_point: index out of range");
  Dataset out = ds;
  out.points.erase(out.points.begin() + static_cast<std::ptrdiff_t>(index));
  return out;
}

inline std::size_t hamming_distance(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: size mismatch");
  std::size_t h = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.points[i] != b.points[i]) ++h;
  return h;
}

inline std::vector<double> sample_mean(const Dataset& ds) {
  if (ds.size() == 0) throw std::invalid_argument("sample_mean: empty dataset");
  std::vector<double> m(ds.dim(), 0.0);
  for (const auto& p : ds.points)
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += p[j];
  for (double& x : m) x /= static_cast<double>(ds.size());
  return m;
}

// ---- distribution specifications ----

struct DiscreteDist {
  std::vector<std::vector<double>> support;
  std::vector<double> probs;
};

// P(X = +r) = prob_plus, P(X = -r) = 1 - prob_plus; mean r(2p-1)
struct BinaryDist {
  double r = 1.0;
  double prob_plus = 0.5;
};

// mass 1-eps at 0, mass eps at r * eps^{-1/k}; k-th moment exactly r^k
struct HeavyTwoPointDist {
  double r = 1.0;
  double k = 2.0;
  double eps = 0.1;
};

// coordinates independent, +-r valued; mean theta_j = active[j] for j < s, 0 after
struct SparseMeanDist {
  int d = 2;
  int s = 1;
  double r = 1.0;
  std::vector<double> active;
};

struct RegressionDist {
  std::function<double(double)> f;
  double sigma = 0.0;
  double x0 = 0.5;
};

struct DistributionSpec {
  std::variant<DiscreteDist, BinaryDist, HeavyTwoPointDist, SparseMeanDist, RegressionDist> v;
};

inline void validate(const DistributionSpec& spec) {
  if (const auto* d = std::get_if<DiscreteDist>(&spec.v)) {
    if (d->support.size() != d->probs.size() || d->support.empty())
      throw std::invalid_argument("invalid-distribution: support/probs mismatch");
    double tot = 0.0;
    for (double p : d->probs) {
      if (p < 0.0) throw std::invalid_argument("invalid-distribution: negative probability");
      tot += p;
    }
    if (std::fabs(tot - 1.0) > 1e-12) throw std::invalid_argument("invalid-distribution: probabilities do not sum to 1");
  } else if (const auto* b = std::get_if<BinaryDist>(&spec.v)) {
    if (b->r <= 0.0 || b->prob_plus < 0.0 || b->prob_plus > 1.0)
      throw std::invalid_argument("invalid-distribution: bad binary parameters");
  } else if (const auto* h = std::get_if<HeavyTwoPointDist>(&spec.v)) {
    if (h->r <= 0.0 || h->k < 1.0 || h->eps <= 0.0 || h->eps > 1.0)
      throw std::invalid_argument("invalid-distribution: bad heavy two-point parameters");
  } else if (const auto* s = std::get_if<SparseMeanDist>(&spec.v)) {
    if (s->d < s->s + 1 || s->s < 1 || s->r <= 0.0) throw std::invalid_argument("invalid-distribution: bad sparse parameters");
    if (static_cast<int>(s->active.size()) > s->s) throw std::invalid_argument("invalid-distribution: too many active values");
    for (double a : s->active)
      if (std::fabs(a) > s->r) throw std::invalid_argument("invalid-distribution: active value outside [-r, r]");
  } else if (const auto* g = std::get_if<RegressionDist>(&spec.v)) {
    if (!g->f || g->sigma < 0.0 || g->x0 <= 0.0 || g->x0 >= 1.0)
      throw std::invalid_argument("invalid-distribution: bad regression parameters");
  }
}

// the estimand theta(P), known in closed form for every variant
inline std::vector<double> target(const DistributionSpec& spec) {
  validate(spec);
  if (const auto* d = std::get_if<DiscreteDist>(&spec.v)) {
    std::vector<double> m(d->support[0].size(), 0.0);
    for (std::size_t i = 0; i < d->support.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) m[j] += d->probs[i] * d->support[i][j];
    return m;
  }
  if (const auto* b = std::get_if<BinaryDist>(&spec.v)) return {b->r * (2.0 * b->prob_plus - 1.0)};
  if (const auto* h = std::get_if<HeavyTwoPointDist>(&spec.v)) return {h->r * std::pow(h->eps, 1.0 - 1.0 / h->k)};
  if (const auto* s = std::get_if<SparseMeanDist>(&spec.v)) {
    std::vector<double> m(s->d, 0.0);
    for (std::size_t j = 0; j < s->active.size(); ++j) m[j] = s->active[j];
    return m;
  }
  const auto& g = std::get<RegressionDist>(spec.v);
  return {g.f(g.x0)};
}

inline Dataset sample(const DistributionSpec& spec, int n, Seed seed) {
  validate(spec);
  if (n < 1) throw std::invalid_argument("sample: n must be positive");
  Rng rng(seed);
  Dataset ds;
  ds.points.reserve(n);
  if (const auto* d = std::get_if<DiscreteDist>(&spec.v)) {
    std::vector<double> cdf(d->probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d->probs.size(); ++i) cdf[i] = (acc += d->probs[i]);
    cdf.back() = 1.0;
    for (int i = 0; i < n; ++i) {
      double u = rng.next_unit();
      std::size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      ds.points.push_back(d->support[std::min(idx, d->support.size() - 1)]);
    }
    double rmax = 0.0;
    for (const auto& p : d->support) rmax = std::max(rmax, l2_norm(p));
    ds.domain_radius = rmax;
  } else if (const auto* b = std::get_if<BinaryDist>(&spec.v)) {
    for (int i = 0; i < n; ++i) ds.points.push_back({rng.bernoulli(b->prob_plus) ? b->r : -b->r});
    ds.domain_radius = b->r;
  } else if (const auto* h = std::get_if<HeavyTwoPointDist>(&spec.v)) {
    double spike = h->r * std::pow(h->eps, -1.0 / h->k);
    for (int i = 0; i < n; ++i) ds.points.push_back({rng.bernoulli(h->eps) ? spike : 0.0});
    ds.domain_radius = kInf;
  } else if (const auto* s = std::get_if<SparseMeanDist>(&spec.v)) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> p(s->d);
      for (int j = 0; j < s->d; ++j) {
        double theta = (j < static_cast<int>(s->active.size())) ? s->active[j] : 0.0;
        double prob_plus = 0.5 * (1.0 + theta / s->r);
        p[j] = rng.bernoulli(prob_plus) ? s->r : -s->r;
      }
      ds.points.push_back(std::move(p));
    }
    ds.domain_radius = s->r;
    ds.norm_kind = NormKind::linf;
  } else {
    const auto& g = std::get<RegressionDist>(spec.v);
    for (int i = 0; i < n; ++i) {
      double x = rng.next_unit();
      double y = g.f(x) + g.sigma * rng.normal();
      ds.points.push_back({x, y});
    }
    ds.kind = DatasetKind::regression_pairs;
  }
  return ds;
}

// ---- estimators ----

struct Certification {
  // stability order (kInf for worst-case) and the claimed budget
  double p = kInf;
  double beta = 0.0;
};

struct EstimatorHandle {
  std::string id;
  int target_dim = 1;
  std::function<std::vector<double>(const Dataset&, Seed)> evaluate;
  bool randomized = false;
  std::optional<Certification> certified;
  int seed_average_reps = 64;

  // optional fast paths for estimators that depend on the data only through
  // the sample mean; risk and search routines exploit them when present
  std::function<double(double)> mean_map;
  std::function<std::vector<double>(const std::vector<double>&)> mean_map_vec;
  // set when mean_map is multiplication by a constant factor
  std::optional<double> linear_factor;
};

// E_xi over the estimator's internal randomness, shared-seed coupling
inline std::vector<double> expected_output(const EstimatorHandle& est, const Dataset& ds, Seed seed) {
  if (!est.randomized) return est.evaluate(ds, seed);
  std::vector<double> acc;
  for (int m = 0; m < est.seed_average_reps; ++m) {
    auto v = est.evaluate(ds, child_seed(seed, m));
    if (acc.empty()) acc.assign(v.size(), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) acc[j] += v[j];
  }
  for (double& x : acc) x /= est.seed_average_reps;
  return acc;
}

inline EstimatorHandle make_sample_mean(int dim = 1) {
  EstimatorHandle h;
  h.id = "sample-mean";
  h.target_dim = dim;
  h.evaluate = [](const Dataset& ds, Seed) { return sample_mean(ds); };
  h.mean_map_vec = [](const std::vector<double>& m) { return m; };
  if (dim == 1) {
    h.mean_map = [](double m) { return m; };
    h.linear_factor = 1.0;
  }
  return h;
}

// ---- CSV round trip ----

inline void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << std::setprecision(17);
  if (ds.kind == DatasetKind::regression_pairs) {
    out << "x,y\n";
  } else {
    for (std::size_t j = 0; j < ds.dim(); ++j) out << (j ? ",x" : "x") << j;
    out << "\n";
  }
  for (const auto& p : ds.points) {
    for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << p[j];
    out << "\n";
  }
}

inline Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("read_csv: empty file");
  Dataset ds;
  ds.kind = (header == "x,y") ? DatasetKind::regression_pairs : DatasetKind::vector_sample;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> p;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) p.push_back(std::stod(cell));
    ds.points.push_back(std::move(p));
  }
  return ds;
}

}  // namespace stable_est
