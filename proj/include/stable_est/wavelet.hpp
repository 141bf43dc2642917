#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "stable_est/core.hpp"

namespace stable_est {

enum class WaveletFamily { haar, daubechies };

// Dyadic tables for the compactly supported scaling/wavelet pair, filled by
// the cascade refinement. Exact at grid nodes in the limit; evaluation
// interpolates linearly between nodes.
struct CascadeTables {
  int taps = 0;       // filter length 2N
  int grid_j = 12;    // 2^grid_j samples per unit length
  std::vector<double> father;  // on [0, taps-1]
  std::vector<double> mother;  // on [0, taps-1]
};

struct WaveletBasis {
  WaveletFamily family = WaveletFamily::haar;
  int daub_n = 2;  // vanishing moments when family == daubechies
  int l0 = 0;
  double regularity = 1.0;  // A
  double c_psi = 1.0;       // sup norm envelope: |psi_lk| <= c_psi 2^{l/2}
  double k_loc = 1.0;       // active translates per (level, point)
  double s_psi = 1.0;       // support length <= s_psi 2^{-l}
  std::shared_ptr<const CascadeTables> tables;  // null for haar

  double kernel_envelope() const { return 2.0 * k_loc * c_psi * c_psi; }  // C'_psi
};

namespace detail {

inline double cascade_lookup(const std::vector<double>& v, int grid_j, double u, int taps) {
  if (u <= 0.0 || u >= taps - 1.0) return 0.0;
  double t = u * (1 << grid_j);
  auto i = static_cast<std::size_t>(t);
  if (i + 1 >= v.size()) return 0.0;
  double frac = t - static_cast<double>(i);
  return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

inline std::shared_ptr<const CascadeTables> build_daubechies_tables(int N, int grid_j) {
  std::vector<double> h;
  const double s3 = std::sqrt(3.0), s2 = std::sqrt(2.0);
  if (N == 2) {
    h = {(1 + s3) / (4 * s2), (3 + s3) / (4 * s2), (3 - s3) / (4 * s2), (1 - s3) / (4 * s2)};
  } else if (N == 3) {
    h = {0.3326705529500825,  0.8068915093110924, 0.4598775021184914,
         -0.1350110200102546, -0.0854412738820267, 0.0352262918857095};
  } else {
    throw std::invalid_argument("daubechies: only N in {2, 3} provided");
  }
  auto tab = std::make_shared<CascadeTables>();
  tab->taps = static_cast<int>(h.size());
  tab->grid_j = grid_j;
  int support = tab->taps - 1;
  std::size_t len = static_cast<std::size_t>(support) * (1u << grid_j) + 1;
  std::vector<double> cur(len, 0.0);
  // start from the box function on [0,1) and iterate the refinement map
  for (std::size_t i = 0; i < (1u << grid_j); ++i) cur[i] = 1.0;
  std::vector<double> nxt(len, 0.0);
  for (int it = 0; it < grid_j + 30; ++it) {
    for (std::size_t i = 0; i < len; ++i) {
      double acc = 0.0;
      for (int k = 0; k < tab->taps; ++k) {
        long j = 2l * static_cast<long>(i) - (static_cast<long>(k) << grid_j);
        if (j >= 0 && j < static_cast<long>(len)) acc += h[k] * cur[j];
      }
      nxt[i] = s2 * acc;
    }
    cur.swap(nxt);
  }
  tab->father = cur;
  tab->mother.assign(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    double x = static_cast<double>(i) / (1 << grid_j);
    double acc = 0.0;
    for (int k = 0; k < tab->taps; ++k) {
      double g = ((k & 1) ? -1.0 : 1.0) * h[tab->taps - 1 - k];
      acc += g * cascade_lookup(tab->father, grid_j, 2.0 * x - k, tab->taps);
    }
    tab->mother[i] = s2 * acc;
  }
  return tab;
}

}  // namespace detail

inline WaveletBasis make_haar(int l0 = 0) {
  if (l0 < 0) throw std::invalid_argument("make_haar: l0 >= 0");
  WaveletBasis b;
  b.l0 = l0;
  return b;
}

// periodized Daubechies-N; boundary handling is plain periodization, and the
// localization constants are measured on the evaluation grid
inline WaveletBasis make_daubechies(int N, int l0 = 0, int grid_j = 12) {
  WaveletBasis b;
  b.family = WaveletFamily::daubechies;
  b.daub_n = N;
  b.l0 = l0;
  b.regularity = static_cast<double>(N);
  b.tables = detail::build_daubechies_tables(N, grid_j);
  double mx = 0.0;
  for (double v : b.tables->mother) mx = std::max(mx, std::abs(v));
  b.c_psi = mx;
  b.s_psi = b.tables->taps - 1.0;
  b.k_loc = static_cast<double>(b.tables->taps - 1);  // overlapping translates of one support
  return b;
}

// mother: psi_lk(x) = 2^{l/2} psi(2^l x - k); right-continuous at haar jumps
inline double eval_basis(const WaveletBasis& b, int l, int k, double x) {
  if (l < b.l0 || k < 0 || k >= (1 << l)) throw std::out_of_range("eval_basis: index out of range");
  double scale = std::pow(2.0, l / 2.0);
  if (b.family == WaveletFamily::haar) {
    double u = std::ldexp(x, l) - k;  // 2^l x - k
    if (u < 0.0 || u >= 1.0) return 0.0;
    return u < 0.5 ? scale : -scale;
  }
  double u = std::ldexp(x, l) - k;
  double period = std::ldexp(1.0, l);
  double acc = 0.0;
  // fold translates by multiples of 2^l back into the support
  double shifted = u - period * std::floor((u - 0.0) / period);
  for (double v = shifted; v < b.tables->taps - 1.0; v += period)
    acc += detail::cascade_lookup(b.tables->mother, b.tables->grid_j, v, b.tables->taps);
  return scale * acc;
}

inline double eval_father(const WaveletBasis& b, int l, int k, double x) {
  if (k < 0 || k >= (1 << l)) throw std::out_of_range("eval_father: index out of range");
  double scale = std::pow(2.0, l / 2.0);
  if (b.family == WaveletFamily::haar) {
    double u = std::ldexp(x, l) - k;
    return (u >= 0.0 && u < 1.0) ? scale : 0.0;
  }
  double u = std::ldexp(x, l) - k;
  double period = std::ldexp(1.0, l);
  double acc = 0.0;
  double shifted = u - period * std::floor(u / period);
  for (double v = shifted; v < b.tables->taps - 1.0; v += period)
    acc += detail::cascade_lookup(b.tables->father, b.tables->grid_j, v, b.tables->taps);
  return scale * acc;
}

// translates that can be nonzero at x for level l (small set by localization)
inline std::vector<int> active_ks(const WaveletBasis& b, int l, double x) {
  int period = 1 << l;
  int base = static_cast<int>(std::floor(std::ldexp(x, l)));
  if (b.family == WaveletFamily::haar) {
    if (base < 0 || base >= period) return {};
    return {base};
  }
  int span = std::min(b.tables->taps - 1, period);
  std::vector<int> ks;
  ks.reserve(span);
  for (int off = 0; off < span; ++off) {
    int k = ((base - off) % period + period) % period;
    bool seen = false;
    for (int prev : ks)
      if (prev == k) seen = true;
    if (!seen) ks.push_back(k);
  }
  return ks;
}

struct CoeffEntry {
  bool father = false;
  int l = 0;
  int k = 0;
  double f_hat = 0.0;    // empirical coefficient
  double f_hat_t = 0.0;  // coefficient with responses clipped at T
  double s = 0.0;        // mean absolute weighted response
};

struct WaveletCoeffs {
  int L = 0;  // deepest mother level included (l0 - 1 means fathers only)
  double clip = kInf;
  std::vector<CoeffEntry> entries;

  const CoeffEntry* find(bool father, int l, int k) const {
    for (const auto& e : entries)
      if (e.father == father && e.l == l && e.k == k) return &e;
    return nullptr;
  }
};

// all (father at l0, mothers l0..L) statistics in one pass over the data;
// 2^L > n is allowed but flagged by the caller's policy, not here
inline WaveletCoeffs empirical_coeffs(const WaveletBasis& b, const Dataset& ds, int L, double clip = kInf) {
  if (ds.kind != DatasetKind::regression_pairs) throw std::invalid_argument("empirical_coeffs: regression pairs required");
  if (L < b.l0 - 1) throw std::invalid_argument("empirical_coeffs: L >= l0 - 1 required");
  WaveletCoeffs out;
  out.L = L;
  out.clip = clip;
  auto add_level = [&](bool father, int l) {
    for (int k = 0; k < (1 << l); ++k) out.entries.push_back({father, l, k, 0.0, 0.0, 0.0});
  };
  add_level(true, b.l0);
  for (int l = b.l0; l <= L; ++l) add_level(false, l);

  auto entry_at = [&](bool father, int l, int k) -> CoeffEntry& {
    std::size_t off = father ? k : (1u << b.l0) + ((1u << l) - (1u << b.l0)) + k;
    CoeffEntry& e = out.entries[off];
    return e;
  };

  std::size_t n = ds.size();
  for (std::size_t i = 0; i < n; ++i) {
    double x = ds.points[i][0];
    double y = ds.points[i][1];
    double yc = std::isinf(clip) ? y : stable_est::clip(y, clip);
    for (int k : active_ks(b, b.l0, x)) {
      double w = eval_father(b, b.l0, k, x);
      if (w == 0.0) continue;
      CoeffEntry& e = entry_at(true, b.l0, k);
      e.f_hat += y * w;
      e.f_hat_t += yc * w;
      e.s += std::abs(y * w);
    }
    for (int l = b.l0; l <= L; ++l) {
      for (int k : active_ks(b, l, x)) {
        double w = eval_basis(b, l, k, x);
        if (w == 0.0) continue;
        CoeffEntry& e = entry_at(false, l, k);
        e.f_hat += y * w;
        e.f_hat_t += yc * w;
        e.s += std::abs(y * w);
      }
    }
  }
  for (auto& e : out.entries) {
    e.f_hat /= static_cast<double>(n);
    e.f_hat_t /= static_cast<double>(n);
    e.s /= static_cast<double>(n);
  }
  return out;
}

struct KernelSupReport {
  double grid_sup = 0.0;
  double analytic_bound = 0.0;
};

// projection kernel K_L(x, x0) over the basis up to level L, maximized over
// a midpoint dyadic grid of 2^{L+4} points
inline KernelSupReport kernel_sup(const WaveletBasis& b, int L, double x0) {
  if (L < b.l0 - 1) throw std::invalid_argument("kernel_sup: L >= l0 - 1 required");
  auto kernel_at = [&](double x) {
    double acc = 0.0;
    for (int k : active_ks(b, b.l0, x0)) acc += eval_father(b, b.l0, k, x) * eval_father(b, b.l0, k, x0);
    for (int l = b.l0; l <= L; ++l)
      for (int k : active_ks(b, l, x0)) acc += eval_basis(b, l, k, x) * eval_basis(b, l, k, x0);
    return acc;
  };
  KernelSupReport rep;
  int pts = 1 << (std::max(L, 0) + 4);
  for (int j = 0; j < pts; ++j) {
    double x = (j + 0.5) / pts;
    rep.grid_sup = std::max(rep.grid_sup, std::abs(kernel_at(x)));
  }
  rep.analytic_bound = b.kernel_envelope() * std::pow(2.0, L);
  return rep;
}

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  double holder_exponent = 0.5;
  double sup_norm = 1.0;  // M_f
};

// deterministic smoothness-nu fixtures with analytic pointwise values
inline std::vector<TestFunction> besov_test_functions(double nu, int count, double regularity = 1.0) {
  if (!(nu > 0.0) || nu >= regularity) throw std::invalid_argument("besov_test_functions: need 0 < nu < basis regularity");
  std::vector<TestFunction> fs;
  double half_pow = std::pow(0.5, nu);
  fs.push_back({"cusp", [nu](double x) { return std::pow(std::abs(x - 0.5), nu); }, nu, half_pow});
  fs.push_back({"constant", [](double) { return 0.7; }, nu, 0.7});
  fs.push_back({"triangle", [](double x) { return pos_part(1.0 - 4.0 * std::abs(x - 0.5)); }, nu, 1.0});
  fs.push_back({"two-cusp",
                [nu](double x) {
                  return 0.5 * std::pow(std::abs(x - 0.25), nu) - 0.5 * std::pow(std::abs(x - 0.75), nu);
                },
                nu, std::pow(0.75, nu)});
  if (count < 1 || count > static_cast<int>(fs.size())) throw std::invalid_argument("besov_test_functions: count out of range");
  fs.resize(count);
  return fs;
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a + 1e-15), fm = f(m), fb = f(b - 1e-15);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

// population coefficient by quadrature, split at the basis function's
// breakpoints so the integrand is smooth on each piece
inline double population_coeff(const WaveletBasis& b, const std::function<double(double)>& f, bool father, int l,
                               int k, double tol = 1e-10) {
  auto g = [&](double x) { return f(x) * (father ? eval_father(b, l, k, x) : eval_basis(b, l, k, x)); };
  std::vector<double> cuts{0.0, 1.0};
  if (b.family == WaveletFamily::haar) {
    double lo = std::ldexp(static_cast<double>(k), -l);
    double mid = std::ldexp(k + 0.5, -l);
    double hi = std::ldexp(k + 1.0, -l);
    cuts = {lo, mid, hi};
  } else {
    int pieces = 1 << std::max(6 - l, 2);
    cuts.clear();
    for (int j = 0; j <= pieces; ++j) cuts.push_back(static_cast<double>(j) / pieces);
  }
  // also split at the fixture's own kink points
  for (double c : {0.25, 0.5, 0.75})
    if (c > cuts.front() && c < cuts.back()) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) acc += detail::integrate(g, cuts[i], cuts[i + 1], tol / cuts.size());
  return acc;
}

inline bool is_dyadic_at_levels(double x0, int max_level) {
  for (int l = 0; l <= max_level; ++l) {
    double scaled = std::ldexp(x0, l);
    if (scaled == std::floor(scaled)) return true;
  }
  return false;
}

}  // namespace stable_est
