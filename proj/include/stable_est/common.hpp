#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace stable_est {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sq(double x) { return x * x; }

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }

// clip to [-t, t]
inline double clip(double x, double t) {
  if (x > t) return t;
  if (x < -t) return -t;
  return x;
}

inline double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double linf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline double l2_dist(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l2_dist: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
  return std::sqrt(s);
}

inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count < 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  return out;
}

// geometric spacing, endpoints included
inline std::vector<double> logspace(double lo, double hi, int count) {
  if (lo <= 0.0 || hi <= 0.0) throw std::invalid_argument("logspace: endpoints must be positive");
  std::vector<double> out = linspace(std::log(lo), std::log(hi), count);
  for (double& x : out) x = std::exp(x);
  return out;
}

// worker cap honoring STABLE_EST_THREADS
inline unsigned max_threads() {
  if (const char* s = std::getenv("STABLE_EST_THREADS")) {
    long v = std::strtol(s, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

// Tasks must write only to their own slots; scheduling cannot affect results
// because every task derives its own state from its index.
template <class F>
void parallel_for(std::size_t count, F&& body) {
  std::size_t workers = std::min<std::size_t>(max_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace stable_est
