#include "catch2/catch_amalgamated.hpp"
#include "stable_est/estimators.hpp"
#include "stable_est/stability.hpp"

using namespace stable_est;

namespace {

Dataset make_1d(std::initializer_list<double> xs, double r = 1.0) {
  Dataset ds;
  ds.domain_radius = r;
  for (double x : xs) ds.points.push_back({x});
  return ds;
}

// sample mean variant with the fast paths stripped, to exercise generic code
EstimatorHandle plain_mean() {
  EstimatorHandle h;
  h.id = "plain-mean";
  h.evaluate = [](const Dataset& ds, Seed) { return sample_mean(ds); };
  return h;
}

}  // namespace

TEST_CASE("leave one out statistic matches hand enumeration") {
  // n+1 = 3 points, sample mean: drop-i means are (b+c)/2, (a+c)/2, (a+b)/2
  Dataset ds = make_1d({1.0, -0.5, 0.25});
  double m0 = (-0.5 + 0.25) / 2.0, m1 = (1.0 + 0.25) / 2.0, m2 = (1.0 - 0.5) / 2.0;
  double d01 = std::fabs(m0 - m1), d02 = std::fabs(m0 - m2), d12 = std::fabs(m1 - m2);
  EstimatorHandle mean = make_sample_mean();

  double want_inf = std::max({d01, d02, d12});
  REQUIRE(lp_statistic(mean, ds, StabilityOrder::worst()) == Catch::Approx(want_inf).margin(1e-15));

  double want_l1 = 2.0 * (d01 + d02 + d12) / 9.0;
  REQUIRE(lp_statistic(mean, ds, StabilityOrder::average()) == Catch::Approx(want_l1).margin(1e-15));

  double want_l2 = std::sqrt(2.0 * (d01 * d01 + d02 * d02 + d12 * d12) / 9.0);
  REQUIRE(lp_statistic(mean, ds, make_order(2.0)) == Catch::Approx(want_l2).margin(1e-15));

  SECTION("mean fast path agrees with the generic evaluator") {
    for (double p : {1.0, 2.0, 3.5}) {
      double fast = lp_statistic(mean, ds, make_order(p));
      double slow = lp_statistic(plain_mean(), ds, make_order(p));
      REQUIRE(fast == Catch::Approx(slow).margin(1e-14));
    }
  }
}

TEST_CASE("closed form mean stability equals exhaustive corner enumeration") {
  EstimatorHandle mean = make_sample_mean();
  for (int n : {3, 5, 8}) {
    for (double p : {1.0, 2.0, 4.0}) {
      double closed = closed_form_mean_stability(n, 1.0, make_order(p));
      double brute = brute_force_corner_sup(mean, n, 1.0, make_order(p));
      REQUIRE(closed == Catch::Approx(brute).margin(1e-12));
    }
    REQUIRE(closed_form_mean_stability(n, 1.0, StabilityOrder::worst()) ==
            Catch::Approx(brute_force_corner_sup(mean, n, 1.0, StabilityOrder::worst())).margin(1e-12));
  }
  SECTION("worst case value is 2r/n") {
    REQUIRE(closed_form_mean_stability(10, 1.0, StabilityOrder::worst()) == Catch::Approx(0.2).margin(1e-15));
    REQUIRE(closed_form_mean_stability(4, 2.5, StabilityOrder::worst()) == Catch::Approx(1.25).margin(1e-15));
  }
  SECTION("average case at n = 11 is exactly 1/11") {
    REQUIRE(closed_form_mean_stability(11, 1.0, StabilityOrder::average()) == Catch::Approx(1.0 / 11.0).margin(1e-15));
  }
  SECTION("parameter validation") {
    REQUIRE_THROWS_AS(closed_form_mean_stability(0, 1.0, StabilityOrder::worst()), std::invalid_argument);
    REQUIRE_THROWS_AS(closed_form_mean_stability(5, -1.0, StabilityOrder::worst()), std::invalid_argument);
    REQUIRE_THROWS_AS(make_order(0.5), std::invalid_argument);
  }
}

TEST_CASE("worst case gap requires neighboring datasets") {
  EstimatorHandle mean = make_sample_mean();
  Dataset a = make_1d({1.0, -1.0, 0.0});
  Dataset b = replace_point(a, 0, {-1.0});
  REQUIRE(worst_case_gap(mean, a, b) == Catch::Approx(2.0 / 3.0).margin(1e-15));
  Dataset c = replace_point(b, 1, {1.0});
  REQUIRE_THROWS_AS(worst_case_gap(mean, a, c), std::invalid_argument);
}

TEST_CASE("worst case search finds the mean supremum with a corner witness") {
  EstimatorHandle mean = make_sample_mean();
  SearchDomain dom;
  dom.n = 10;
  dom.r = 1.0;
  SearchBudget budget;
  StabilityReport rep = certify_sup(mean, dom, StabilityOrder::worst(), budget, Seed{17});
  REQUIRE(rep.found_sup == Catch::Approx(0.2).margin(1e-12));
  REQUIRE(rep.witness_pair.has_value());
  REQUIRE(hamming_distance(rep.witness_pair->first, rep.witness_pair->second) == 1);
  for (const auto& p : rep.witness_pair->first.points) REQUIRE(std::fabs(std::fabs(p[0]) - 1.0) < 1e-12);
  REQUIRE(rep.evaluations > 0);

  SECTION("claim checking") {
    StabilityReport ok = certify_sup(mean, dom, StabilityOrder::worst(), budget, Seed{17}, 0.2);
    REQUIRE(ok.budget_satisfied);
    StabilityReport bad = certify_sup(mean, dom, StabilityOrder::worst(), budget, Seed{17}, 0.1);
    REQUIRE_FALSE(bad.budget_satisfied);
  }
  SECTION("same seed reproduces the report") {
    StabilityReport again = certify_sup(mean, dom, StabilityOrder::worst(), budget, Seed{17});
    REQUIRE(again.found_sup == rep.found_sup);
    REQUIRE(again.witness_pair->first.points == rep.witness_pair->first.points);
  }
}

TEST_CASE("finite order search matches the exhaustive corner value") {
  EstimatorHandle mean = make_sample_mean();
  SearchDomain dom;
  dom.n = 6;
  dom.r = 1.0;
  SearchBudget budget;
  for (double p : {1.0, 2.0}) {
    StabilityReport rep = certify_sup(mean, dom, make_order(p), budget, Seed{3});
    double brute = brute_force_corner_sup(mean, 6, 1.0, make_order(p));
    REQUIRE(rep.found_sup == Catch::Approx(brute).margin(1e-12));
    REQUIRE(rep.witness.size() == 7);
  }
}

TEST_CASE("search domains are validated") {
  EstimatorHandle mean = make_sample_mean();
  SearchDomain dom;
  dom.r = kInf;
  SearchBudget budget;
  REQUIRE_THROWS_WITH(certify_sup(mean, dom, StabilityOrder::worst(), budget),
                      Catch::Matchers::ContainsSubstring("unbounded-domain"));
  SearchBudget zero;
  zero.random_restarts = 0;
  dom.r = 1.0;
  REQUIRE_THROWS_AS(certify_sup(mean, dom, StabilityOrder::worst(), zero), std::invalid_argument);
  REQUIRE_THROWS_AS(brute_force_corner_sup(mean, 30, 1.0, StabilityOrder::worst()), std::invalid_argument);
}

TEST_CASE("box domains keep witnesses inside the box") {
  // estimator reading only the second coordinate, clipped
  EstimatorHandle second;
  second.id = "second-coordinate-mean";
  second.evaluate = [](const Dataset& ds, Seed) {
    double acc = 0.0;
    for (const auto& p : ds.points) acc += clip(p[1], 2.0);
    return std::vector<double>{acc / ds.size()};
  };
  SearchDomain dom;
  dom.n = 5;
  dom.d = 2;
  dom.r = 1.0;
  dom.kind = DatasetKind::regression_pairs;
  dom.box = {{0.0, 1.0}, {-3.0, 3.0}};
  SearchBudget budget;
  StabilityReport rep = certify_sup(second, dom, StabilityOrder::worst(), budget, Seed{5});
  // one replacement moves the clipped coordinate by at most 4, so the gap tops out at 4/n
  REQUIRE(rep.found_sup <= 4.0 / 5.0 + 1e-12);
  REQUIRE(rep.found_sup > 0.5);  // the search should get most of the way there
  for (const auto& p : rep.witness_pair->first.points) {
    REQUIRE((p[0] >= 0.0 && p[0] <= 1.0));
    REQUIRE((p[1] >= -3.0 && p[1] <= 3.0));
  }
}

TEST_CASE("randomized estimators couple seeds inside the gap") {
  // additive noise with a shared seed cancels exactly in the coupled gap
  EstimatorHandle noisy;
  noisy.id = "mean-plus-coupled-noise";
  noisy.randomized = true;
  noisy.seed_average_reps = 8;
  noisy.evaluate = [](const Dataset& ds, Seed s) {
    Rng rng(s);
    return std::vector<double>{sample_mean(ds)[0] + rng.normal()};
  };
  Dataset a = make_1d({1.0, -1.0, 1.0, -1.0});
  Dataset b = replace_point(a, 0, {-1.0});
  REQUIRE(worst_case_gap(noisy, a, b, Seed{9}) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("two notion gap stays within its factor two envelope") {
  EstimatorHandle mean = make_sample_mean();
  Rng rng(Seed{21});
  for (int trial = 0; trial < 20; ++trial) {
    Dataset ds;
    ds.domain_radius = 1.0;
    int m = 4 + static_cast<int>(rng.next_u64() % 6);
    for (int i = 0; i < m; ++i) ds.points.push_back({rng.uniform(-1.0, 1.0)});
    auto [a, b] = two_notion_gap_check(mean, ds);
    REQUIRE(b <= a * (1.0 + 1e-12));
    REQUIRE(a <= 2.0 * b * (1.0 + 1e-12));
  }

  // same envelope for a nonlinear estimator
  BoundedMeanSpec spec;
  spec.n = 7;
  spec.r = 1.0;
  spec.beta_n = 0.05;
  EstimatorHandle avg = avg_bounded(8, 1.0, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    Dataset ds;
    ds.domain_radius = 1.0;
    for (int i = 0; i < 9; ++i) ds.points.push_back({rng.uniform(-1.0, 1.0)});
    auto [a, b] = two_notion_gap_check(avg, ds);
    REQUIRE(b <= a * (1.0 + 1e-12));
    REQUIRE(a <= 2.0 * b * (1.0 + 1e-12));
  }
}

TEST_CASE("replace one and leave one out views of worst case stability agree") {
  // for the sample mean both formulations share the supremum 2r/n
  EstimatorHandle mean = make_sample_mean();
  int n = 8;
  double loo_sup = 0.0;
  // corner datasets of size n+1; only the count of +r entries matters
  for (int m = 0; m <= n + 1; ++m) {
    Dataset ds;
    ds.domain_radius = 1.0;
    for (int i = 0; i <= n; ++i) ds.points.push_back({i < m ? 1.0 : -1.0});
    loo_sup = std::max(loo_sup, lp_statistic(mean, ds, StabilityOrder::worst()));
  }
  double replace_sup = brute_force_corner_sup(mean, n, 1.0, StabilityOrder::worst());
  REQUIRE(loo_sup == Catch::Approx(2.0 / n).margin(1e-14));
  REQUIRE(replace_sup == Catch::Approx(2.0 / n).margin(1e-14));
}
