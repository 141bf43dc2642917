#include "catch2/catch_amalgamated.hpp"
#include "stable_est/wavelet.hpp"

using namespace stable_est;

TEST_CASE("haar basis evaluation") {
  WaveletBasis b = make_haar();
  SECTION("mother takes values +-2^{l/2} on its half cells") {
    REQUIRE(eval_basis(b, 0, 0, 0.2) == 1.0);
    REQUIRE(eval_basis(b, 0, 0, 0.7) == -1.0);
    REQUIRE(eval_basis(b, 2, 1, 0.3) == Catch::Approx(2.0).margin(1e-15));    // u = 0.2
    REQUIRE(eval_basis(b, 2, 1, 0.45) == Catch::Approx(-2.0).margin(1e-15));  // u = 0.8
    REQUIRE(eval_basis(b, 2, 1, 0.6) == 0.0);                                 // outside the cell
  }
  SECTION("father is the indicator times 2^{l/2}") {
    REQUIRE(eval_father(b, 0, 0, 0.99) == 1.0);
    REQUIRE(eval_father(b, 3, 5, 0.7) == Catch::Approx(std::pow(2.0, 1.5)).margin(1e-15));
    REQUIRE(eval_father(b, 3, 5, 0.8) == 0.0);
  }
  SECTION("one active translate per level and point") {
    REQUIRE(active_ks(b, 0, 0.3) == std::vector<int>{0});
    REQUIRE(active_ks(b, 3, 0.3) == std::vector<int>{2});
    REQUIRE(active_ks(b, 5, 0.999) == std::vector<int>{31});
  }
  SECTION("index bounds") {
    REQUIRE_THROWS_AS(eval_basis(b, 1, 2, 0.5), std::out_of_range);
    REQUIRE_THROWS_AS(eval_father(b, 1, -1, 0.5), std::out_of_range);
  }
}

TEST_CASE("haar population coefficients by antiderivative") {
  WaveletBasis b = make_haar();
  auto identity = [](double x) { return x; };
  // father at level 1: sqrt2 int_0^{1/2} x dx
  REQUIRE(population_coeff(b, identity, true, 1, 0) == Catch::Approx(std::sqrt(2.0) / 8.0).margin(1e-10));
  // mother at level 1: sqrt2 (int_0^{1/4} - int_{1/4}^{1/2}) x dx
  REQUIRE(population_coeff(b, identity, false, 1, 0) == Catch::Approx(-std::sqrt(2.0) / 16.0).margin(1e-10));
  // quadrature sanity on a smooth integrand
  REQUIRE(population_coeff(b, [](double x) { return x * x; }, true, 0, 0) == Catch::Approx(1.0 / 3.0).margin(1e-10));
}

TEST_CASE("haar orthonormality through the quadrature") {
  WaveletBasis b = make_haar();
  auto mother = [&](int l, int k) { return [&b, l, k](double x) { return eval_basis(b, l, k, x); }; };
  // unit norms
  REQUIRE(population_coeff(b, mother(0, 0), false, 0, 0) == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(population_coeff(b, mother(2, 1), false, 2, 1) == Catch::Approx(1.0).margin(1e-9));
  // cross terms vanish
  REQUIRE(population_coeff(b, mother(1, 0), false, 1, 1) == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(population_coeff(b, mother(2, 1), false, 1, 0) == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(population_coeff(b, mother(0, 0), true, 0, 0) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("daubechies cascade tables") {
  WaveletBasis b = make_daubechies(2);
  REQUIRE(b.regularity == 2.0);
  REQUIRE(b.s_psi == 3.0);

  SECTION("periodized father at level 0 is the partition of unity") {
    for (double x : linspace(0.05, 0.95, 19))
      REQUIRE(eval_father(b, 0, 0, x) == Catch::Approx(1.0).margin(5e-3));
  }
  SECTION("measured norms are close to orthonormal") {
    auto phi = [&](double x) { return eval_father(b, 0, 0, x); };
    auto psi = [&](double x) { return eval_basis(b, 0, 0, x); };
    double phi2 = population_coeff(b, phi, true, 0, 0);
    double psi2 = population_coeff(b, psi, false, 0, 0);
    double cross = population_coeff(b, phi, false, 0, 0);
    REQUIRE(phi2 == Catch::Approx(1.0).margin(5e-3));
    REQUIRE(psi2 == Catch::Approx(1.0).margin(5e-3));
    REQUIRE(cross == Catch::Approx(0.0).margin(5e-3));
  }
  SECTION("active translate count stays within the localization constant") {
    for (int l : {2, 3, 5}) {
      for (double x : {0.1, 0.5, 0.93}) {
        auto ks = active_ks(b, l, x);
        REQUIRE(static_cast<double>(ks.size()) <= b.k_loc);
        REQUIRE_FALSE(ks.empty());
      }
    }
  }
  SECTION("envelope really bounds the evaluations") {
    for (int l : {0, 1, 3}) {
      for (double x : linspace(0.01, 0.99, 33)) {
        for (int k : active_ks(b, l, x))
          REQUIRE(std::abs(eval_basis(b, l, k, x)) <= b.c_psi * std::pow(2.0, l / 2.0) * (1.0 + 1e-9));
      }
    }
  }
  REQUIRE_THROWS_AS(make_daubechies(4), std::invalid_argument);
}

TEST_CASE("empirical coefficients") {
  WaveletBasis b = make_haar();
  Dataset ds;
  ds.kind = DatasetKind::regression_pairs;
  ds.points = {{0.1, 2.0}, {0.3, -1.0}, {0.6, 0.5}, {0.8, 4.0}};

  WaveletCoeffs coeffs = empirical_coeffs(b, ds, 1);
  SECTION("layout covers the father level plus mothers up to L") {
    REQUIRE(coeffs.entries.size() == 1 + 1 + 2);  // father l0, mother l0, mothers at level 1
    REQUIRE(coeffs.find(true, 0, 0) != nullptr);
    REQUIRE(coeffs.find(false, 1, 1) != nullptr);
    REQUIRE(coeffs.find(false, 2, 0) == nullptr);
  }
  SECTION("father coefficient is the response mean") {
    REQUIRE(coeffs.find(true, 0, 0)->f_hat == Catch::Approx(5.5 / 4.0).margin(1e-15));
  }
  SECTION("mother coefficient by hand") {
    // level 0: +1 weights below 1/2, -1 above
    REQUIRE(coeffs.find(false, 0, 0)->f_hat == Catch::Approx((2.0 - 1.0 - 0.5 - 4.0) / 4.0).margin(1e-15));
  }
  SECTION("clipping acts on the clipped field only and keeps it below s") {
    WaveletCoeffs clipped = empirical_coeffs(b, ds, 1, 1.0);
    const CoeffEntry* e = clipped.find(true, 0, 0);
    REQUIRE(e->f_hat == Catch::Approx(5.5 / 4.0).margin(1e-15));          // raw mean unchanged
    REQUIRE(e->f_hat_t == Catch::Approx((1.0 - 1.0 + 0.5 + 1.0) / 4.0).margin(1e-15));
    for (const auto& entry : clipped.entries) REQUIRE(std::abs(entry.f_hat_t) <= entry.s * (1.0 + 1e-12));
  }
  SECTION("input validation") {
    Dataset plain;
    plain.points = {{0.5}, {0.6}};
    REQUIRE_THROWS_AS(empirical_coeffs(b, plain, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(empirical_coeffs(b, ds, -2), std::invalid_argument);
  }
}

TEST_CASE("projection kernel supremum") {
  WaveletBasis b = make_haar();
  SECTION("haar kernel attains 2^{L+1} on the diagonal cell") {
    for (int L : {0, 1, 3}) {
      KernelSupReport rep = kernel_sup(b, L, 0.3);
      REQUIRE(rep.analytic_bound == Catch::Approx(std::pow(2.0, L + 1)).margin(1e-12));
      REQUIRE(rep.grid_sup == Catch::Approx(rep.analytic_bound).margin(1e-9));
    }
  }
  SECTION("fathers-only kernel is the level-l0 projector") {
    KernelSupReport rep = kernel_sup(b, -1, 0.3);
    REQUIRE(rep.grid_sup == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("daubechies grid sup respects the measured envelope") {
    WaveletBasis d = make_daubechies(2);
    for (int L : {0, 2}) {
      KernelSupReport rep = kernel_sup(d, L, 0.3);
      REQUIRE(rep.grid_sup <= rep.analytic_bound * (1.0 + 1e-9));
      REQUIRE(rep.grid_sup > 0.0);
    }
  }
}

TEST_CASE("besov test fixtures") {
  auto fs = besov_test_functions(0.5, 4);
  REQUIRE(fs.size() == 4);
  SECTION("cusp values and sup norm") {
    REQUIRE(fs[0].name == "cusp");
    REQUIRE(fs[0].f(0.5) == 0.0);
    REQUIRE(fs[0].f(0.3) == Catch::Approx(std::sqrt(0.2)).margin(1e-15));
    REQUIRE(fs[0].sup_norm == Catch::Approx(std::sqrt(0.5)).margin(1e-15));
    double sampled_max = 0.0;
    for (double x : linspace(0.0, 1.0, 201)) sampled_max = std::max(sampled_max, std::abs(fs[0].f(x)));
    REQUIRE(sampled_max <= fs[0].sup_norm * (1.0 + 1e-12));
  }
  SECTION("the holder exponent controls haar coefficient decay") {
    WaveletBasis b = make_haar();
    for (int l : {2, 4, 6}) {
      double worst = 0.0;
      for (int k = 0; k < (1 << l); ++k)
        worst = std::max(worst, std::abs(population_coeff(b, fs[0].f, false, l, k, 1e-9)));
      REQUIRE(worst <= 2.0 * std::pow(2.0, -l * (0.5 + 0.5)));
    }
  }
  REQUIRE_THROWS_AS(besov_test_functions(1.5, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(besov_test_functions(0.5, 9), std::invalid_argument);
}

TEST_CASE("dyadic point detection") {
  REQUIRE(is_dyadic_at_levels(0.5, 1));
  REQUIRE(is_dyadic_at_levels(0.25, 2));
  REQUIRE_FALSE(is_dyadic_at_levels(0.25, 1));
  REQUIRE_FALSE(is_dyadic_at_levels(0.3, 20));
  REQUIRE(is_dyadic_at_levels(1.0 / 1024.0, 10));
}
