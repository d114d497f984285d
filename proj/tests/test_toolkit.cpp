#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vexlab/toolkit.hpp"

using namespace vexlab;

namespace {
const DomainDescriptor kUnit = DomainDescriptor::unit_interval();
}

TEST_CASE("truncate and excess", "[toolkit]") {
  CHECK(truncate(3.0, 2.0) == 2.0);
  CHECK(truncate(-3.0, 2.0) == -2.0);
  CHECK(excess(3.0, 2.0) == 1.0);
  CHECK(excess(1.0, 2.0) == 0.0);

  SECTION("identity below the level and exact reconstruction") {
    auto grid = build_grid(kUnit, 12);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    auto u = GridFunction::sample(grid, [&](const Point&) { return dist(rng); });
    auto t = truncate(u, 6.0);
    CHECK(t.values() == u.values());  // max|u| <= 5 < 6
    auto t2 = truncate(u, 2.0);
    auto g2 = excess(u, 2.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(t2[i] + g2[i] == u[i]);  // exact, not approximate
      CHECK(std::fabs(t2[i]) <= 2.0);
    }
  }
  SECTION("non-expansive: |T_k a - T_k b| <= |a - b|") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
      const double a = dist(rng), b = dist(rng);
      CHECK(std::fabs(truncate(a, 3.0) - truncate(b, 3.0)) <= std::fabs(a - b) + 1e-15);
    }
  }
  SECTION("rejects nonpositive level") {
    CHECK_THROWS_AS(truncate(1.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("band_indicator", "[toolkit]") {
  const double k = 5.0;
  CHECK(band_indicator(4.0, k) == 0.0);   // at level k-1
  CHECK(band_indicator(5.0, k) == 1.0);   // at level k
  CHECK(band_indicator(4.5, k) == 0.5);   // mid-band
  CHECK(band_indicator(0.0, k) == 0.0);
  CHECK(band_indicator(100.0, k) == 1.0);
  SECTION("range [0,1] and monotone for nonnegative arguments") {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double u = 8.0 * i / 1000.0;
      const double v = band_indicator(u, 3.0);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v >= prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(band_indicator(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("test_map: values, derivative, overflow cap", "[toolkit]") {
  SECTION("phi(0) = 0 and phi'(0) = 1 for both variants") {
    for (auto variant : {GrowthVariant::subnatural, GrowthVariant::natural}) {
      auto v = test_map(0.0, variant, 2.0);
      CHECK(v.value == 0.0);
      CHECK(v.derivative == 1.0);
    }
  }
  SECTION("subnatural phi(1) = exp(1/4)") {
    CHECK(test_map(1.0, GrowthVariant::subnatural).value ==
          Catch::Approx(std::exp(0.25)).epsilon(1e-14));
  }
  SECTION("derivative matches central differences") {
    const double h = 1e-6;
    for (double s = -3.0; s <= 3.0; s += 0.37) {
      const double cd = (test_map(s + h, GrowthVariant::subnatural).value -
                         test_map(s - h, GrowthVariant::subnatural).value) /
                        (2.0 * h);
      CHECK(test_map(s, GrowthVariant::subnatural).derivative ==
            Catch::Approx(cd).epsilon(1e-8));
    }
  }
  SECTION("arguments past the cap raise a domain error") {
    // natural with pmax = 2 has coefficient 64; cap is sqrt(700/64) ~ 3.3
    CHECK_NOTHROW(test_map(3.3, GrowthVariant::natural, 2.0));
    CHECK_THROWS_AS(test_map(5.0, GrowthVariant::natural, 2.0), std::domain_error);
  }
}

TEST_CASE("check_test_map_property", "[toolkit]") {
  SECTION("subnatural bound 1/2 at s = 0 and over a wide grid") {
    std::vector<double> grid;
    for (int i = 0; i <= 10000; ++i) grid.push_back(-10.0 + 20.0 * i / 10000.0);
    auto rep = check_test_map_property(GrowthVariant::subnatural, 0.0, grid);
    CHECK(rep.all_pass());
    CHECK(rep.find("map_derivative_dominates_value_by_half").slack >= -1e-12);
  }
  SECTION("natural with pmax = 2: positive infimum of phi' - 8 phi on [0,5]") {
    std::vector<double> grid;
    for (int i = 0; i <= 10000; ++i) grid.push_back(5.0 * i / 10000.0);
    auto rep = check_test_map_property(GrowthVariant::natural, 2.0, grid);
    CHECK(rep.all_pass());
    const auto& c = rep.find("map_derivative_dominates_scaled_value");
    CHECK(c.slack > 0.0);
    // direct scan through test_map on the finite part of the grid
    double oracle = std::numeric_limits<double>::infinity();
    for (double s : grid) {
      if (64.0 * s * s > 700.0) continue;
      const auto tm = test_map(s, GrowthVariant::natural, 2.0);
      oracle = std::min(oracle, tm.derivative - 8.0 * tm.value);
    }
    CHECK(c.slack == Catch::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("young_constant", "[toolkit]") {
  SECTION("constant p=2, q=1, eps=0.1 gives 2.5 at s*=5") {
    auto yc = young_constant(ExponentField::constant(kUnit, 2.0),
                             ExponentField::constant(kUnit, 1.0), 0.1);
    CHECK(yc.value == Catch::Approx(2.5).epsilon(1e-12));
    CHECK(yc.worst_s == Catch::Approx(5.0).epsilon(1e-12));
  }
  SECTION("constant is non-increasing in eps") {
    auto p = ExponentField::from_expression(kUnit, "2+0.3*x");
    auto q = ExponentField::from_expression(kUnit, "1.5+0.3*x");
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.01, 0.1, 1.0}) {
      const double c = young_constant(p, q, eps).value;
      CHECK(c <= prev + 1e-12);
      prev = c;
    }
  }
  SECTION("s = 0 satisfies the inequality with any nonnegative constant") {
    auto yc = young_constant(ExponentField::constant(kUnit, 2.0),
                             ExponentField::constant(kUnit, 1.5), 0.1);
    CHECK(yc.value >= 0.0);
    CHECK(0.0 <= 0.1 * 0.0 + yc.value);
  }
  SECTION("hypothesis violations are rejected") {
    // q >= p
    CHECK_THROWS_AS(young_constant(ExponentField::constant(kUnit, 2.0),
                                   ExponentField::constant(kUnit, 2.0), 0.1),
                    std::invalid_argument);
    // q < p - 1
    CHECK_THROWS_AS(young_constant(ExponentField::constant(kUnit, 3.0),
                                   ExponentField::constant(kUnit, 1.5), 0.1),
                    std::invalid_argument);
  }
  SECTION("validation grid holds with the returned constant") {
    auto p = ExponentField::from_expression(kUnit, "2.2+0.2*x");
    auto q = ExponentField::from_expression(kUnit, "1.7+0.2*x");
    auto yc = young_constant(p, q, 0.05);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> xs(0.0, 1.0), ss(0.0, 10.0 * yc.worst_s);
    for (int i = 0; i < 2000; ++i) {
      const double x = xs(rng), s = ss(rng);
      CHECK(std::pow(s, q(x)) <= 0.05 * std::pow(s, p(x)) + yc.value + 1e-9);
    }
  }
}

TEST_CASE("regularized_hamiltonian", "[toolkit]") {
  SECTION("value n/2 when |xi|^q equals n") {
    const int n = 4;
    const double q = 1.5;
    const double xi = std::pow(static_cast<double>(n), 1.0 / q);
    CHECK(regularized_hamiltonian(xi, n, q) == Catch::Approx(n / 2.0));
  }
  CHECK(regularized_hamiltonian(0.0, 3, 1.7) == 0.0);
  SECTION("monotone in |xi| and in n, bounded by n") {
    double prev = -1.0;
    for (double xi = 0.0; xi <= 20.0; xi += 0.25) {
      const double h = regularized_hamiltonian(xi, 5, 1.5);
      CHECK(h >= prev);
      CHECK(h >= 0.0);
      CHECK(h < 5.0);
      CHECK(regularized_hamiltonian(xi, 10, 1.5) >= h);
      prev = h;
    }
  }
  SECTION("approximation gap |H_n - |xi|^q| <= |xi|^{2q}/n") {
    for (double xi : {0.3, 1.0, 2.7}) {
      for (int n : {1, 8, 64}) {
        const double t = std::pow(xi, 1.6);
        const double gap = std::fabs(regularized_hamiltonian(xi, n, 1.6) - t);
        CHECK(gap <= t * t / n + 1e-15);
      }
    }
  }
}

TEST_CASE("vector inequalities", "[toolkit]") {
  SECTION("p = 2: pairing equals |xi-eta|^2, bound is a quarter of it") {
    const Vec2 xi{0.3, -1.1}, eta{-0.4, 0.2};
    const Vec2 d{xi[0] - eta[0], xi[1] - eta[1]};
    const double pairing = flux_pairing(2.0, xi, eta);
    CHECK(pairing == Catch::Approx(dot(d, d)));
    auto rep = check_vector_inequalities(2.0, xi, eta);
    CHECK(rep.all_pass());
    CHECK(rep.checks[0].slack == Catch::Approx(0.75 * dot(d, d)));
  }
  SECTION("random pairs for p in {1.5, 2, 3}") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
      for (int i = 0; i < 10000; ++i) {
        const Vec2 xi{dist(rng), dist(rng)};
        const Vec2 eta{dist(rng), dist(rng)};
        const double slack = vector_inequality_slack(p, xi, eta);
        INFO("p=" << p << " i=" << i);
        CHECK(slack >= -1e-12);
      }
    }
  }
  SECTION("coincident vectors give zero on both sides") {
    const Vec2 v{0.5, 0.5};
    CHECK(vector_inequality_slack(1.5, v, v) == 0.0);
    CHECK(vector_inequality_slack(3.0, {0, 0}, {0, 0}) == 0.0);
  }
}
