#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vexlab/exponents.hpp"

using namespace vexlab;

namespace {
const DomainDescriptor kUnit = DomainDescriptor::unit_interval();
const DomainDescriptor kSquare = DomainDescriptor::unit_square();
}  // namespace

TEST_CASE("exponent field: extrema cached from the validation grid", "[exponents]") {
  auto e = ExponentField::from_expression(kUnit, "2+x");
  CHECK(e.min() == Catch::Approx(2.0));
  CHECK(e.max() == Catch::Approx(3.0));
  CHECK(e(0.25) == Catch::Approx(2.25));
  auto c = ExponentField::constant(kSquare, 1.8);
  CHECK(c.min() == 1.8);
  CHECK(c.max() == 1.8);
}

TEST_CASE("conjugate_exponent: pointwise identity and rejection", "[exponents]") {
  SECTION("constant 2 is self-conjugate") {
    auto e = ExponentField::constant(kUnit, 2.0);
    auto ec = conjugate_exponent(e);
    CHECK(ec(0.3) == Catch::Approx(2.0));
  }
  SECTION("constant 3 conjugates to 1.5") {
    auto ec = conjugate_exponent(ExponentField::constant(kUnit, 3.0));
    CHECK(ec(0.9) == Catch::Approx(1.5));
  }
  SECTION("e(x)=2+x has conjugate (2+x)/(1+x)") {
    auto ec = conjugate_exponent(ExponentField::from_expression(kUnit, "2+x"));
    CHECK(ec(0.5) == Catch::Approx(2.5 / 1.5));
  }
  SECTION("min exponent at or below 1 is rejected") {
    CHECK_THROWS_AS(conjugate_exponent(ExponentField::constant(kUnit, 1.0)),
                    std::invalid_argument);
  }
  SECTION("involution (e')' = e to 1e-12") {
    auto e = ExponentField::from_expression(kUnit, "2+sin(pi*x)/2");
    auto back = conjugate_exponent(conjugate_exponent(e));
    for (double x : {0.0, 0.17, 0.5, 0.83, 1.0})
      CHECK(std::fabs(back(x) - e(x)) < 1e-12);
  }
}

TEST_CASE("sobolev_conjugate: values, rejection, monotonicity", "[exponents]") {
  SECTION("N=2, e=1 gives 2") {
    auto s = sobolev_conjugate(ExponentField::constant(kSquare, 1.0), 2);
    CHECK(s(0.5, 0.5) == Catch::Approx(2.0));
  }
  SECTION("N=2, e=1.5 gives 6") {
    auto s = sobolev_conjugate(ExponentField::constant(kSquare, 1.5), 2);
    CHECK(s(0.1, 0.9) == Catch::Approx(6.0));
  }
  SECTION("N=1 with max e >= 1 is rejected") {
    CHECK_THROWS_AS(sobolev_conjugate(ExponentField::constant(kUnit, 1.2), 1),
                    std::invalid_argument);
  }
  SECTION("pointwise monotone: e1 <= e2 implies e1* <= e2*") {
    auto a = ExponentField::from_expression(kSquare, "1.2+0.2*x");
    auto b = ExponentField::from_expression(kSquare, "1.3+0.2*x+0.1*y");
    auto sa = sobolev_conjugate(a, 2);
    auto sb = sobolev_conjugate(b, 2);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      Point p{u(rng), u(rng)};
      CHECK(sa(p) <= sb(p) + 1e-12);
    }
  }
}

TEST_CASE("data_exponents: scalar and field parts", "[exponents]") {
  auto p = ExponentField::constant(kSquare, 2.0);
  SECTION("N=2, q=1.5 gives q0 = 6/5") {
    ExponentTriple t{p, ExponentField::constant(kSquare, 1.5),
                     ExponentField::constant(kSquare, 0.5), GrowthVariant::subnatural};
    auto de = data_exponents(t, 2);
    CHECK(de.q0 == Catch::Approx(1.2));
    // q* = 6, eta = 0.5: q1 = (6/1.5)' = (4)' = 4/3
    CHECK(de.q1(0.3, 0.7) == Catch::Approx(4.0 / 3.0));
  }
  SECTION("eta = 0 collapses q1 to the conjugate of q*") {
    ExponentTriple t{p, ExponentField::from_expression(kSquare, "1.4+0.1*x"),
                     ExponentField::constant(kSquare, 0.0), GrowthVariant::subnatural};
    auto de = data_exponents(t, 2);
    auto qstar_conj = conjugate_exponent(sobolev_conjugate(t.q, 2));
    for (double x : {0.0, 0.4, 1.0})
      CHECK(de.q1(x, 0.5) == Catch::Approx(qstar_conj(x, 0.5)));
  }
  SECTION("min q >= N rejected") {
    ExponentTriple t{p, ExponentField::constant(kSquare, 2.5),
                     ExponentField::constant(kSquare, 0.5), GrowthVariant::subnatural};
    CHECK_THROWS_AS(data_exponents(t, 2), std::invalid_argument);
  }
}

TEST_CASE("check_admissibility: reported conditions", "[exponents]") {
  SECTION("N=2, p=2, q=1.5, eta=0.5 passes everything") {
    ExponentTriple t{ExponentField::constant(kSquare, 2.0),
                     ExponentField::constant(kSquare, 1.5),
                     ExponentField::constant(kSquare, 0.5), GrowthVariant::subnatural};
    auto rep = check_admissibility(t, 2);
    CHECK(rep.all_pass());
    // q* = 6, so eta = 0.5 < 5 with margin 4.5
    CHECK(rep.find("eta_uniformly_subcritical").slack == Catch::Approx(4.5));
    CHECK(variant_conditions_pass(rep, GrowthVariant::subnatural));
  }
  SECTION("q == p with subnatural flag fails the strict upper bound") {
    ExponentTriple t{ExponentField::constant(kSquare, 2.0),
                     ExponentField::constant(kSquare, 2.0),
                     ExponentField::constant(kSquare, 0.5), GrowthVariant::subnatural};
    auto rep = check_admissibility(t, 2);
    CHECK_FALSE(rep.find("q_strictly_below_p").pass);
    CHECK_FALSE(variant_conditions_pass(rep, GrowthVariant::subnatural));
  }
  SECTION("q below p-1 fails the lower bound") {
    ExponentTriple t{ExponentField::constant(kSquare, 3.0),
                     ExponentField::constant(kSquare, 1.5),
                     ExponentField::constant(kSquare, 0.5), GrowthVariant::subnatural};
    auto rep = check_admissibility(t, 2);
    CHECK_FALSE(rep.find("q_at_least_max_of_p_minus_one_and_one").pass);
  }
  SECTION("natural variant checks q == p and min p >= 2") {
    ExponentTriple good{ExponentField::constant(kSquare, 2.5),
                        ExponentField::constant(kSquare, 2.5),
                        ExponentField::constant(kSquare, 0.5), GrowthVariant::natural};
    CHECK(variant_conditions_pass(check_admissibility(good, 2), GrowthVariant::natural));
    ExponentTriple low_p{ExponentField::constant(kSquare, 1.9),
                         ExponentField::constant(kSquare, 1.9),
                         ExponentField::constant(kSquare, 0.5), GrowthVariant::natural};
    CHECK_FALSE(variant_conditions_pass(check_admissibility(low_p, 2), GrowthVariant::natural));
  }
  SECTION("constant instances with q strictly inside the corollary range pass") {
    // p in (1,2), q in (max{1, p-1, 2p/(2+p)}, p), eta = p-1
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const double p = 1.05 + 0.9 * u(rng);
      const double lo = std::max({1.0, p - 1.0, 2.0 * p / (2.0 + p)});
      const double q = lo + (p - lo) * (0.05 + 0.9 * u(rng));
      ExponentTriple t{ExponentField::constant(kSquare, p),
                       ExponentField::constant(kSquare, q),
                       ExponentField::constant(kSquare, p - 1.0), GrowthVariant::subnatural};
      auto rep = check_admissibility(t, 2);
      INFO("p=" << p << " q=" << q);
      CHECK(rep.all_pass());
    }
  }
}

TEST_CASE("check_log_holder: constant, Lipschitz, jump", "[exponents]") {
  SECTION("constant field has zero modulus") {
    auto rep = check_log_holder(ExponentField::constant(kUnit, 2.0), 2048);
    CHECK(rep.constant_estimate == 0.0);
    CHECK_FALSE(rep.unbounded);
  }
  SECTION("Lipschitz field has a finite modulus near sup d*|log d|") {
    auto rep = check_log_holder(ExponentField::from_expression(kUnit, "2+x"), 8192);
    CHECK_FALSE(rep.unbounded);
    // |e(x)-e(y)| * |log|x-y|| = d |log d| <= 1/e on separations below 1/2
    CHECK(rep.constant_estimate > 0.25);
    CHECK(rep.constant_estimate <= 1.0 / std::exp(1.0) + 1e-6);
  }
  SECTION("jump discontinuity is flagged as unbounded") {
    ExponentField jump(kUnit, [](const Point& p) { return p.x < 0.5 ? 2.0 : 3.0; }, "jump");
    auto rep = check_log_holder(jump, 8192);
    CHECK(rep.unbounded);
  }
}

TEST_CASE("partition_by_exponent: masks by barycenter value", "[exponents]") {
  auto grid = build_grid(kUnit, 10);
  SECTION("p == 2 everywhere goes to the degenerate region") {
    auto part = partition_by_exponent(ExponentField::constant(kUnit, 2.0), *grid);
    for (std::size_t e = 0; e < grid->n_elements(); ++e) {
      CHECK(part.degenerate_mask[e] == 1);
      CHECK(part.singular_mask[e] == 0);
    }
  }
  SECTION("p == 1.5 everywhere goes to the singular region") {
    auto part = partition_by_exponent(ExponentField::constant(kUnit, 1.5), *grid);
    for (std::size_t e = 0; e < grid->n_elements(); ++e) CHECK(part.singular_mask[e] == 1);
  }
  SECTION("p(x)=1.5+x splits at x=0.5 up to one element") {
    auto part = partition_by_exponent(ExponentField::from_expression(kUnit, "1.5+x"), *grid);
    // barycenters below 0.5 are singular, above are degenerate
    for (std::size_t e = 0; e < grid->n_elements(); ++e) {
      const double bx = grid->barycenter(e).x;
      CHECK(part.degenerate_mask[e] == (bx >= 0.5 ? 1 : 0));
      CHECK((part.degenerate_mask[e] ^ part.singular_mask[e]) == 1);
    }
  }
  SECTION("masks are disjoint and exhaustive for a varying field") {
    auto grid2 = build_grid(kSquare, 6, 6);
    auto part =
        partition_by_exponent(ExponentField::from_expression(kSquare, "1.7+x+y"), *grid2);
    for (std::size_t e = 0; e < grid2->n_elements(); ++e)
      CHECK(part.degenerate_mask[e] + part.singular_mask[e] == 1);
  }
}
