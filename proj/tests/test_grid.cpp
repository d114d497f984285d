#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "vexlab/grid.hpp"
#include "vexlab/quadrature.hpp"

using namespace vexlab;

TEST_CASE("build_grid: 1d counts and boundary", "[grid]") {
  auto g = build_grid(DomainDescriptor::unit_interval(), 4);
  CHECK(g->n_nodes() == 5);
  CHECK(g->n_elements() == 4);
  REQUIRE(g->boundary_nodes.size() == 2);
  CHECK(g->nodes[static_cast<std::size_t>(g->boundary_nodes[0])].x == 0.0);
  CHECK(g->nodes[static_cast<std::size_t>(g->boundary_nodes[1])].x == 1.0);
  for (double v : g->element_volumes) CHECK(v == Catch::Approx(0.25));
}

TEST_CASE("build_grid: 2d counts, orientation, boundary set", "[grid]") {
  auto g = build_grid(DomainDescriptor::unit_square(), 2, 2);
  CHECK(g->n_nodes() == 9);
  CHECK(g->n_elements() == 8);
  double vol = 0.0;
  for (double v : g->element_volumes) {
    CHECK(v > 0.0);
    vol += v;
  }
  CHECK(vol == Catch::Approx(1.0));
  // boundary nodes are exactly those on the box edge: all but the center
  CHECK(g->boundary_nodes.size() == 8);
}

TEST_CASE("build_grid: rejects resolution below 2", "[grid]") {
  CHECK_THROWS_AS(build_grid(DomainDescriptor::unit_interval(), 1), std::invalid_argument);
}

TEST_CASE("element_gradient: linear exactness", "[grid]") {
  SECTION("u(x)=x in 1d") {
    auto g = build_grid(DomainDescriptor::unit_interval(), 7);
    auto u = GridFunction::sample(g, [](const Point& p) { return p.x; });
    for (std::size_t e = 0; e < g->n_elements(); ++e)
      CHECK(element_gradient(u, e)[0] == Catch::Approx(1.0).margin(1e-13));
  }
  SECTION("u(x,y)=3y on triangles") {
    auto g = build_grid(DomainDescriptor::unit_square(), 3, 3);
    auto u = GridFunction::sample(g, [](const Point& p) { return 3.0 * p.y; });
    for (std::size_t e = 0; e < g->n_elements(); ++e) {
      auto grad = element_gradient(u, e);
      CHECK(grad[0] == Catch::Approx(0.0).margin(1e-13));
      CHECK(grad[1] == Catch::Approx(3.0).margin(1e-13));
    }
  }
  SECTION("u(x)=x^2 difference quotient on first element") {
    auto g = build_grid(DomainDescriptor::unit_interval(), 8);
    auto u = GridFunction::sample(g, [](const Point& p) { return p.x * p.x; });
    const double h = 1.0 / 8.0;
    CHECK(element_gradient(u, 0)[0] == Catch::Approx(h));
  }
  SECTION("global affine function exact on every 2d element") {
    auto g = build_grid(DomainDescriptor::box(0.0, 2.0, -1.0, 1.0), 5, 4);
    auto u = GridFunction::sample(g, [](const Point& p) { return 0.7 * p.x - 1.3 * p.y + 0.2; });
    for (std::size_t e = 0; e < g->n_elements(); ++e) {
      auto grad = element_gradient(u, e);
      CHECK(std::fabs(grad[0] - 0.7) < 1e-13);
      CHECK(std::fabs(grad[1] + 1.3) < 1e-13);
    }
  }
}

TEST_CASE("quadrature: weights positive and sum to element volume", "[grid]") {
  auto g = build_grid(DomainDescriptor::unit_square(), 3, 2);
  for (const auto& rule : {barycenter_rule(g), gauss_rule(g)}) {
    std::vector<double> per_element(g->n_elements(), 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      per_element[rule.element_of(q)] += rule.weights[q];
    }
    for (std::size_t e = 0; e < g->n_elements(); ++e)
      CHECK(per_element[e] == Catch::Approx(g->element_volumes[e]));
  }
}

TEST_CASE("integrate: exactness and linearity", "[grid]") {
  auto g = build_grid(DomainDescriptor::unit_interval(), 4);

  SECTION("constant one integrates to domain volume") {
    auto rule = barycenter_rule(g);
    std::vector<double> ones(rule.size(), 1.0);
    CHECK(integrate(ones, rule) == Catch::Approx(1.0));
  }
  SECTION("midpoint rule is exact for linear integrands") {
    auto rule = barycenter_rule(g);
    auto vals = sample_function([](const Point& p) { return p.x; }, rule);
    CHECK(integrate(vals, rule) == Catch::Approx(0.5).epsilon(1e-14));
  }
  SECTION("two-point Gauss integrates x^2 exactly") {
    auto rule = gauss_rule(g);
    auto vals = sample_function([](const Point& p) { return p.x * p.x; }, rule);
    CHECK(std::fabs(integrate(vals, rule) - 1.0 / 3.0) < 1e-14);
  }
  SECTION("linearity in the field argument") {
    auto rule = gauss_rule(g);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> a(rule.size()), b(rule.size()), combo(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
      combo[i] = 2.0 * a[i] - 3.5 * b[i];
    }
    CHECK(integrate(combo, rule) ==
          Catch::Approx(2.0 * integrate(a, rule) - 3.5 * integrate(b, rule)).margin(1e-14));
  }
  SECTION("count mismatch is rejected") {
    auto rule = gauss_rule(g);
    std::vector<double> wrong(rule.size() + 1, 1.0);
    CHECK_THROWS_AS(integrate(wrong, rule), std::invalid_argument);
  }
}

TEST_CASE("2d gauss rule integrates quadratics exactly", "[grid]") {
  auto g = build_grid(DomainDescriptor::unit_square(), 3, 3);
  auto rule = gauss_rule(g);
  auto vals = sample_function([](const Point& p) { return p.x * p.x + p.x * p.y; }, rule);
  CHECK(integrate(vals, rule) == Catch::Approx(1.0 / 3.0 + 0.25).epsilon(1e-13));
}

TEST_CASE("dirichlet_project: zeroes the boundary, idempotent", "[grid]") {
  auto g = build_grid(DomainDescriptor::unit_interval(), 6);
  SECTION("constant one") {
    auto u = GridFunction(g, 1.0);
    auto v = dirichlet_project(u);
    CHECK(v[0] == 0.0);
    CHECK(v[6] == 0.0);
    for (std::size_t i = 1; i < 6; ++i) CHECK(v[i] == 1.0);
  }
  SECTION("random function: boundary exactly zero, idempotent") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    auto u = GridFunction::sample(g, [&](const Point&) { return dist(rng); });
    auto v = dirichlet_project(u);
    double bmax = std::max(std::fabs(v[0]), std::fabs(v[g->n_nodes() - 1]));
    CHECK(bmax == 0.0);
    auto w = dirichlet_project(v);
    CHECK(w.values() == v.values());
  }
}

TEST_CASE("evaluate and prolong reproduce P1 functions on nested grids", "[grid]") {
  auto coarse = build_grid(DomainDescriptor::unit_interval(), 8);
  auto fine = build_grid(DomainDescriptor::unit_interval(), 16);
  auto u = GridFunction::sample(coarse, [](const Point& p) { return p.x * (1.0 - p.x); });
  auto v = prolong(u, fine);
  // at shared nodes the values match; at midpoints they are element means
  for (std::size_t i = 0; i < coarse->n_nodes(); ++i)
    CHECK(v[2 * i] == Catch::Approx(u[i]).margin(1e-14));
  CHECK(evaluate(u, {0.5, 0.0}) == Catch::Approx(0.25));
}

TEST_CASE("csv round trip with exact node matching", "[grid]") {
  namespace fs = std::filesystem;
  auto g = build_grid(DomainDescriptor::unit_square(), 3, 2);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  auto u = GridFunction::sample(g, [&](const Point&) { return dist(rng); });
  const auto path = fs::temp_directory_path() / "vexlab_test_field.csv";
  write_csv(u, path.string());
  auto v = read_csv(g, path.string());
  for (std::size_t i = 0; i < g->n_nodes(); ++i) CHECK(v[i] == u[i]);
  auto other = build_grid(DomainDescriptor::unit_square(), 2, 2);
  CHECK_THROWS(read_csv(other, path.string()));
  fs::remove(path);
}
