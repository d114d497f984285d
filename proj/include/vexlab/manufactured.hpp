// Manufactured solutions: pick an exact u*, substitute it into the strong
// form to get the forcing, then measure the discrete solver against u*.
//
// With m = |1 - 2x| and u* = x(1-x) on (0,1), the flux is
// A = sign(1-2x) m^{p(x)-1} and
//   -A' = 2 (p-1) m^{p-2} - sign(1-2x) p'(x) log(m) m^{p-1},
// so the forcing for -div(|u'|^{p-2} u') + |u'|^q = f (lambda = 0) is
//   f = 2 (p-1) m^{p-2} - sign(1-2x) p'(x) log(m) m^{p-1} + m^q,
// continuous for p > 2 with f(1/2) = 0, and plain f = 2 + m for p = 2, q = 1.

#ifndef VEXLAB_MANUFACTURED_HPP
#define VEXLAB_MANUFACTURED_HPP

#include <cmath>
#include <functional>
#include <string>

#include "vexlab/problem.hpp"
#include "vexlab/solver.hpp"

namespace vexlab {

struct ManufacturedCase {
  std::string name;
  DomainDescriptor domain = DomainDescriptor::unit_interval();
  ExponentTriple exponents{ExponentField::constant(DomainDescriptor::unit_interval(), 2.0),
                           ExponentField::constant(DomainDescriptor::unit_interval(), 1.0),
                           ExponentField::constant(DomainDescriptor::unit_interval(), 0.0),
                           GrowthVariant::subnatural};
  std::function<double(const Point&)> exact;
  std::function<double(const Point&)> forcing;
};

// p = 2, q = 1, u* = x(1-x), f = 2 + |1-2x|.
inline ManufacturedCase manufactured_linear_case() {
  ManufacturedCase c;
  c.name = "p2_q1";
  c.domain = DomainDescriptor::unit_interval();
  c.exponents = {ExponentField::constant(c.domain, 2.0), ExponentField::constant(c.domain, 1.0),
                 ExponentField::constant(c.domain, 0.0), GrowthVariant::subnatural};
  c.exact = [](const Point& p) { return p.x * (1.0 - p.x); };
  c.forcing = [](const Point& p) { return 2.0 + std::fabs(1.0 - 2.0 * p.x); };
  return c;
}

// p(x) = 2.2 + 0.2 x, q = p - 0.5, u* = x(1-x).
inline ManufacturedCase manufactured_variable_case() {
  ManufacturedCase c;
  c.name = "variable_p";
  c.domain = DomainDescriptor::unit_interval();
  c.exponents = {ExponentField::from_expression(c.domain, "2.2+0.2*x"),
                 ExponentField::from_expression(c.domain, "1.7+0.2*x"),
                 ExponentField::constant(c.domain, 0.0), GrowthVariant::subnatural};
  c.exact = [](const Point& p) { return p.x * (1.0 - p.x); };
  c.forcing = [](const Point& pt) {
    const double x = pt.x;
    const double m = std::fabs(1.0 - 2.0 * x);
    const double sgn = (1.0 - 2.0 * x) >= 0.0 ? 1.0 : -1.0;
    const double p = 2.2 + 0.2 * x;
    const double q = p - 0.5;
    const double dp = 0.2;
    if (m == 0.0) return 0.0;
    return 2.0 * (p - 1.0) * std::pow(m, p - 2.0) -
           sgn * dp * std::log(m) * std::pow(m, p - 1.0) + std::pow(m, q);
  };
  return c;
}

// 2d check on the unit square: p = 2, q = 1, u* = x(1-x)y(1-y).
inline ManufacturedCase manufactured_square_case() {
  ManufacturedCase c;
  c.name = "square_p2_q1";
  c.domain = DomainDescriptor::unit_square();
  c.exponents = {ExponentField::constant(c.domain, 2.0), ExponentField::constant(c.domain, 1.0),
                 ExponentField::constant(c.domain, 0.0), GrowthVariant::subnatural};
  c.exact = [](const Point& p) { return p.x * (1.0 - p.x) * p.y * (1.0 - p.y); };
  c.forcing = [](const Point& p) {
    const double gx = (1.0 - 2.0 * p.x) * p.y * (1.0 - p.y);
    const double gy = p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y);
    return 2.0 * (p.y * (1.0 - p.y) + p.x * (1.0 - p.x)) + std::hypot(gx, gy);
  };
  return c;
}

struct ManufacturedResult {
  int resolution = 0;
  double h = 0.0;
  double max_error = 0.0;
  int newton_iterations = 0;
};

// Solve the unregularized equation (exact gradient power, lambda = 0) at
// one resolution and report the max-norm nodal error against u*.
inline ManufacturedResult run_manufactured(const ManufacturedCase& c, int resolution,
                                           const SolverConfig& cfg = {}) {
  ManufacturedResult res;
  res.resolution = resolution;
  auto grid = build_grid(c.domain, resolution,
                         c.domain.dimension() == 2 ? resolution : 0);
  res.h = c.domain.extent(0) / resolution;

  ProblemSpec spec;
  spec.grid = grid;
  spec.exponents = c.exponents;
  spec.f = GridFunction::sample(grid, c.forcing);
  spec.g = GridFunction(grid, 0.0);
  spec.lambda = 0.0;

  NewtonTrace trace;
  const GridFunction u =
      solve_regularized(spec, cfg, std::nullopt, std::nullopt, GridFunction(grid, 0.0), trace);
  res.newton_iterations = trace.iterations;

  for (std::size_t i = 0; i < grid->n_nodes(); ++i)
    res.max_error = std::max(res.max_error, std::fabs(u[i] - c.exact(grid->nodes[i])));
  return res;
}

}  // namespace vexlab

#endif  // VEXLAB_MANUFACTURED_HPP
