// Per-element quadrature rules and a deterministic ordered integrator.
//
// Two rules cover everything downstream: the barycenter rule (one point per
// element, used for nonlinear gradient integrands where a single exponent
// sample per element is wanted) and a Gauss-type rule for data terms
// (2-point Gauss per interval in 1d, edge midpoints per triangle in 2d).

#ifndef VEXLAB_QUADRATURE_HPP
#define VEXLAB_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vexlab/grid.hpp"

namespace vexlab {

struct QuadratureRule {
  GridPtr grid;
  int points_per_element = 1;
  int degree = 1;  // declared polynomial exactness
  std::vector<Point> points;    // n_elements * points_per_element
  std::vector<double> weights;  // same layout; per element they sum to its volume

  std::size_t size() const { return points.size(); }
  std::size_t element_of(std::size_t q) const {
    return q / static_cast<std::size_t>(points_per_element);
  }
};

inline QuadratureRule barycenter_rule(GridPtr grid) {
  QuadratureRule r;
  r.grid = grid;
  r.points_per_element = 1;
  r.degree = 1;
  r.points.resize(grid->n_elements());
  r.weights.resize(grid->n_elements());
  for (std::size_t e = 0; e < grid->n_elements(); ++e) {
    r.points[e] = grid->barycenter(e);
    r.weights[e] = grid->element_volumes[e];
  }
  return r;
}

inline QuadratureRule gauss_rule(GridPtr grid) {
  QuadratureRule r;
  r.grid = grid;
  if (grid->dimension == 1) {
    r.points_per_element = 2;
    r.degree = 3;
    const double s = 1.0 / std::sqrt(3.0);
    for (std::size_t e = 0; e < grid->n_elements(); ++e) {
      const auto& el = grid->elements[e];
      const double x0 = grid->nodes[static_cast<std::size_t>(el[0])].x;
      const double x1 = grid->nodes[static_cast<std::size_t>(el[1])].x;
      const double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0);
      r.points.push_back({mid - half * s, 0.0});
      r.points.push_back({mid + half * s, 0.0});
      r.weights.push_back(half);
      r.weights.push_back(half);
    }
  } else {
    r.points_per_element = 3;
    r.degree = 2;
    for (std::size_t e = 0; e < grid->n_elements(); ++e) {
      const auto& el = grid->elements[e];
      const Point& p0 = grid->nodes[static_cast<std::size_t>(el[0])];
      const Point& p1 = grid->nodes[static_cast<std::size_t>(el[1])];
      const Point& p2 = grid->nodes[static_cast<std::size_t>(el[2])];
      const double w = grid->element_volumes[e] / 3.0;
      r.points.push_back({0.5 * (p0.x + p1.x), 0.5 * (p0.y + p1.y)});
      r.points.push_back({0.5 * (p1.x + p2.x), 0.5 * (p1.y + p2.y)});
      r.points.push_back({0.5 * (p2.x + p0.x), 0.5 * (p2.y + p0.y)});
      r.weights.push_back(w);
      r.weights.push_back(w);
      r.weights.push_back(w);
    }
  }
  return r;
}

// Ordered weighted sum; deterministic for a fixed rule.
inline double integrate(std::span<const double> point_values, const QuadratureRule& rule) {
  if (point_values.size() != rule.weights.size())
    throw std::invalid_argument("integrate: value count does not match quadrature rule");
  double acc = 0.0;
  for (std::size_t q = 0; q < point_values.size(); ++q)
    acc += rule.weights[q] * point_values[q];
  return acc;
}

// P1 interpolant of a nodal function at the rule's points.
inline std::vector<double> sample_at_points(const GridFunction& u, const QuadratureRule& rule) {
  std::vector<double> vals(rule.size());
  const Grid& g = u.grid();
  if (rule.points_per_element == 1 && g.dimension >= 1) {
    // barycenter value of a P1 function is the nodal mean
    const int npe = g.nodes_per_element();
    for (std::size_t e = 0; e < g.n_elements(); ++e) {
      double s = 0.0;
      for (int v = 0; v < npe; ++v)
        s += u[static_cast<std::size_t>(g.elements[e][static_cast<std::size_t>(v)])];
      vals[e] = s / npe;
    }
    return vals;
  }
  for (std::size_t q = 0; q < rule.size(); ++q) vals[q] = evaluate(u, rule.points[q]);
  return vals;
}

template <class F>
std::vector<double> sample_function(F&& f, const QuadratureRule& rule) {
  std::vector<double> vals(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) vals[q] = f(rule.points[q]);
  return vals;
}

}  // namespace vexlab

#endif  // VEXLAB_QUADRATURE_HPP
