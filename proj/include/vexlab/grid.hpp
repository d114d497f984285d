// Simplicial grids on box domains: intervals in 1d, structured triangle
// meshes in 2d, with piecewise-linear (P1) nodal functions on top.
//
// Gradients of P1 functions are constant per element, which is what lets
// every nonlinear gradient integrand downstream be integrated with a single
// exponent sample per element.

#ifndef VEXLAB_GRID_HPP
#define VEXLAB_GRID_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vexlab/domain.hpp"

namespace vexlab {

struct Grid {
  DomainDescriptor domain = DomainDescriptor::unit_interval();
  int dimension = 1;
  int nx = 0;  // cells along x
  int ny = 0;  // cells along y (0 in 1d)
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> elements;  // 1d: {a, b, -1}; 2d: triangle nodes
  std::vector<double> element_volumes;
  std::vector<int> boundary_nodes;
  std::vector<char> node_on_boundary;
  std::vector<std::vector<int>> node_elements;  // elements touching each node

  int nodes_per_element() const { return dimension + 1; }
  std::size_t n_nodes() const { return nodes.size(); }
  std::size_t n_elements() const { return elements.size(); }

  Point barycenter(std::size_t e) const {
    const auto& el = elements[e];
    Point c{0.0, 0.0};
    const int npe = nodes_per_element();
    for (int v = 0; v < npe; ++v) {
      c.x += nodes[static_cast<std::size_t>(el[static_cast<std::size_t>(v)])].x;
      c.y += nodes[static_cast<std::size_t>(el[static_cast<std::size_t>(v)])].y;
    }
    c.x /= npe;
    c.y /= npe;
    return c;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(const DomainDescriptor& domain, int resolution_x,
                          int resolution_y = 0) {
  if (resolution_x < 2)
    throw std::invalid_argument("build_grid: resolution must be at least 2");
  auto g = std::make_shared<Grid>();
  g->domain = domain;
  g->dimension = domain.dimension();
  g->nx = resolution_x;

  if (g->dimension == 1) {
    const double a = domain.lo(0), b = domain.hi(0);
    const int n = resolution_x;
    const double h = (b - a) / n;
    g->nodes.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g->nodes[static_cast<std::size_t>(i)] = {a + i * h, 0.0};
    // keep endpoints exact so boundary detection is robust
    g->nodes.front() = {a, 0.0};
    g->nodes.back() = {b, 0.0};
    g->elements.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g->elements.push_back({i, i + 1, -1});
  } else {
    const int nx = resolution_x;
    const int ny = resolution_y > 0 ? resolution_y : resolution_x;
    if (ny < 2) throw std::invalid_argument("build_grid: resolution must be at least 2");
    g->ny = ny;
    const double ax = domain.lo(0), ay = domain.lo(1);
    const double hx = domain.extent(0) / nx, hy = domain.extent(1) / ny;
    g->nodes.resize(static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1));
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        double px = (i == nx) ? g->domain.hi(0) : ax + i * hx;
        double py = (j == ny) ? g->domain.hi(1) : ay + j * hy;
        g->nodes[static_cast<std::size_t>(id(i, j))] = {px, py};
      }
    g->elements.reserve(2u * static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
        g->elements.push_back({a, b, c});
        g->elements.push_back({a, c, d});
      }
  }

  g->element_volumes.resize(g->n_elements());
  for (std::size_t e = 0; e < g->n_elements(); ++e) {
    const auto& el = g->elements[e];
    if (g->dimension == 1) {
      g->element_volumes[e] = g->nodes[static_cast<std::size_t>(el[1])].x -
                              g->nodes[static_cast<std::size_t>(el[0])].x;
    } else {
      const Point& p0 = g->nodes[static_cast<std::size_t>(el[0])];
      const Point& p1 = g->nodes[static_cast<std::size_t>(el[1])];
      const Point& p2 = g->nodes[static_cast<std::size_t>(el[2])];
      g->element_volumes[e] =
          0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    }
    if (!(g->element_volumes[e] > 0.0))
      throw std::runtime_error("build_grid: non-positive element volume");
  }

  g->node_on_boundary.assign(g->n_nodes(), 0);
  for (std::size_t i = 0; i < g->n_nodes(); ++i)
    if (domain.on_boundary(g->nodes[i])) {
      g->node_on_boundary[i] = 1;
      g->boundary_nodes.push_back(static_cast<int>(i));
    }

  g->node_elements.resize(g->n_nodes());
  for (std::size_t e = 0; e < g->n_elements(); ++e)
    for (int v = 0; v < g->nodes_per_element(); ++v)
      g->node_elements[static_cast<std::size_t>(g->elements[e][static_cast<std::size_t>(v)])]
          .push_back(static_cast<int>(e));
  return g;
}

class GridFunction {
public:
  GridFunction() = default;

  explicit GridFunction(GridPtr grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_->n_nodes(), fill) {}

  GridFunction(GridPtr grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->n_nodes())
      throw std::invalid_argument("GridFunction: value count must equal node count");
  }

  template <class F>
  static GridFunction sample(GridPtr grid, F&& f) {
    GridFunction u(grid);
    for (std::size_t i = 0; i < grid->n_nodes(); ++i)
      u.values_[i] = f(grid->nodes[i]);
    return u;
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
  }

private:
  GridPtr grid_;
  std::vector<double> values_;
};

// Constant gradient of the P1 interpolant on one element.
inline std::array<double, 2> element_gradient(const GridFunction& u, std::size_t e) {
  const Grid& g = u.grid();
  const auto& el = g.elements[e];
  if (g.dimension == 1) {
    const double x0 = g.nodes[static_cast<std::size_t>(el[0])].x;
    const double x1 = g.nodes[static_cast<std::size_t>(el[1])].x;
    return {(u[static_cast<std::size_t>(el[1])] - u[static_cast<std::size_t>(el[0])]) / (x1 - x0),
            0.0};
  }
  const Point& p0 = g.nodes[static_cast<std::size_t>(el[0])];
  const Point& p1 = g.nodes[static_cast<std::size_t>(el[1])];
  const Point& p2 = g.nodes[static_cast<std::size_t>(el[2])];
  const double v0 = u[static_cast<std::size_t>(el[0])];
  const double v1 = u[static_cast<std::size_t>(el[1])];
  const double v2 = u[static_cast<std::size_t>(el[2])];
  const double two_area = 2.0 * g.element_volumes[e];
  // grad = sum_i v_i * (perpendicular of opposite edge) / (2A)
  const double gx = (v0 * (p1.y - p2.y) + v1 * (p2.y - p0.y) + v2 * (p0.y - p1.y)) / two_area;
  const double gy = (v0 * (p2.x - p1.x) + v1 * (p0.x - p2.x) + v2 * (p1.x - p0.x)) / two_area;
  return {gx, gy};
}

// Zero out boundary nodal values (homogeneous Dirichlet projection).
inline GridFunction dirichlet_project(const GridFunction& u) {
  GridFunction v = u;
  const Grid& g = u.grid();
  for (int i : g.boundary_nodes) v[static_cast<std::size_t>(i)] = 0.0;
  return v;
}

namespace detail {
// Locate the cell indices for a point on a structured grid, clamped into range.
inline int clamp_cell(double t, double lo, double h, int n) {
  int c = static_cast<int>(std::floor((t - lo) / h));
  return std::clamp(c, 0, n - 1);
}
}  // namespace detail

// Evaluate the P1 interpolant at an arbitrary point of the domain.
inline double evaluate(const GridFunction& u, const Point& p) {
  const Grid& g = u.grid();
  if (g.dimension == 1) {
    const double lo = g.domain.lo(0);
    const double h = g.domain.extent(0) / g.nx;
    const int c = detail::clamp_cell(p.x, lo, h, g.nx);
    const auto& el = g.elements[static_cast<std::size_t>(c)];
    const double x0 = g.nodes[static_cast<std::size_t>(el[0])].x;
    const double x1 = g.nodes[static_cast<std::size_t>(el[1])].x;
    const double t = std::clamp((p.x - x0) / (x1 - x0), 0.0, 1.0);
    return (1.0 - t) * u[static_cast<std::size_t>(el[0])] + t * u[static_cast<std::size_t>(el[1])];
  }
  const double hx = g.domain.extent(0) / g.nx;
  const double hy = g.domain.extent(1) / g.ny;
  const int ci = detail::clamp_cell(p.x, g.domain.lo(0), hx, g.nx);
  const int cj = detail::clamp_cell(p.y, g.domain.lo(1), hy, g.ny);
  const std::size_t base = 2u * (static_cast<std::size_t>(cj) * g.nx + ci);
  // pick the triangle of the cell containing p (split along the a-c diagonal)
  const double lx = (p.x - (g.domain.lo(0) + ci * hx)) / hx;
  const double ly = (p.y - (g.domain.lo(1) + cj * hy)) / hy;
  const std::size_t e = (ly <= lx + 1e-14) ? base : base + 1;
  const auto& el = g.elements[e];
  const Point& p0 = g.nodes[static_cast<std::size_t>(el[0])];
  const Point& p1 = g.nodes[static_cast<std::size_t>(el[1])];
  const Point& p2 = g.nodes[static_cast<std::size_t>(el[2])];
  const double two_area = 2.0 * g.element_volumes[e];
  auto cross = [](const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  };
  const double l0 = cross(p1, p2, p) / two_area;
  const double l1 = cross(p2, p0, p) / two_area;
  const double l2 = 1.0 - l0 - l1;
  return l0 * u[static_cast<std::size_t>(el[0])] + l1 * u[static_cast<std::size_t>(el[1])] +
         l2 * u[static_cast<std::size_t>(el[2])];
}

// Interpolate onto another grid over the same domain.
inline GridFunction prolong(const GridFunction& u, GridPtr fine) {
  return GridFunction::sample(std::move(fine), [&u](const Point& p) { return evaluate(u, p); });
}

inline void write_csv(const GridFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  const Grid& g = u.grid();
  out.precision(17);
  out << (g.dimension == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    out << g.nodes[i].x;
    if (g.dimension == 2) out << ',' << g.nodes[i].y;
    out << ',' << u[i] << '\n';
  }
}

// Import nodal values; rows must match the grid nodes exactly and in order.
inline GridFunction read_csv(GridPtr grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path);
  GridFunction u(grid);
  const double tol = 1e-12 * (1.0 + grid->domain.diameter());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= grid->n_nodes())
      throw std::runtime_error("read_csv: more rows than grid nodes in " + path);
    std::istringstream ss(line);
    std::string tok;
    std::array<double, 3> vals{};
    int ntok = 0;
    while (std::getline(ss, tok, ',') && ntok < 3) vals[static_cast<std::size_t>(ntok++)] = std::stod(tok);
    const int expected = grid->dimension + 1;
    if (ntok != expected)
      throw std::runtime_error("read_csv: row " + std::to_string(row + 1) + " has " +
                               std::to_string(ntok) + " columns, expected " +
                               std::to_string(expected));
    const Point& node = grid->nodes[row];
    const double dy = grid->dimension == 2 ? vals[1] - node.y : 0.0;
    if (std::fabs(vals[0] - node.x) > tol || std::fabs(dy) > tol)
      throw std::runtime_error("read_csv: row " + std::to_string(row + 1) +
                               " does not match grid node coordinates");
    u[row] = vals[static_cast<std::size_t>(grid->dimension)];
    ++row;
  }
  if (row != grid->n_nodes())
    throw std::runtime_error("read_csv: fewer rows than grid nodes in " + path);
  return u;
}

}  // namespace vexlab

#endif  // VEXLAB_GRID_HPP
