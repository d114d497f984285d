// Box domains in one and two dimensions with a boundary marker predicate.

#ifndef VEXLAB_DOMAIN_HPP
#define VEXLAB_DOMAIN_HPP

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace vexlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

class DomainDescriptor {
public:
  using BoundaryMarker = std::function<bool(const Point&)>;

  static DomainDescriptor interval(double a, double b) {
    return DomainDescriptor(1, {a, 0.0}, {b, 1.0});
  }

  static DomainDescriptor box(double ax, double bx, double ay, double by) {
    return DomainDescriptor(2, {ax, ay}, {bx, by});
  }

  static DomainDescriptor unit_interval() { return interval(0.0, 1.0); }
  static DomainDescriptor unit_square() { return box(0.0, 1.0, 0.0, 1.0); }

  int dimension() const { return dimension_; }
  double lo(int axis) const { return lo_[static_cast<std::size_t>(axis)]; }
  double hi(int axis) const { return hi_[static_cast<std::size_t>(axis)]; }
  double extent(int axis) const { return hi(axis) - lo(axis); }

  double volume() const {
    return dimension_ == 1 ? extent(0) : extent(0) * extent(1);
  }

  double diameter() const {
    return dimension_ == 1 ? extent(0) : std::hypot(extent(0), extent(1));
  }

  bool contains(const Point& p) const {
    const double tol = 1e-12 * diameter();
    if (p.x < lo(0) - tol || p.x > hi(0) + tol) return false;
    if (dimension_ == 2 && (p.y < lo(1) - tol || p.y > hi(1) + tol)) return false;
    return true;
  }

  bool on_boundary(const Point& p) const { return boundary_marker_(p); }

  void set_boundary_marker(BoundaryMarker marker) { boundary_marker_ = std::move(marker); }

private:
  DomainDescriptor(int dim, std::array<double, 2> lo_box, std::array<double, 2> hi_box)
      : dimension_(dim), lo_(lo_box), hi_(hi_box) {
    if (dim != 1 && dim != 2)
      throw std::invalid_argument("domain dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a)
      if (!(hi_[static_cast<std::size_t>(a)] > lo_[static_cast<std::size_t>(a)]))
        throw std::invalid_argument("domain box must have positive volume");
    const auto lo = lo_;
    const auto hi = hi_;
    const double tol = 1e-12 * (1.0 + diameter());
    boundary_marker_ = [dim, lo, hi, tol](const Point& p) {
      if (std::fabs(p.x - lo[0]) < tol || std::fabs(p.x - hi[0]) < tol) return true;
      if (dim == 2 && (std::fabs(p.y - lo[1]) < tol || std::fabs(p.y - hi[1]) < tol))
        return true;
      return false;
    };
  }

  int dimension_;
  std::array<double, 2> lo_;
  std::array<double, 2> hi_;
  BoundaryMarker boundary_marker_;
};

}  // namespace vexlab

#endif  // VEXLAB_DOMAIN_HPP
