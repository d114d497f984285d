// Variable exponent fields p(.), q(.), eta(.) on a box domain, their derived
// exponents (conjugate, Sobolev conjugate, data exponents) and the
// admissibility, log-Hoelder and region-partition diagnostics.
//
// A field evaluates deterministically from a closed-form expression, a nodal
// interpolant, or an arbitrary callable; its extrema are cached from a fixed
// validation sample grid (1024 points in 1d, 128x128 in 2d) rather than
// computed symbolically.

#ifndef VEXLAB_EXPONENTS_HPP
#define VEXLAB_EXPONENTS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vexlab/domain.hpp"
#include "vexlab/expression.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/validation.hpp"

namespace vexlab {

// Margin below which a strict pointwise inequality is reported as violated.
inline constexpr double kStrictSlack = 1e-9;

class ExponentField {
public:
  using Evaluator = std::function<double(const Point&)>;

  // placeholder field; fails every admissibility gate until assigned
  ExponentField()
      : ExponentField(DomainDescriptor::unit_interval(),
                      [](const Point&) { return 1.0; }, "unset", 2) {}

  ExponentField(DomainDescriptor domain, Evaluator eval, std::string label = "",
                int validation_resolution = 0)
      : domain_(std::move(domain)),
        eval_(std::move(eval)),
        label_(std::move(label)) {
    cache_extrema(validation_resolution);
  }

  static ExponentField constant(const DomainDescriptor& domain, double value,
                                std::string label = "") {
    if (label.empty()) label = std::to_string(value);
    return ExponentField(domain, [value](const Point&) { return value; }, std::move(label));
  }

  static ExponentField from_expression(const DomainDescriptor& domain,
                                       const std::string& text) {
    Expression ex = Expression::parse(text);
    return ExponentField(
        domain, [ex](const Point& p) { return ex.eval(p.x, p.y); }, text);
  }

  static ExponentField from_nodal(const GridFunction& samples, std::string label = "nodal") {
    GridFunction u = samples;
    return ExponentField(u.grid().domain,
                         [u](const Point& p) { return evaluate(u, p); },
                         std::move(label));
  }

  double operator()(const Point& p) const { return eval_(p); }
  double operator()(double x, double y = 0.0) const { return eval_({x, y}); }

  double min() const { return min_; }
  double max() const { return max_; }
  const DomainDescriptor& domain() const { return domain_; }
  const std::string& label() const { return label_; }

  const std::vector<Point>& validation_points() const { return validation_points_; }

private:
  void cache_extrema(int resolution) {
    const int dim = domain_.dimension();
    if (resolution <= 0) resolution = dim == 1 ? 1024 : 128;
    min_ = std::numeric_limits<double>::infinity();
    max_ = -std::numeric_limits<double>::infinity();
    if (dim == 1) {
      validation_points_.reserve(static_cast<std::size_t>(resolution) + 1);
      for (int i = 0; i <= resolution; ++i) {
        const double t = static_cast<double>(i) / resolution;
        validation_points_.push_back({domain_.lo(0) + t * domain_.extent(0), 0.0});
      }
    } else {
      validation_points_.reserve(static_cast<std::size_t>(resolution + 1) *
                                 static_cast<std::size_t>(resolution + 1));
      for (int j = 0; j <= resolution; ++j)
        for (int i = 0; i <= resolution; ++i) {
          const double tx = static_cast<double>(i) / resolution;
          const double ty = static_cast<double>(j) / resolution;
          validation_points_.push_back({domain_.lo(0) + tx * domain_.extent(0),
                                        domain_.lo(1) + ty * domain_.extent(1)});
        }
    }
    for (const Point& p : validation_points_) {
      const double v = eval_(p);
      if (!std::isfinite(v))
        throw std::invalid_argument("ExponentField: non-finite value at validation point");
      min_ = std::min(min_, v);
      max_ = std::max(max_, v);
    }
  }

  DomainDescriptor domain_;
  Evaluator eval_;
  std::string label_;
  double min_ = 0.0;
  double max_ = 0.0;
  std::vector<Point> validation_points_;
};

enum class GrowthVariant { subnatural, natural };

inline const char* to_string(GrowthVariant v) {
  return v == GrowthVariant::subnatural ? "subnatural" : "natural";
}

struct ExponentTriple {
  ExponentField p;
  ExponentField q;
  ExponentField eta;
  GrowthVariant variant = GrowthVariant::subnatural;
};

// Pointwise conjugate: 1/e + 1/e' = 1.
inline ExponentField conjugate_exponent(const ExponentField& e) {
  if (!(e.min() > 1.0))
    throw std::invalid_argument(
        "conjugate_exponent: requires min exponent > 1 (conjugate unbounded otherwise)");
  ExponentField base = e;
  return ExponentField(
      e.domain(),
      [base](const Point& p) {
        const double v = base(p);
        return v / (v - 1.0);
      },
      "(" + e.label() + ")'");
}

inline double conjugate_value(double e) { return e / (e - 1.0); }

// Pointwise Sobolev conjugate e* = N e / (N - e); requires max e < N.
inline ExponentField sobolev_conjugate(const ExponentField& e, int N) {
  if (!(e.max() < N))
    throw std::invalid_argument("sobolev_conjugate: requires max exponent < N");
  ExponentField base = e;
  const double n = N;
  return ExponentField(
      e.domain(),
      [base, n](const Point& p) {
        const double v = base(p);
        return n * v / (n - v);
      },
      "(" + e.label() + ")*");
}

struct DataExponents {
  double q0;         // conjugate of N q^- / (N - q^-)
  ExponentField q1;  // pointwise conjugate of q*(.) / (eta(.) + 1)
};

inline DataExponents data_exponents(const ExponentTriple& t, int N) {
  if (!(t.q.min() < N))
    throw std::invalid_argument("data_exponents: requires min q < N");
  const double qm = t.q.min();
  const double q0 = conjugate_value(static_cast<double>(N) * qm / (N - qm));
  ExponentField qstar = sobolev_conjugate(t.q, N);
  ExponentField eta = t.eta;
  ExponentField ratio(
      t.q.domain(),
      [qstar, eta](const Point& p) { return qstar(p) / (eta(p) + 1.0); },
      "q*/(eta+1)");
  return {q0, conjugate_exponent(ratio)};
}

namespace detail {

struct SlackTracker {
  double slack = std::numeric_limits<double>::infinity();
  Point worst{0.0, 0.0};
  void update(double s, const Point& p) {
    if (s < slack) {
      slack = s;
      worst = p;
    }
  }
};

inline CheckResult make_check(std::string name, const SlackTracker& t, bool strict,
                              std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.slack = t.slack;
  c.worst = t.worst;
  c.pass = strict ? (t.slack >= kStrictSlack) : (t.slack >= -kStrictSlack);
  c.note = std::move(note);
  return c;
}

}  // namespace detail

// Pointwise admissibility report for an exponent triple in dimension N.
// Conditions are evaluated on the intersection of the fields' validation
// grids (they coincide for fields built on the same domain). Failures are
// reported, never thrown. The uniform subcriticality entry doubles as the
// strict pointwise bound eta < q* - 1: its slack is inf(q* - 1 - eta).
// When q >= N somewhere the Sobolev conjugate is meaningless and the entry
// is reported as failed with a note. The embedding bound max p < N is not
// part of this report; it is reported where the embedding constant is
// actually estimated.
inline ValidationReport check_admissibility(const ExponentTriple& t, int N) {
  ValidationReport rep;
  const auto& pts = t.p.validation_points();

  detail::SlackTracker p_gt_1, eta_nonneg, subcrit, q_lower, q_upper, natural_eq, p_ge_2;
  bool qstar_defined = true;
  Point qstar_bad{0.0, 0.0};

  for (const Point& x : pts) {
    const double p = t.p(x);
    const double q = t.q(x);
    const double eta = t.eta(x);
    p_gt_1.update(p - 1.0, x);
    eta_nonneg.update(eta, x);
    if (q < N) {
      const double qstar = static_cast<double>(N) * q / (N - q);
      subcrit.update(qstar - 1.0 - eta, x);
    } else if (qstar_defined) {
      qstar_defined = false;
      qstar_bad = x;
    }
    q_lower.update(q - std::max(p - 1.0, 1.0), x);
    q_upper.update(p - q, x);
    natural_eq.update(-std::fabs(q - p), x);
    p_ge_2.update(p - 2.0, x);
  }

  rep.checks.push_back(detail::make_check("p_min_above_one", p_gt_1, true));
  rep.checks.push_back(detail::make_check("eta_nonnegative", eta_nonneg, false));

  if (qstar_defined) {
    rep.checks.push_back(detail::make_check("eta_uniformly_subcritical", subcrit, true,
                                            "inf over grid of q*(x) - 1 - eta(x)"));
  } else {
    CheckResult c;
    c.name = "eta_uniformly_subcritical";
    c.pass = false;
    c.slack = -std::numeric_limits<double>::infinity();
    c.worst = qstar_bad;
    c.note = "q >= N somewhere: Sobolev conjugate undefined";
    rep.checks.push_back(c);
  }

  if (t.variant == GrowthVariant::subnatural) {
    rep.checks.push_back(
        detail::make_check("q_at_least_max_of_p_minus_one_and_one", q_lower, false));
    rep.checks.push_back(detail::make_check("q_strictly_below_p", q_upper, true));
  } else {
    rep.checks.push_back(detail::make_check("q_equals_p", natural_eq, false,
                                            "natural growth requires q == p pointwise"));
    rep.checks.push_back(detail::make_check("p_min_at_least_two", p_ge_2, false));
  }
  return rep;
}

// The variant-specific subset of the admissibility report that gates solver
// input. The dimension-dependent embedding conditions remain informative
// (1d runs would otherwise be impossible: p > 1 already violates p < N).
inline bool variant_conditions_pass(const ValidationReport& rep, GrowthVariant variant) {
  if (!rep.find("p_min_above_one").pass) return false;
  if (variant == GrowthVariant::subnatural)
    return rep.find("q_at_least_max_of_p_minus_one_and_one").pass &&
           rep.find("q_strictly_below_p").pass;
  return rep.find("q_equals_p").pass && rep.find("p_min_at_least_two").pass;
}

struct LogHolderReport {
  double constant_estimate = 0.0;  // max over sampled pairs of |e(x)-e(y)| * |log|x-y||
  bool unbounded = false;
  std::vector<double> scale_maxima;  // per refinement scale
  Point worst_x{0.0, 0.0};
  Point worst_y{0.0, 0.0};
};

// Estimate the smallest C with |e(x)-e(y)| <= C / |log|x-y|| by maximizing
// the ratio over random close pairs (|x-y| < 1/2), zooming toward the worst
// pair at each separation scale. A modulus that keeps growing as the scale
// shrinks cannot satisfy the bound with any constant; that shows up as
// per-scale maxima that rise steadily instead of settling, or that cross
// the hard threshold.
inline LogHolderReport check_log_holder(const ExponentField& e, int sample_pairs = 4096,
                                        unsigned seed = 12345,
                                        double unbounded_threshold = 1e3) {
  LogHolderReport rep;
  const DomainDescriptor& dom = e.domain();
  const int dim = dom.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double d_max = std::min(0.45, 0.45 * dom.diameter());
  const int n_scales = 40;
  const int per_scale = std::max(32, sample_pairs / n_scales);

  auto random_point = [&](const Point& center, double spread) {
    Point p;
    for (int tries = 0; tries < 64; ++tries) {
      p.x = center.x + spread * (2.0 * unit(rng) - 1.0);
      p.y = dim == 2 ? center.y + spread * (2.0 * unit(rng) - 1.0) : 0.0;
      if (p.x >= dom.lo(0) && p.x <= dom.hi(0) &&
          (dim == 1 || (p.y >= dom.lo(1) && p.y <= dom.hi(1))))
        return p;
    }
    p.x = std::clamp(p.x, dom.lo(0), dom.hi(0));
    if (dim == 2) p.y = std::clamp(p.y, dom.lo(1), dom.hi(1));
    return p;
  };

  const Point dom_center{0.5 * (dom.lo(0) + dom.hi(0)),
                         dim == 2 ? 0.5 * (dom.lo(1) + dom.hi(1)) : 0.0};
  Point zoom_center = dom_center;
  double prev_scale = dom.diameter();

  for (int s = 0; s < n_scales; ++s) {
    const double d = d_max * std::pow(0.5, s);
    if (d < 1e-13 * dom.diameter()) break;
    double scale_max = 0.0;
    Point sx{0.0, 0.0}, sy{0.0, 0.0};
    for (int i = 0; i < per_scale; ++i) {
      // half the pairs zoom toward the incumbent worst midpoint
      const bool zoom = (i % 2 == 1) && s > 0;
      const Point center = zoom ? random_point(zoom_center, prev_scale)
                                : random_point(dom_center, 0.5 * dom.diameter());
      double dx = 2.0 * unit(rng) - 1.0;
      double dy = dim == 2 ? 2.0 * unit(rng) - 1.0 : 0.0;
      const double norm = std::hypot(dx, dy);
      if (norm < 1e-12) continue;
      dx *= d / norm;
      dy *= d / norm;
      const Point a = center;
      const Point b = random_point({center.x + dx, center.y + dy}, 0.0);
      const double sep = distance(a, b);
      if (sep <= 0.0 || sep >= 0.5) continue;
      const double ratio = std::fabs(e(a) - e(b)) * std::fabs(std::log(sep));
      if (ratio > scale_max) {
        scale_max = ratio;
        sx = a;
        sy = b;
      }
    }
    rep.scale_maxima.push_back(scale_max);
    if (scale_max > rep.constant_estimate) {
      rep.constant_estimate = scale_max;
      rep.worst_x = sx;
      rep.worst_y = sy;
    }
    if (scale_max > 0.0) zoom_center = {0.5 * (sx.x + sy.x), 0.5 * (sx.y + sy.y)};
    prev_scale = d;
  }

  if (rep.constant_estimate > unbounded_threshold) rep.unbounded = true;
  // sustained growth of the per-scale maxima across the finest scales
  const std::size_t n = rep.scale_maxima.size();
  if (!rep.unbounded && n >= 12) {
    int rising = 0;
    for (std::size_t i = n - 10; i < n; ++i)
      if (rep.scale_maxima[i] > rep.scale_maxima[i - 1] * (1.0 + 1e-9)) ++rising;
    const double early = *std::max_element(rep.scale_maxima.begin(),
                                           rep.scale_maxima.begin() + static_cast<long>(n / 2));
    const double late = rep.scale_maxima.back();
    if (rising >= 8 && early > 0.0 && late > 1.5 * early) rep.unbounded = true;
  }
  return rep;
}

struct ExponentPartition {
  std::vector<char> degenerate_mask;  // elements with p(barycenter) >= 2
  std::vector<char> singular_mask;    // elements with p(barycenter) < 2
};

// Split elements by the barycenter value of p: p >= 2 vs p < 2.
inline ExponentPartition partition_by_exponent(const ExponentField& p, const Grid& grid) {
  ExponentPartition part;
  part.degenerate_mask.assign(grid.n_elements(), 0);
  part.singular_mask.assign(grid.n_elements(), 0);
  for (std::size_t e = 0; e < grid.n_elements(); ++e) {
    if (p(grid.barycenter(e)) >= 2.0)
      part.degenerate_mask[e] = 1;
    else
      part.singular_mask[e] = 1;
  }
  return part;
}

}  // namespace vexlab

#endif  // VEXLAB_EXPONENTS_HPP
