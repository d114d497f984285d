// Pointwise maps and constants used by the truncation-regularization
// machinery: level truncation and its excess, the band indicator, the
// exponential test maps with their lower-bound properties, the Young-type
// constant splitting s^q against eps s^p, the bounded regularization of the
// gradient power, and the monotonicity inequalities for power fluxes.

#ifndef VEXLAB_TOOLKIT_HPP
#define VEXLAB_TOOLKIT_HPP

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vexlab/exponents.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/validation.hpp"

namespace vexlab {

// Sign-preserving clamp to [-k, k].
inline double truncate(double v, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate: level must be positive");
  return std::clamp(v, -k, k);
}

inline GridFunction truncate(const GridFunction& u, double k) {
  GridFunction v = u;
  for (auto& x : v.values()) x = truncate(x, k);
  return v;
}

// Excess over the truncation level: u - truncate(u, k).
inline double excess(double v, double k) { return v - truncate(v, k); }

inline GridFunction excess(const GridFunction& u, double k) {
  GridFunction v = u;
  for (auto& x : v.values()) x = excess(x, k);
  return v;
}

// Unit ramp on the band [k-1, k]: truncate(excess(u, k-1), 1) for k > 1.
inline double band_indicator(double v, double k) {
  if (!(k > 1.0)) throw std::invalid_argument("band_indicator: level must exceed 1");
  return truncate(excess(v, k - 1.0), 1.0);
}

inline GridFunction band_indicator(const GridFunction& u, double k) {
  GridFunction v = u;
  for (auto& x : v.values()) x = band_indicator(x, k);
  return v;
}

struct TestMapValue {
  double value = 0.0;
  double derivative = 0.0;
};

namespace detail {
inline double test_map_coefficient(GrowthVariant variant, double p_plus) {
  if (variant == GrowthVariant::subnatural) return 0.25;
  if (!(p_plus > 0.0))
    throw std::invalid_argument("test_map: natural variant needs the max of p");
  return std::pow(2.0, 4.0 * p_plus - 2.0);
}
}  // namespace detail

// phi(s) = s exp(a s^2) with a = 1/4 (subnatural) or a = 2^(4 pmax - 2)
// (natural). The argument is capped where exp would leave the finite range;
// beyond the cap the call fails loudly instead of returning inf.
inline TestMapValue test_map(double s, GrowthVariant variant, double p_plus = 0.0) {
  const double a = detail::test_map_coefficient(variant, p_plus);
  const double arg = a * s * s;
  if (arg > 700.0)
    throw std::domain_error("test_map: |s| beyond the overflow cap sqrt(700/" +
                            std::to_string(a) + ")");
  const double ea = std::exp(arg);
  return {s * ea, ea * (1.0 + 2.0 * a * s * s)};
}

// Lower bounds phi' - |phi| >= 1/2 (subnatural) and
// phi' - 2^(2 pmax - 1) phi >= C > 0 (natural), scanned over a grid.
// Both are evaluated through the factored form exp(a s^2) * bracket(s) so
// points past the overflow cap contribute +inf instead of poisoning the
// scan; the reported constant is the finite empirical infimum.
inline ValidationReport check_test_map_property(GrowthVariant variant, double p_plus,
                                                std::span<const double> s_grid) {
  const double a = detail::test_map_coefficient(variant, p_plus);
  double inf_val = std::numeric_limits<double>::infinity();
  double worst_s = 0.0;
  for (double s : s_grid) {
    const double arg = a * s * s;
    double bracket;
    if (variant == GrowthVariant::subnatural) {
      bracket = 1.0 + 2.0 * a * s * s - std::fabs(s);
    } else {
      const double c = std::pow(2.0, 2.0 * p_plus - 1.0);
      bracket = 1.0 + 2.0 * a * s * s - c * s;
    }
    const double value = arg > 700.0
                             ? (bracket > 0.0 ? std::numeric_limits<double>::infinity()
                                              : -std::numeric_limits<double>::infinity())
                             : std::exp(arg) * bracket;
    if (value < inf_val) {
      inf_val = value;
      worst_s = s;
    }
  }

  ValidationReport rep;
  CheckResult c;
  c.worst_aux = worst_s;
  if (variant == GrowthVariant::subnatural) {
    c.name = "map_derivative_dominates_value_by_half";
    c.slack = inf_val - 0.5;
    c.pass = c.slack >= -1e-12;
    c.note = "infimum of phi' - |phi| over the grid, bound 1/2";
  } else {
    c.name = "map_derivative_dominates_scaled_value";
    c.slack = inf_val;
    c.pass = inf_val > 0.0;
    c.note = "empirical infimum of phi' - 2^(2 pmax - 1) phi; must be positive";
  }
  rep.checks.push_back(c);
  return rep;
}

struct YoungConstant {
  double epsilon = 0.0;
  double value = 0.0;       // minimal constant C with s^q <= eps s^p + C
  Point worst_point{0, 0};  // location where the constraint is tightest
  double worst_s = 0.0;     // maximizer s* there
};

// Minimal constant via the closed-form interior maximizer of
// s^q - eps s^p at fixed x: s*(x) = (q / (eps p))^(1/(p-q)).
// The inequality is re-verified on an (x, s) validation grid.
inline YoungConstant young_constant(const ExponentField& p, const ExponentField& q,
                                    double epsilon, int s_samples = 200) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("young_constant: epsilon must be positive");
  const auto& pts = p.validation_points();
  for (const Point& x : pts) {
    const double pv = p(x), qv = q(x);
    if (!(pv - 1.0 > 0.0 && qv >= pv - 1.0 && qv < pv))
      throw std::invalid_argument(
          "young_constant: exponents must satisfy 0 < p-1 <= q < p pointwise");
  }

  YoungConstant out;
  out.epsilon = epsilon;
  double smax = 0.0;
  for (const Point& x : pts) {
    const double pv = p(x), qv = q(x);
    const double sstar = std::pow(qv / (epsilon * pv), 1.0 / (pv - qv));
    const double c = std::pow(sstar, qv) - epsilon * std::pow(sstar, pv);
    smax = std::max(smax, sstar);
    if (c > out.value) {
      out.value = c;
      out.worst_point = x;
      out.worst_s = sstar;
    }
  }

  // re-verify on the (x, s) grid
  for (const Point& x : pts) {
    const double pv = p(x), qv = q(x);
    for (int i = 0; i <= s_samples; ++i) {
      const double s = 10.0 * smax * i / s_samples;
      if (std::pow(s, qv) > epsilon * std::pow(s, pv) + out.value + 1e-9 * (1.0 + out.value))
        throw std::runtime_error("young_constant: closed-form constant failed re-verification");
    }
  }
  return out;
}

// Bounded regularization of t = |xi|^{q(x)}: t / (1 + t/n), increasing in
// both t and n, with values in [0, n).
inline double regularized_hamiltonian(double xi_norm, int n, double q_value) {
  if (n < 1) throw std::invalid_argument("regularized_hamiltonian: n must be at least 1");
  if (!(xi_norm >= 0.0))
    throw std::invalid_argument("regularized_hamiltonian: |xi| must be nonnegative");
  const double t = std::pow(xi_norm, q_value);
  return t / (1.0 + t / n);
}

inline double regularized_hamiltonian(const Point& x, double xi_norm, int n,
                                      const ExponentField& q) {
  return regularized_hamiltonian(xi_norm, n, q(x));
}

using Vec2 = std::array<double, 2>;

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

// |xi|^{p-2} xi, continuously extended by zero at the origin (p > 1).
inline Vec2 power_flux(const Vec2& xi, double p) {
  const double n = norm(xi);
  if (n == 0.0) return {0.0, 0.0};
  const double scale = std::pow(n, p - 2.0);
  return {scale * xi[0], scale * xi[1]};
}

// Monotonicity pairing (|xi|^{p-2} xi - |eta|^{p-2} eta) . (xi - eta).
inline double flux_pairing(double p, const Vec2& xi, const Vec2& eta) {
  const Vec2 fx = power_flux(xi, p);
  const Vec2 fe = power_flux(eta, p);
  return (fx[0] - fe[0]) * (xi[0] - eta[0]) + (fx[1] - fe[1]) * (xi[1] - eta[1]);
}

// Slack of the lower bound on the pairing: the degenerate form
// (1/2)^p |xi-eta|^p for p >= 2, the singular form
// (p-1) |xi-eta|^2 / (|xi|+|eta|)^{2-p} for 1 < p < 2 (both sides zero when
// both vectors vanish).
inline double vector_inequality_slack(double p, const Vec2& xi, const Vec2& eta) {
  if (!(p > 1.0)) throw std::invalid_argument("vector_inequality_slack: requires p > 1");
  const double pairing = flux_pairing(p, xi, eta);
  const Vec2 diff{xi[0] - eta[0], xi[1] - eta[1]};
  const double dn = norm(diff);
  double bound;
  if (p >= 2.0) {
    bound = std::pow(0.5, p) * std::pow(dn, p);
  } else {
    const double denom = norm(xi) + norm(eta);
    bound = denom == 0.0 ? 0.0 : (p - 1.0) * dn * dn / std::pow(denom, 2.0 - p);
  }
  return pairing - bound;
}

inline ValidationReport check_vector_inequalities(double p, const Vec2& xi, const Vec2& eta) {
  ValidationReport rep;
  CheckResult c;
  c.name = p >= 2.0 ? "degenerate_flux_monotonicity" : "singular_flux_monotonicity";
  c.slack = vector_inequality_slack(p, xi, eta);
  c.pass = c.slack >= -1e-12;
  rep.checks.push_back(c);
  return rep;
}

}  // namespace vexlab

#endif  // VEXLAB_TOOLKIT_HPP
