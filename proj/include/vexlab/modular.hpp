// Modulars and Luxemburg norms on discrete functions, plus the
// norm-modular, Hoelder and power-product inequality checks.
//
// The modular of a nodal function or of an elementwise gradient field is a
// weighted sum over quadrature points of |v|^{e(x)} with the exponent
// sampled at the same points (barycenter rule by default, so nonlinear
// integrands see one exponent per element). The Luxemburg norm is the
// unique lambda with modular(v/lambda) = 1, found by bracketing and
// bisection on the strictly decreasing map lambda -> modular(v/lambda).

#ifndef VEXLAB_MODULAR_HPP
#define VEXLAB_MODULAR_HPP

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vexlab/exponents.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/quadrature.hpp"
#include "vexlab/validation.hpp"

namespace vexlab {

class ModularEvaluator {
public:
  ModularEvaluator(const ExponentField& e, QuadratureRule rule)
      : rule_(std::move(rule)) {
    exponents_.resize(rule_.size());
    e_min_ = std::numeric_limits<double>::infinity();
    e_max_ = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < rule_.size(); ++q) {
      exponents_[q] = e(rule_.points[q]);
      e_min_ = std::min(e_min_, exponents_[q]);
      e_max_ = std::max(e_max_, exponents_[q]);
    }
    domain_volume_ = rule_.grid->domain.volume();
  }

  const QuadratureRule& rule() const { return rule_; }
  const std::vector<double>& exponents() const { return exponents_; }
  double exponent_min() const { return e_min_; }
  double exponent_max() const { return e_max_; }

  double modular(std::span<const double> values) const { return modular_scaled(values, 1.0); }

  double modular_scaled(std::span<const double> values, double lambda) const {
    if (values.size() != rule_.size())
      throw std::invalid_argument("modular: value count does not match quadrature rule");
    double acc = 0.0;
    for (std::size_t q = 0; q < values.size(); ++q) {
      const double t = std::fabs(values[q]) / lambda;
      if (t != 0.0) acc += rule_.weights[q] * std::pow(t, exponents_[q]);
    }
    return acc;
  }

  // Luxemburg norm by bracketing + bisection; zero input gives zero.
  // Bracket start: [machine epsilon, max|v| |Omega|^{1/e_min} + 1], with the
  // upper end doubled until the modular drops to 1 or below.
  double luxemburg(std::span<const double> values) const {
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, std::fabs(v));
    if (vmax == 0.0) return 0.0;
    double lo = std::numeric_limits<double>::epsilon();
    double hi = vmax * std::pow(domain_volume_, 1.0 / e_min_) + 1.0;
    int guard = 0;
    while (modular_scaled(values, hi) > 1.0 && guard++ < 200) {
      lo = hi;
      hi *= 2.0;
    }
    if (modular_scaled(values, lo) <= 1.0) return lo;  // norm below bracket floor
    while (hi - lo > 1e-13 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (modular_scaled(values, mid) > 1.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  struct NormState {
    double lambda = 0.0;  // the norm
    double d1 = 0.0;      // sum w e t at lambda,        t = |v/lambda|^e
    double d2 = 0.0;      // sum w e (e+1) t at lambda
  };

  // Same root to tighter tolerance via safeguarded Newton inside the
  // bracket; also returns the lambda-derivative sums used by callers that
  // differentiate the norm. warm > 0 seeds the bracket near a known value.
  NormState luxemburg_fast(std::span<const double> values, double warm = 0.0) const {
    NormState st;
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, std::fabs(v));
    if (vmax == 0.0) return st;

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double lambda = warm > 0.0 ? warm : vmax * std::pow(domain_volume_, 1.0 / e_min_) + 1.0;
    double rho = modular_scaled(values, lambda);
    int expand = 0;
    while (rho > 1.0 && expand++ < 300) {
      lo = lambda;
      lambda *= 2.0;
      rho = modular_scaled(values, lambda);
    }
    if (rho > 1.0) throw std::runtime_error("luxemburg_fast: bracket expansion failed");
    hi = lambda;
    while (!(lo > 0.0)) {
      const double trial = hi / 2.0;
      if (modular_scaled(values, trial) > 1.0)
        lo = trial;
      else
        hi = trial;
      if (hi < std::numeric_limits<double>::min() * 4.0) return {hi, 0.0, 0.0};
    }

    lambda = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double r = 0.0, d1 = 0.0, d2 = 0.0;
      for (std::size_t q = 0; q < values.size(); ++q) {
        const double a = std::fabs(values[q]);
        if (a == 0.0) continue;
        const double t = rule_.weights[q] * std::pow(a / lambda, exponents_[q]);
        r += t;
        d1 += exponents_[q] * t;
        d2 += exponents_[q] * (exponents_[q] + 1.0) * t;
      }
      if (r > 1.0)
        lo = lambda;
      else
        hi = lambda;
      if (std::fabs(r - 1.0) < 1e-14 || hi - lo <= 1e-15 * hi) {
        st.lambda = lambda;
        st.d1 = d1;
        st.d2 = d2;
        return st;
      }
      // Newton step on rho(lambda) - 1; drho/dlambda = -d1/lambda
      double next = lambda + lambda * (r - 1.0) / d1;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      lambda = next;
    }
    st.lambda = lambda;
    return st;
  }

private:
  QuadratureRule rule_;
  std::vector<double> exponents_;
  double e_min_ = 0.0;
  double e_max_ = 0.0;
  double domain_volume_ = 0.0;
};

// ---- Convenience entry points on grid functions -------------------------

inline std::vector<double> gradient_magnitudes(const GridFunction& u) {
  std::vector<double> mags(u.grid().n_elements());
  for (std::size_t e = 0; e < mags.size(); ++e) {
    const auto g = element_gradient(u, e);
    mags[e] = std::hypot(g[0], g[1]);
  }
  return mags;
}

inline double modular(const GridFunction& u, const ExponentField& e) {
  ModularEvaluator ev(e, barycenter_rule(u.grid_ptr()));
  return ev.modular(sample_at_points(u, ev.rule()));
}

inline double modular_gradient(const GridFunction& u, const ExponentField& e) {
  ModularEvaluator ev(e, barycenter_rule(u.grid_ptr()));
  return ev.modular(gradient_magnitudes(u));
}

inline double luxemburg_norm(const GridFunction& u, const ExponentField& e) {
  ModularEvaluator ev(e, barycenter_rule(u.grid_ptr()));
  return ev.luxemburg(sample_at_points(u, ev.rule()));
}

inline double luxemburg_norm_gradient(const GridFunction& u, const ExponentField& e) {
  ModularEvaluator ev(e, barycenter_rule(u.grid_ptr()));
  return ev.luxemburg(gradient_magnitudes(u));
}

// Norm of an elementwise-constant field (one value per element).
inline double luxemburg_norm_elementwise(GridPtr grid, std::span<const double> values,
                                         const ExponentField& e) {
  ModularEvaluator ev(e, barycenter_rule(std::move(grid)));
  return ev.luxemburg(values);
}

inline double modular_elementwise(GridPtr grid, std::span<const double> values,
                                  const ExponentField& e) {
  ModularEvaluator ev(e, barycenter_rule(std::move(grid)));
  return ev.modular(values);
}

// ---- Inequality suites ---------------------------------------------------

// Unit-ball equivalence and the two-sided power bounds between norm and
// modular. Slacks are worst-case margins; anything at or above -1e-9 passes.
inline ValidationReport check_norm_modular_relations(const GridFunction& u,
                                                     const ExponentField& e) {
  ModularEvaluator ev(e, barycenter_rule(u.grid_ptr()));
  const auto vals = sample_at_points(u, ev.rule());
  const double lambda = ev.luxemburg(vals);
  const double rho = ev.modular(vals);
  const double em = e.min(), ep = e.max();
  const double band = 1e-9;

  ValidationReport rep;
  CheckResult ball;
  ball.name = "unit_ball_equivalence";
  if (lambda > 1.0 + band) {
    ball.slack = rho - 1.0;
    ball.note = "norm > 1 so modular must exceed 1";
  } else if (lambda < 1.0 - band && lambda > 0.0) {
    ball.slack = 1.0 - rho;
    ball.note = "norm < 1 so modular must stay below 1";
  } else {
    ball.slack = 1e-7 - std::fabs(rho - 1.0);
    ball.note = "norm at 1 so modular must sit at 1";
  }
  ball.pass = ball.slack >= -band;
  rep.checks.push_back(ball);

  CheckResult power;
  power.name = "power_bounds";
  if (lambda > 1.0 + band) {
    power.slack = std::min(rho - std::pow(lambda, em), std::pow(lambda, ep) - rho);
    power.note = "norm^emin <= modular <= norm^emax";
  } else if (lambda > 0.0 && lambda < 1.0 - band) {
    power.slack = std::min(rho - std::pow(lambda, ep), std::pow(lambda, em) - rho);
    power.note = "norm^emax <= modular <= norm^emin";
  } else {
    power.slack = 1e-7 - std::fabs(rho - 1.0);
    power.note = "bounds coincide on the unit sphere";
  }
  power.pass = power.slack >= -band;
  rep.checks.push_back(power);
  return rep;
}

// Hoelder bound |int u v| <= (1/e_min + 1/e'_min) ||u||_e ||v||_e'.
// The pairing uses the same quadrature as the modulars so the pointwise
// Young argument carries over to the discrete level exactly.
inline ValidationReport check_holder(const GridFunction& u, const GridFunction& v,
                                     const ExponentField& e) {
  const ExponentField ec = conjugate_exponent(e);
  ModularEvaluator ev(e, barycenter_rule(u.grid_ptr()));
  ModularEvaluator evc(ec, barycenter_rule(u.grid_ptr()));
  const auto uv = sample_at_points(u, ev.rule());
  const auto vv = sample_at_points(v, ev.rule());
  double pairing = 0.0;
  for (std::size_t q = 0; q < uv.size(); ++q) pairing += ev.rule().weights[q] * uv[q] * vv[q];
  const double nu = ev.luxemburg(uv);
  const double nv = evc.luxemburg(vv);
  const double coeff = 1.0 / e.min() + 1.0 / ec.min();
  const double bound = coeff * nu * nv;

  ValidationReport rep;
  CheckResult c;
  c.name = "holder_bound";
  c.slack = bound - std::fabs(pairing);
  c.pass = c.slack >= -1e-9;
  c.worst_aux = bound > 0.0 ? std::fabs(pairing) / bound : 0.0;  // reported ratio
  c.note = "ratio |pairing| / bound stored in worst_aux";
  rep.checks.push_back(c);
  return rep;
}

// Sandwich between ||f||_{pq}^{p+-} and || |f|^p ||_q, case chosen by
// whether ||f||_{pq} is at most 1.
inline ValidationReport check_product_lemma(const GridFunction& f, const ExponentField& p,
                                            const ExponentField& q) {
  ModularEvaluator evq(q, barycenter_rule(f.grid_ptr()));
  ExponentField pc = p;
  ExponentField qc = q;
  ExponentField pq(p.domain(), [pc, qc](const Point& x) { return pc(x) * qc(x); },
                   p.label() + "*" + q.label());
  if (!(pq.min() >= 1.0 - 1e-12))
    throw std::invalid_argument("check_product_lemma: requires p(x) q(x) >= 1 pointwise");
  ModularEvaluator evpq(pq, barycenter_rule(f.grid_ptr()));

  const auto fv = sample_at_points(f, evpq.rule());
  double fmax = 0.0;
  for (double v : fv) fmax = std::max(fmax, std::fabs(v));
  if (fmax == 0.0)
    throw std::invalid_argument("check_product_lemma: f must not be identically zero");

  std::vector<double> fpow(fv.size());
  const auto& rule = evpq.rule();
  for (std::size_t i = 0; i < fv.size(); ++i)
    fpow[i] = std::pow(std::fabs(fv[i]), pc(rule.points[i]));

  const double lambda = evpq.luxemburg(fv);     // ||f||_{pq}
  const double mu = evq.luxemburg(fpow);        // || |f|^p ||_q
  const double pm = p.min(), pp = p.max();

  double lo_bound, hi_bound;
  const char* which;
  if (lambda <= 1.0) {
    lo_bound = std::pow(lambda, pp);
    hi_bound = std::pow(lambda, pm);
    which = "norm at most 1: ||f||^pmax <= ||f^p|| <= ||f||^pmin";
  } else {
    lo_bound = std::pow(lambda, pm);
    hi_bound = std::pow(lambda, pp);
    which = "norm above 1: ||f||^pmin <= ||f^p|| <= ||f||^pmax";
  }

  ValidationReport rep;
  CheckResult c;
  c.name = "product_power_sandwich";
  c.slack = std::min(mu - lo_bound, hi_bound - mu);
  c.pass = c.slack >= -1e-9;
  c.note = which;
  rep.checks.push_back(c);
  return rep;
}

}  // namespace vexlab

#endif  // VEXLAB_MODULAR_HPP
