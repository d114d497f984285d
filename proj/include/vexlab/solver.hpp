// Discrete operator assembly and the damped Newton solver for the
// regularized problems
//
//   -div((|grad w|^2 + delta^2)^((p(x)-2)/2) grad w) + H_n(x, |grad w|)
//        = lambda g(x) (T_k w)_+^{eta(x)} + f(x),   w = 0 on the boundary,
//
// together with the gradient-free comparison problem, the discrete
// monotonicity pairing, and the weak-form defect of the limit equation.
//
// P1 elements: gradients are constant per element and the gradient-power
// terms are sampled at element barycenters (one exponent per element); data
// and reaction terms use the Gauss rule.

#ifndef VEXLAB_SOLVER_HPP
#define VEXLAB_SOLVER_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "vexlab/modular.hpp"
#include "vexlab/problem.hpp"
#include "vexlab/quadrature.hpp"
#include "vexlab/toolkit.hpp"

namespace vexlab {

namespace detail {

struct ReactionSource {
  double lambda = 0.0;
  std::vector<double> g_qp;    // data at Gauss points
  std::vector<double> f_qp;
  std::vector<double> eta_qp;
  std::optional<double> truncation;  // T_k level in the zero-order term; none = identity
};

class DiscreteOperator {
public:
  DiscreteOperator(GridPtr grid, const ExponentField& p, const ExponentField& q)
      : grid_(std::move(grid)), data_rule_(gauss_rule(grid_)) {
    const std::size_t ne = grid_->n_elements();
    p_bary_.resize(ne);
    q_bary_.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
      const Point b = grid_->barycenter(e);
      p_bary_[e] = p(b);
      q_bary_[e] = q(b);
    }
    const int npe = grid_->nodes_per_element();
    basis_grads_.resize(ne);
    for (std::size_t e = 0; e < ne; ++e)
      for (int v = 0; v < npe; ++v) {
        GridFunction phi(grid_, 0.0);
        phi[static_cast<std::size_t>(grid_->elements[e][static_cast<std::size_t>(v)])] = 1.0;
        basis_grads_[e][static_cast<std::size_t>(v)] = element_gradient(phi, e);
      }
    // P1 basis values at the Gauss points of the owning element
    basis_at_qp_.resize(data_rule_.size());
    for (std::size_t qp = 0; qp < data_rule_.size(); ++qp) {
      const std::size_t e = data_rule_.element_of(qp);
      const auto& el = grid_->elements[e];
      for (int v = 0; v < npe; ++v) {
        GridFunction phi(grid_, 0.0);
        phi[static_cast<std::size_t>(el[static_cast<std::size_t>(v)])] = 1.0;
        basis_at_qp_[qp][static_cast<std::size_t>(v)] = evaluate(phi, data_rule_.points[qp]);
      }
    }
  }

  // gradient-power term configuration
  void enable_hamiltonian(std::optional<int> n, double scale, bool picard) {
    hamiltonian_on_ = scale != 0.0;
    h_index_ = n;
    h_scale_ = scale;
    picard_ = picard;
  }
  void disable_hamiltonian() { hamiltonian_on_ = false; }

  void set_reaction(ReactionSource src) {
    reaction_ = std::move(src);
    fixed_source_.clear();
  }
  void set_fixed_source(std::vector<double> qp_values) {
    fixed_source_ = std::move(qp_values);
    reaction_.reset();
  }

  void set_delta(double delta) { delta_ = delta; }
  void set_jacobian_delta(double delta) { jac_delta_ = delta; }
  void set_jacobian_floor(double floor) { jac_floor_ = floor; }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const QuadratureRule& data_rule() const { return data_rule_; }

  double hamiltonian_value(double grad_norm, std::size_t e) const {
    const double t = std::pow(grad_norm, q_bary_[e]);
    const double h = h_index_ ? t / (1.0 + t / *h_index_) : t;
    return h_scale_ * h;
  }

  std::vector<double> residual(const GridFunction& w) const {
    const std::size_t nn = grid_->n_nodes();
    std::vector<double> r(nn, 0.0);
    const int npe = grid_->nodes_per_element();

    for (std::size_t e = 0; e < grid_->n_elements(); ++e) {
      const auto g = element_gradient(w, e);
      const double gn2 = g[0] * g[0] + g[1] * g[1];
      const double a = std::pow(gn2 + delta_ * delta_, 0.5 * (p_bary_[e] - 2.0));
      const double vol = grid_->element_volumes[e];
      const double h =
          hamiltonian_on_ ? hamiltonian_value(std::sqrt(gn2), e) : 0.0;
      for (int v = 0; v < npe; ++v) {
        const auto i = static_cast<std::size_t>(
            grid_->elements[e][static_cast<std::size_t>(v)]);
        if (grid_->node_on_boundary[i]) continue;
        const auto& bg = basis_grads_[e][static_cast<std::size_t>(v)];
        r[i] += vol * a * (g[0] * bg[0] + g[1] * bg[1]);
        if (hamiltonian_on_) r[i] += vol * h / npe;
      }
    }

    for (std::size_t qp = 0; qp < data_rule_.size(); ++qp) {
      const double s = source_value(w, qp);
      if (s == 0.0) continue;
      const std::size_t e = data_rule_.element_of(qp);
      for (int v = 0; v < npe; ++v) {
        const auto i = static_cast<std::size_t>(
            grid_->elements[e][static_cast<std::size_t>(v)]);
        if (grid_->node_on_boundary[i]) continue;
        r[i] -= data_rule_.weights[qp] * s * basis_at_qp_[qp][static_cast<std::size_t>(v)];
      }
    }
    return r;
  }

  Eigen::SparseMatrix<double> jacobian(const GridFunction& w) const {
    const auto nn = static_cast<Eigen::Index>(grid_->n_nodes());
    std::vector<Eigen::Triplet<double>> trip;
    const int npe = grid_->nodes_per_element();

    for (std::size_t e = 0; e < grid_->n_elements(); ++e) {
      const auto g = element_gradient(w, e);
      const double gn2 = g[0] * g[0] + g[1] * g[1];
      const double s2 = gn2 + jac_delta_ * jac_delta_;
      const double pe = p_bary_[e];
      const double a = std::pow(s2, 0.5 * (pe - 2.0));
      const double b = (pe - 2.0) * std::pow(s2, 0.5 * (pe - 4.0));
      const double vol = grid_->element_volumes[e];

      double dh[2] = {0.0, 0.0};
      if (hamiltonian_on_ && !picard_) {
        const double qe = q_bary_[e];
        const double t = std::pow(gn2, 0.5 * qe);  // |grad w|^q
        const double damp = h_index_ ? 1.0 / ((1.0 + t / *h_index_) * (1.0 + t / *h_index_)) : 1.0;
        const double c = h_scale_ * damp * qe * std::pow(s2, 0.5 * (qe - 2.0));
        dh[0] = c * g[0];
        dh[1] = c * g[1];
      }

      for (int va = 0; va < npe; ++va) {
        const int ia = grid_->elements[e][static_cast<std::size_t>(va)];
        if (grid_->node_on_boundary[static_cast<std::size_t>(ia)]) continue;
        const auto& ga = basis_grads_[e][static_cast<std::size_t>(va)];
        for (int vb = 0; vb < npe; ++vb) {
          const int ib = grid_->elements[e][static_cast<std::size_t>(vb)];
          if (grid_->node_on_boundary[static_cast<std::size_t>(ib)]) continue;
          const auto& gb = basis_grads_[e][static_cast<std::size_t>(vb)];
          const double gagb = ga[0] * gb[0] + ga[1] * gb[1];
          const double gga = g[0] * ga[0] + g[1] * ga[1];
          const double ggb = g[0] * gb[0] + g[1] * gb[1];
          double entry = vol * (a * gagb + b * gga * ggb);
          if (hamiltonian_on_ && !picard_)
            entry += vol / npe * (dh[0] * gb[0] + dh[1] * gb[1]);
          trip.emplace_back(ia, ib, entry);
        }
      }
    }

    if (reaction_ && reaction_->lambda > 0.0) {
      for (std::size_t qp = 0; qp < data_rule_.size(); ++qp) {
        const double wq = interpolate_at_qp(w, qp);
        const double k = reaction_->truncation.value_or(
            std::numeric_limits<double>::infinity());
        if (!(wq > 0.0 && wq < k)) continue;  // truncation or positive part inactive
        const double eta = reaction_->eta_qp[qp];
        if (eta == 0.0) continue;
        const double base = std::max(wq, jac_floor_);
        const double ds =
            reaction_->lambda * reaction_->g_qp[qp] * eta * std::pow(base, eta - 1.0);
        const std::size_t e = data_rule_.element_of(qp);
        for (int va = 0; va < npe; ++va) {
          const int ia = grid_->elements[e][static_cast<std::size_t>(va)];
          if (grid_->node_on_boundary[static_cast<std::size_t>(ia)]) continue;
          for (int vb = 0; vb < npe; ++vb) {
            const int ib = grid_->elements[e][static_cast<std::size_t>(vb)];
            if (grid_->node_on_boundary[static_cast<std::size_t>(ib)]) continue;
            trip.emplace_back(ia, ib,
                              -data_rule_.weights[qp] * ds *
                                  basis_at_qp_[qp][static_cast<std::size_t>(va)] *
                                  basis_at_qp_[qp][static_cast<std::size_t>(vb)]);
          }
        }
      }
    }

    for (Eigen::Index i = 0; i < nn; ++i)
      if (grid_->node_on_boundary[static_cast<std::size_t>(i)]) trip.emplace_back(i, i, 1.0);

    Eigen::SparseMatrix<double> J(nn, nn);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  double interpolate_at_qp(const GridFunction& w, std::size_t qp) const {
    const std::size_t e = data_rule_.element_of(qp);
    const int npe = grid_->nodes_per_element();
    double s = 0.0;
    for (int v = 0; v < npe; ++v)
      s += basis_at_qp_[qp][static_cast<std::size_t>(v)] *
           w[static_cast<std::size_t>(grid_->elements[e][static_cast<std::size_t>(v)])];
    return s;
  }

private:
  double source_value(const GridFunction& w, std::size_t qp) const {
    if (!fixed_source_.empty()) return fixed_source_[qp];
    if (!reaction_) return 0.0;
    double s = reaction_->f_qp[qp];
    if (reaction_->lambda > 0.0) {
      double wq = interpolate_at_qp(w, qp);
      if (reaction_->truncation) wq = truncate(wq, *reaction_->truncation);
      if (wq > 0.0)
        s += reaction_->lambda * reaction_->g_qp[qp] * std::pow(wq, reaction_->eta_qp[qp]);
    }
    return s;
  }

  GridPtr grid_;
  QuadratureRule data_rule_;
  std::vector<double> p_bary_;
  std::vector<double> q_bary_;
  std::vector<std::array<std::array<double, 2>, 3>> basis_grads_;
  std::vector<std::array<double, 3>> basis_at_qp_;

  bool hamiltonian_on_ = false;
  std::optional<int> h_index_;
  double h_scale_ = 1.0;
  bool picard_ = false;

  std::optional<ReactionSource> reaction_;
  std::vector<double> fixed_source_;

  double delta_ = 1e-6;
  double jac_delta_ = 1e-6;
  double jac_floor_ = 1e-8;
};

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Damped Newton with a residual-norm line search. Throws SolveFailure with
// the trace attached instead of returning a silent partial answer.
inline GridFunction newton_solve(const DiscreteOperator& op, const GridFunction& initial,
                                 double tol, int max_iters, NewtonTrace& trace) {
  GridFunction w = dirichlet_project(initial);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

  std::vector<double> r = op.residual(w);
  double rn = sup_norm(r);
  trace.residual_norms.push_back(rn);

  for (int iter = 0; iter < max_iters; ++iter) {
    if (!std::isfinite(rn))
      throw SolveFailure("newton_solve: non-finite residual", trace, w);
    if (rn <= tol) {
      trace.converged = true;
      trace.iterations = iter;
      return w;
    }
    lu.compute(op.jacobian(w));
    if (lu.info() != Eigen::Success)
      throw SolveFailure("newton_solve: singular Jacobian", trace, w);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = -r[i];
    const Eigen::VectorXd d = lu.solve(rhs);

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 45; ++ls) {
      GridFunction trial = w;
      for (std::size_t i = 0; i < trial.size(); ++i)
        trial[i] += alpha * d[static_cast<Eigen::Index>(i)];
      std::vector<double> rt = op.residual(trial);
      const double rtn = sup_norm(rt);
      if (std::isfinite(rtn) && rtn <= (1.0 - 1e-4 * alpha) * rn) {
        w = std::move(trial);
        r = std::move(rt);
        rn = rtn;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    trace.residual_norms.push_back(rn);
    if (!accepted) {
      trace.iterations = iter + 1;
      throw SolveFailure("newton_solve: line search stalled at residual " + std::to_string(rn),
                         trace, w);
    }
  }
  trace.iterations = max_iters;
  if (rn <= tol) {
    trace.converged = true;
    return w;
  }
  throw SolveFailure("newton_solve: no convergence after " + std::to_string(max_iters) +
                         " iterations (residual " + std::to_string(rn) + ")",
                     trace, w);
}

inline DiscreteOperator make_stage_operator(const ProblemSpec& spec, const SolverConfig& cfg,
                                            std::optional<int> n, std::optional<double> k,
                                            const GridFunction& f_data,
                                            const GridFunction& g_data) {
  DiscreteOperator op(spec.grid, spec.exponents.p, spec.exponents.q);
  op.set_delta(cfg.delta);
  op.set_jacobian_delta(cfg.delta);
  op.set_jacobian_floor(cfg.jacobian_floor);
  op.enable_hamiltonian(n, cfg.hamiltonian_scale, cfg.picard_hamiltonian);
  ReactionSource src;
  src.lambda = spec.lambda;
  src.truncation = k;
  src.g_qp = sample_at_points(g_data, op.data_rule());
  src.f_qp = sample_at_points(f_data, op.data_rule());
  src.eta_qp.resize(op.data_rule().size());
  for (std::size_t qp = 0; qp < op.data_rule().size(); ++qp)
    src.eta_qp[qp] = spec.exponents.eta(op.data_rule().points[qp]);
  op.set_reaction(std::move(src));
  return op;
}

}  // namespace detail

// Nodal residuals of the regularized weak form at w (zero at boundary
// nodes). n is the regularization index of the gradient-power term (none =
// the exact power), k the truncation level in the zero-order term (none =
// identity).
inline std::vector<double> assemble_residual(const GridFunction& w, const ProblemSpec& spec,
                                             const SolverConfig& cfg,
                                             std::optional<int> n = std::nullopt,
                                             std::optional<double> k = std::nullopt) {
  auto op = detail::make_stage_operator(spec, cfg, n, k, spec.f, spec.g);
  return op.residual(w);
}

// Damped Newton on the delta-regularized residual, warm-started from
// `initial`. Returns the solution with sup-norm residual below
// cfg.newton_tol; failure throws SolveFailure with the trace.
inline GridFunction solve_regularized(const ProblemSpec& spec, const SolverConfig& cfg,
                                      std::optional<int> n, std::optional<double> k,
                                      const GridFunction& initial, NewtonTrace& trace) {
  spec.validate();
  cfg.validate();
  auto op = detail::make_stage_operator(spec, cfg, n, k, spec.f, spec.g);
  return detail::newton_solve(op, initial, cfg.newton_tol, cfg.newton_max_iters, trace);
}

inline GridFunction solve_regularized(const ProblemSpec& spec, const SolverConfig& cfg,
                                      std::optional<int> n = std::nullopt,
                                      std::optional<double> k = std::nullopt) {
  NewtonTrace trace;
  return solve_regularized(spec, cfg, n, k, GridFunction(spec.grid, 0.0), trace);
}

// Comparison barrier: the gradient-free problem
// -div(regularized p-flux) = lambda g k^{eta_max} + f.
inline GridFunction solve_reference(const ProblemSpec& spec, const SolverConfig& cfg, double k,
                                    NewtonTrace& trace) {
  detail::DiscreteOperator op(spec.grid, spec.exponents.p, spec.exponents.q);
  op.set_delta(cfg.delta);
  op.set_jacobian_delta(cfg.delta);
  op.disable_hamiltonian();
  const double eta_plus = spec.exponents.eta.max();
  const auto g_qp = sample_at_points(spec.g, op.data_rule());
  const auto f_qp = sample_at_points(spec.f, op.data_rule());
  std::vector<double> src(op.data_rule().size());
  for (std::size_t qp = 0; qp < src.size(); ++qp)
    src[qp] = spec.lambda * g_qp[qp] * std::pow(k, eta_plus) + f_qp[qp];
  op.set_fixed_source(std::move(src));
  return detail::newton_solve(op, GridFunction(spec.grid, 0.0), cfg.newton_tol,
                              cfg.newton_max_iters, trace);
}

inline GridFunction solve_reference(const ProblemSpec& spec, const SolverConfig& cfg, double k) {
  NewtonTrace trace;
  return solve_reference(spec, cfg, k, trace);
}

// Barrier and sign check: min(barrier - w) and min(w), both above -1e-6.
inline ValidationReport check_comparison(const GridFunction& w, const GridFunction& barrier) {
  if (w.size() != barrier.size())
    throw std::invalid_argument("check_comparison: functions live on different grids");
  double margin = std::numeric_limits<double>::infinity();
  double wmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    margin = std::min(margin, barrier[i] - w[i]);
    wmin = std::min(wmin, w[i]);
  }
  ValidationReport rep;
  rep.checks.push_back({"below_barrier", margin >= -1e-6, margin, {0, 0}, 0.0, ""});
  rep.checks.push_back({"nonnegative", wmin >= -1e-6, wmin, {0, 0}, 0.0, ""});
  return rep;
}

// Monotonicity pairing of the unregularized flux: sum over elements of
// (|grad u|^{p-2} grad u - |grad v|^{p-2} grad v) . (grad u - grad v).
inline double check_discrete_monotonicity(const GridFunction& u, const GridFunction& v,
                                          const ExponentField& p) {
  const Grid& g = u.grid();
  double acc = 0.0;
  for (std::size_t e = 0; e < g.n_elements(); ++e) {
    const auto gu = element_gradient(u, e);
    const auto gv = element_gradient(v, e);
    const double pe = p(g.barycenter(e));
    const Vec2 fu = power_flux({gu[0], gu[1]}, pe);
    const Vec2 fv = power_flux({gv[0], gv[1]}, pe);
    acc += g.element_volumes[e] *
           ((fu[0] - fv[0]) * (gu[0] - gv[0]) + (fu[1] - fv[1]) * (gu[1] - gv[1]));
  }
  return acc;
}

// Defect of the weak identity of the limit problem for each test function:
// int |grad u|^{p-2} grad u . grad phi + int |grad u|^q phi
//   - lambda int g u_+^eta phi - int f phi.
// Test functions must vanish on the boundary.
inline std::vector<double> weak_solution_residual(const GridFunction& u, const ProblemSpec& spec,
                                                  const std::vector<GridFunction>& test_functions) {
  const Grid& grid = *spec.grid;
  const auto rule = gauss_rule(spec.grid);
  const auto g_qp = sample_at_points(spec.g, rule);
  const auto f_qp = sample_at_points(spec.f, rule);
  const auto u_qp = sample_at_points(u, rule);
  std::vector<double> eta_qp(rule.size());
  for (std::size_t qp = 0; qp < rule.size(); ++qp)
    eta_qp[qp] = spec.exponents.eta(rule.points[qp]);

  std::vector<double> defects;
  defects.reserve(test_functions.size());
  for (const auto& phi : test_functions) {
    for (int i : grid.boundary_nodes)
      if (phi[static_cast<std::size_t>(i)] != 0.0)
        throw std::invalid_argument(
            "weak_solution_residual: test functions must vanish on the boundary");

    double defect = 0.0;
    for (std::size_t e = 0; e < grid.n_elements(); ++e) {
      const auto gu = element_gradient(u, e);
      const auto gp = element_gradient(phi, e);
      const double gn = std::hypot(gu[0], gu[1]);
      const Point b = grid.barycenter(e);
      const double pe = spec.exponents.p(b);
      const double qe = spec.exponents.q(b);
      const Vec2 flux = power_flux({gu[0], gu[1]}, pe);
      double phi_mean = 0.0;
      for (int v = 0; v < grid.nodes_per_element(); ++v)
        phi_mean += phi[static_cast<std::size_t>(grid.elements[e][static_cast<std::size_t>(v)])];
      phi_mean /= grid.nodes_per_element();
      defect += grid.element_volumes[e] *
                (flux[0] * gp[0] + flux[1] * gp[1] + std::pow(gn, qe) * phi_mean);
    }
    const auto phi_qp = sample_at_points(phi, rule);
    for (std::size_t qp = 0; qp < rule.size(); ++qp) {
      double s = f_qp[qp];
      if (spec.lambda > 0.0 && u_qp[qp] > 0.0)
        s += spec.lambda * g_qp[qp] * std::pow(u_qp[qp], eta_qp[qp]);
      defect -= rule.weights[qp] * s * phi_qp[qp];
    }
    defects.push_back(defect);
  }
  return defects;
}

}  // namespace vexlab

#endif  // VEXLAB_SOLVER_HPP
