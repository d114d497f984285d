// Variational constants as discrete Rayleigh-quotient minima: the embedding
// constant inf ||grad v||_p / ||v||_q over boundary-zero grid functions, and
// its weighted relative inf ||grad phi||_q / ||g^(1/eta) phi||_eta.
//
// Minimization is normalized projected subgradient descent from several
// random starts. Luxemburg norms have no closed-form gradient, so descent
// uses finite differences of the quotient; each perturbed norm is recovered
// from a local second-order model of the modular equation around the
// current root (only elements touching the perturbed node are re-evaluated),
// which keeps a full gradient at O(n) cost. Discrete minima are upper
// bounds on the continuum infima; reports say so and never claim more.

#ifndef VEXLAB_CONSTANTS_HPP
#define VEXLAB_CONSTANTS_HPP

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "vexlab/exponents.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/modular.hpp"
#include "vexlab/quadrature.hpp"

namespace vexlab {

struct RayleighOptions {
  int starts = 8;
  unsigned seed = 12345;
  int max_iters = 600;
  double initial_step = 0.25;
  double stagnation_tol = 1e-8;  // relative decrease over the window
  int stagnation_window = 20;
  double fd_step = 1e-6;
  int threads = 1;
  std::vector<GridFunction> extra_starts;  // e.g. prolonged coarse minimizers
};

struct ConstantEstimate {
  double value = std::numeric_limits<double>::infinity();
  GridFunction minimizer;
  std::vector<std::pair<int, double>> trace;  // accepted (iteration, quotient) of best start
  bool converged = false;
  int best_start = -1;
  int starts = 0;
  unsigned seed = 0;
  // embedding context, reported not gated
  int dimension = 0;
  double numerator_exponent_max = 0.0;
  bool exponent_max_below_dimension = false;
  bool subcriticality_defined = false;
  double subcriticality_margin = 0.0;  // inf of (numerator exponent)* - denominator exponent

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["value"] = value;
    j["iterations"] = trace.size();
    j["converged"] = converged;
    j["starts"] = starts;
    j["seed"] = seed;
    j["best_start"] = best_start;
    j["bound_kind"] = "upper bound on the discrete infimum";
    j["dimension"] = dimension;
    j["numerator_exponent_max"] = numerator_exponent_max;
    j["exponent_max_below_dimension"] = exponent_max_below_dimension;
    if (subcriticality_defined) j["subcriticality_margin"] = subcriticality_margin;
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& [it, val] : trace) tr.push_back({it, val});
    j["trace"] = tr;
    return j;
  }
};

namespace detail {

// Shared machinery for both quotients. The numerator measures the gradient
// field |grad v| per element in the numerator exponent; the denominator
// measures weight * (element mean of v) in the denominator exponent.
class RayleighObjective {
public:
  RayleighObjective(GridPtr grid, const ExponentField& num_exp, const ExponentField& den_exp,
                    std::vector<double> den_weights)
      : grid_(std::move(grid)),
        num_eval_(num_exp, barycenter_rule(grid_)),
        den_eval_(den_exp, barycenter_rule(grid_)),
        den_weights_(std::move(den_weights)) {
    const std::size_t ne = grid_->n_elements();
    if (den_weights_.empty()) den_weights_.assign(ne, 1.0);
    if (den_weights_.size() != ne)
      throw std::invalid_argument("RayleighObjective: one weight per element required");
    // per-element basis gradients for fast local updates
    basis_grads_.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
      const auto& el = grid_->elements[e];
      const int npe = grid_->nodes_per_element();
      for (int v = 0; v < npe; ++v) {
        GridFunction phi(grid_, 0.0);
        phi[static_cast<std::size_t>(el[static_cast<std::size_t>(v)])] = 1.0;
        basis_grads_[e][static_cast<std::size_t>(v)] = element_gradient(phi, e);
      }
    }
    build_metric();
  }

  // Descent runs in the discrete Dirichlet-Laplacian metric: raw Euclidean
  // finite-difference gradients scale like the stiffest mesh mode and force
  // O(1/h^2) iterations, while the Laplacian Riesz representative gives a
  // mesh-independent rate. The metric is a fixed SPD matrix, factored once.
  void build_metric() {
    const auto n = static_cast<Eigen::Index>(grid_->n_nodes());
    std::vector<Eigen::Triplet<double>> trip;
    const int npe = grid_->nodes_per_element();
    for (std::size_t e = 0; e < grid_->n_elements(); ++e) {
      const auto& el = grid_->elements[e];
      for (int a = 0; a < npe; ++a) {
        const int ia = el[static_cast<std::size_t>(a)];
        if (grid_->node_on_boundary[static_cast<std::size_t>(ia)]) continue;
        for (int b = 0; b < npe; ++b) {
          const int ib = el[static_cast<std::size_t>(b)];
          if (grid_->node_on_boundary[static_cast<std::size_t>(ib)]) continue;
          const auto& ga = basis_grads_[e][static_cast<std::size_t>(a)];
          const auto& gb = basis_grads_[e][static_cast<std::size_t>(b)];
          trip.emplace_back(ia, ib,
                            grid_->element_volumes[e] * (ga[0] * gb[0] + ga[1] * gb[1]));
        }
      }
    }
    for (Eigen::Index i = 0; i < n; ++i)
      if (grid_->node_on_boundary[static_cast<std::size_t>(i)]) trip.emplace_back(i, i, 1.0);
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trip.begin(), trip.end());
    metric_.compute(K);
    if (metric_.info() != Eigen::Success)
      throw std::runtime_error("RayleighObjective: metric factorization failed");
  }

  std::vector<double> precondition(const std::vector<double>& grad) const {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(grad.size()));
    for (std::size_t i = 0; i < grad.size(); ++i)
      rhs[static_cast<Eigen::Index>(i)] = grid_->node_on_boundary[i] ? 0.0 : grad[i];
    Eigen::VectorXd d = metric_.solve(rhs);
    std::vector<double> out(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i)
      out[i] = grid_->node_on_boundary[i] ? 0.0 : d[static_cast<Eigen::Index>(i)];
    return out;
  }

  const Grid& grid() const { return *grid_; }

  void fill_values(const GridFunction& v, std::vector<double>& num_vals,
                   std::vector<double>& den_vals) const {
    const std::size_t ne = grid_->n_elements();
    num_vals.resize(ne);
    den_vals.resize(ne);
    const int npe = grid_->nodes_per_element();
    for (std::size_t e = 0; e < ne; ++e) {
      const auto g = element_gradient(v, e);
      num_vals[e] = std::hypot(g[0], g[1]);
      double mean = 0.0;
      for (int k = 0; k < npe; ++k)
        mean += v[static_cast<std::size_t>(grid_->elements[e][static_cast<std::size_t>(k)])];
      den_vals[e] = den_weights_[e] * mean / npe;
    }
  }

  struct State {
    double quotient = std::numeric_limits<double>::infinity();
    ModularEvaluator::NormState num;
    ModularEvaluator::NormState den;
    std::vector<double> num_vals;
    std::vector<double> den_vals;
  };

  State evaluate(const GridFunction& v, double warm_num = 0.0, double warm_den = 0.0) const {
    State st;
    fill_values(v, st.num_vals, st.den_vals);
    st.den = den_eval_.luxemburg_fast(st.den_vals, warm_den);
    if (st.den.lambda <= 0.0) return st;  // quotient stays +inf
    st.num = num_eval_.luxemburg_fast(st.num_vals, warm_num);
    st.quotient = st.num.lambda / st.den.lambda;
    return st;
  }

  // Norm of v + h e_node recovered from a local quadratic model of the
  // modular equation around the current root.
  double perturbed_norm(const ModularEvaluator& eval, const ModularEvaluator::NormState& base,
                        std::span<const double> base_vals, std::span<const double> new_vals,
                        std::span<const std::size_t> elements) const {
    const double lam0 = base.lambda;
    if (lam0 <= 0.0) return lam0;
    const auto& w = eval.rule().weights;
    const auto& exps = eval.exponents();
    double lam = lam0;
    for (int it = 0; it < 3; ++it) {
      double delta = 0.0, ddelta = 0.0;  // local modular change and its lambda-derivative
      for (std::size_t j = 0; j < elements.size(); ++j) {
        const std::size_t e = elements[j];
        const double ex = exps[e];
        double told = 0.0, tnew = 0.0;
        if (base_vals[e] != 0.0) told = w[e] * std::pow(std::fabs(base_vals[e]) / lam, ex);
        if (new_vals[j] != 0.0) tnew = w[e] * std::pow(std::fabs(new_vals[j]) / lam, ex);
        delta += tnew - told;
        ddelta += -(ex / lam) * (tnew - told);
      }
      const double d = lam - lam0;
      const double rho_model = 1.0 - (base.d1 / lam0) * d + 0.5 * (base.d2 / (lam0 * lam0)) * d * d;
      const double g = rho_model + delta - 1.0;
      const double gp = -(base.d1 / lam0) + (base.d2 / (lam0 * lam0)) * d + ddelta;
      if (gp == 0.0) break;
      const double next = lam - g / gp;
      if (!(next > 0.25 * lam0 && next < 4.0 * lam0)) break;  // fall back to the base root
      if (std::fabs(next - lam) <= 1e-15 * lam) {
        lam = next;
        break;
      }
      lam = next;
    }
    return lam;
  }

  // Forward-difference gradient of the quotient at v (interior nodes only).
  std::vector<double> quotient_gradient(const GridFunction& v, const State& st, double h) const {
    const std::size_t nn = grid_->n_nodes();
    std::vector<double> grad(nn, 0.0);
    const int npe = grid_->nodes_per_element();
    std::vector<double> new_num, new_den;
    std::vector<std::size_t> elems;
    for (std::size_t i = 0; i < nn; ++i) {
      if (grid_->node_on_boundary[i]) continue;
      const auto& adj = grid_->node_elements[i];
      elems.assign(adj.begin(), adj.end());
      new_num.resize(elems.size());
      new_den.resize(elems.size());
      for (std::size_t j = 0; j < elems.size(); ++j) {
        const std::size_t e = elems[j];
        const auto& el = grid_->elements[e];
        int local = 0;
        while (el[static_cast<std::size_t>(local)] != static_cast<int>(i)) ++local;
        const auto g0 = element_gradient(v, e);
        const auto& bg = basis_grads_[e][static_cast<std::size_t>(local)];
        new_num[j] = std::hypot(g0[0] + h * bg[0], g0[1] + h * bg[1]);
        new_den[j] = st.den_vals[e] + den_weights_[e] * h / npe;
      }
      const double num_p = perturbed_norm(num_eval_, st.num, st.num_vals, new_num, elems);
      const double den_p = perturbed_norm(den_eval_, st.den, st.den_vals, new_den, elems);
      if (den_p > 0.0) grad[i] = (num_p / den_p - st.quotient) / h;
    }
    return grad;
  }

  // Reference implementation: full re-evaluation per component (test oracle).
  std::vector<double> quotient_gradient_brute(const GridFunction& v, double h) const {
    const State st = evaluate(v);
    std::vector<double> grad(grid_->n_nodes(), 0.0);
    for (std::size_t i = 0; i < grid_->n_nodes(); ++i) {
      if (grid_->node_on_boundary[i]) continue;
      GridFunction vp = v;
      vp[i] += h;
      const State sp = evaluate(vp, st.num.lambda, st.den.lambda);
      grad[i] = (sp.quotient - st.quotient) / h;
    }
    return grad;
  }

private:
  GridPtr grid_;
  ModularEvaluator num_eval_;
  ModularEvaluator den_eval_;
  std::vector<double> den_weights_;
  std::vector<std::array<std::array<double, 2>, 3>> basis_grads_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> metric_;
};

struct DescentResult {
  double value = std::numeric_limits<double>::infinity();
  GridFunction minimizer;
  std::vector<std::pair<int, double>> trace;
  bool converged = false;
};

inline GridFunction random_fourier_start(GridPtr grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& dom = grid->domain;
  const double pi = 3.14159265358979323846;
  GridFunction v(grid, 0.0);
  if (grid->dimension == 1) {
    std::vector<double> coef(6);
    for (int m = 0; m < 6; ++m) coef[static_cast<std::size_t>(m)] = gauss(rng) / (m + 1.0);
    for (std::size_t i = 0; i < grid->n_nodes(); ++i) {
      const double t = (grid->nodes[i].x - dom.lo(0)) / dom.extent(0);
      double s = 0.0;
      for (int m = 0; m < 6; ++m) s += coef[static_cast<std::size_t>(m)] * std::sin((m + 1) * pi * t);
      v[i] = s;
    }
  } else {
    std::vector<double> coef(9);
    for (auto& c : coef) c = gauss(rng);
    for (std::size_t i = 0; i < grid->n_nodes(); ++i) {
      const double tx = (grid->nodes[i].x - dom.lo(0)) / dom.extent(0);
      const double ty = (grid->nodes[i].y - dom.lo(1)) / dom.extent(1);
      double s = 0.0;
      for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 3; ++n)
          s += coef[static_cast<std::size_t>(3 * (m - 1) + n - 1)] / (m * n) *
               std::sin(m * pi * tx) * std::sin(n * pi * ty);
      v[i] = s;
    }
  }
  return dirichlet_project(v);
}

inline DescentResult descend(const RayleighObjective& obj, GridFunction v,
                             const RayleighOptions& opts) {
  DescentResult res;
  v = dirichlet_project(v);

  auto normalize = [&](GridFunction& u, RayleighObjective::State& st) {
    if (st.den.lambda <= 0.0) return false;
    for (auto& x : u.values()) x /= st.den.lambda;
    st = obj.evaluate(u, st.num.lambda / st.den.lambda, 1.0);
    return st.den.lambda > 0.0;
  };

  auto st = obj.evaluate(v);
  if (!normalize(v, st)) return res;
  res.trace.emplace_back(0, st.quotient);

  double step = opts.initial_step;
  std::vector<double> window;
  window.push_back(st.quotient);

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const double h = opts.fd_step * std::max(1.0, v.max_abs());
    const auto grad = obj.precondition(obj.quotient_gradient(v, st, h));
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    g2 = std::sqrt(g2);
    if (g2 < 1e-14 * std::max(1.0, st.quotient)) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    while (step * g2 > 1e-15) {
      GridFunction trial = v;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= step * grad[i];
      auto ts = obj.evaluate(trial, st.num.lambda, st.den.lambda);
      if (ts.den.lambda > 0.0 && normalize(trial, ts) &&
          ts.quotient < st.quotient * (1.0 - 1e-15)) {
        v = std::move(trial);
        st = std::move(ts);
        step = std::min(step * 1.4, 1e6);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no descent direction at resolvable step sizes
      break;
    }
    res.trace.emplace_back(iter, st.quotient);
    window.push_back(st.quotient);
    const int w = opts.stagnation_window;
    if (static_cast<int>(window.size()) > w) {
      const double before = window[window.size() - 1 - static_cast<std::size_t>(w)];
      if (before - st.quotient < opts.stagnation_tol * std::max(st.quotient, 1e-30)) {
        res.converged = true;
        break;
      }
    }
  }

  res.value = st.quotient;
  res.minimizer = std::move(v);
  return res;
}

inline ConstantEstimate minimize_quotient(const RayleighObjective& obj, GridPtr grid,
                                          const RayleighOptions& opts) {
  const int n_random = std::max(1, opts.starts);
  const int total = n_random + static_cast<int>(opts.extra_starts.size());
  std::vector<DescentResult> results(static_cast<std::size_t>(total));

  auto run_start = [&](int s) {
    GridFunction start =
        s < n_random ? random_fourier_start(grid, opts.seed + 1000003u * static_cast<unsigned>(s))
                     : opts.extra_starts[static_cast<std::size_t>(s - n_random)];
    results[static_cast<std::size_t>(s)] = descend(obj, start, opts);
  };

  if (opts.threads > 1) {
    std::vector<std::thread> pool;
    const int nt = std::min(opts.threads, total);
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t]() {
        for (int s = t; s < total; s += nt) run_start(s);
      });
    for (auto& th : pool) th.join();
  } else {
    for (int s = 0; s < total; ++s) run_start(s);
  }

  ConstantEstimate est;
  est.starts = total;
  est.seed = opts.seed;
  est.dimension = grid->dimension;
  for (int s = 0; s < total; ++s) {
    const auto& r = results[static_cast<std::size_t>(s)];
    if (r.value < est.value) {
      est.value = r.value;
      est.minimizer = r.minimizer;
      est.trace = r.trace;
      est.converged = r.converged;
      est.best_start = s;
    }
  }
  return est;
}

}  // namespace detail

// Quotient evaluated at a given function (used by scale-invariance checks
// and by homogeneity oracles on returned minimizers).
inline double rayleigh_quotient(const GridFunction& v, const ExponentField& p,
                                const ExponentField& q) {
  detail::RayleighObjective obj(v.grid_ptr(), p, q, {});
  return obj.evaluate(v).quotient;
}

inline double weighted_quotient(const GridFunction& phi, const GridFunction& g,
                                const ExponentField& eta, const ExponentField& q) {
  auto grid = phi.grid_ptr();
  ModularEvaluator ev(eta, barycenter_rule(grid));  // for point layout only
  std::vector<double> weights(grid->n_elements());
  const auto gv = sample_at_points(g, ev.rule());
  for (std::size_t e = 0; e < weights.size(); ++e)
    weights[e] = std::pow(std::max(gv[e], 0.0), 1.0 / eta(ev.rule().points[e]));
  detail::RayleighObjective obj(grid, q, eta, std::move(weights));
  return obj.evaluate(phi).quotient;
}

// Discrete embedding constant inf ||grad v||_p / ||v||_q over boundary-zero
// functions. The estimate is an upper bound on the discrete infimum; the
// report carries the (informative) continuum context: whether max p < N and
// the uniform subcriticality margin inf(p* - q) when defined.
inline ConstantEstimate sobolev_constant(const ExponentField& p, const ExponentField& q,
                                         GridPtr grid, const RayleighOptions& opts = {}) {
  detail::RayleighObjective obj(grid, p, q, {});
  ConstantEstimate est = detail::minimize_quotient(obj, grid, opts);
  const int N = grid->dimension;
  est.numerator_exponent_max = p.max();
  est.exponent_max_below_dimension = p.max() < N;
  if (p.max() < N) {
    est.subcriticality_defined = true;
    double margin = std::numeric_limits<double>::infinity();
    for (const Point& x : p.validation_points()) {
      const double ps = N * p(x) / (N - p(x));
      margin = std::min(margin, ps - q(x));
    }
    est.subcriticality_margin = margin;
  }
  return est;
}

// Weighted relative inf ||grad phi||_q / ||g^(1/eta) phi||_eta.
// eta must stay strictly positive (the weight g^(1/eta) is undefined at
// eta = 0) and g must be nonnegative and not identically zero.
inline ConstantEstimate weighted_constant(const GridFunction& g, const ExponentField& eta,
                                          const ExponentField& q, GridPtr grid,
                                          const RayleighOptions& opts = {}) {
  if (!(eta.min() > 0.0))
    throw std::invalid_argument(
        "weighted_constant: eta must be strictly positive everywhere (weight g^(1/eta) is "
        "undefined where eta vanishes)");
  for (double v : g.values())
    if (v < 0.0) throw std::invalid_argument("weighted_constant: g must be nonnegative");
  if (g.max_abs() == 0.0)
    throw std::invalid_argument("weighted_constant: g must not vanish identically");

  ModularEvaluator ev(eta, barycenter_rule(grid));
  std::vector<double> weights(grid->n_elements());
  const auto gv = sample_at_points(g, ev.rule());
  for (std::size_t e = 0; e < weights.size(); ++e)
    weights[e] = std::pow(std::max(gv[e], 0.0), 1.0 / eta(ev.rule().points[e]));

  detail::RayleighObjective obj(grid, q, eta, std::move(weights));
  ConstantEstimate est = detail::minimize_quotient(obj, grid, opts);
  const int N = grid->dimension;
  est.numerator_exponent_max = q.max();
  est.exponent_max_below_dimension = q.max() < N;
  return est;
}

}  // namespace vexlab

#endif  // VEXLAB_CONSTANTS_HPP
