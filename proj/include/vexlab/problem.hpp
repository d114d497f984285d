// Problem instances, solver configuration and the per-stage solve report.

#ifndef VEXLAB_PROBLEM_HPP
#define VEXLAB_PROBLEM_HPP

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vexlab/exponents.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/validation.hpp"

namespace vexlab {

// Full instance: discretized domain, exponent triple, nonnegative data
// f and g, coupling lambda. The variant lives on the exponent triple.
struct ProblemSpec {
  GridPtr grid;
  ExponentTriple exponents;
  GridFunction f;
  GridFunction g;
  double lambda = 0.0;

  GrowthVariant variant() const { return exponents.variant; }

  // Throws on structural violations; the variant-specific exponent
  // conditions gate here, the dimension-dependent embedding conditions are
  // diagnostics elsewhere.
  void validate() const {
    if (!grid) throw std::invalid_argument("ProblemSpec: missing grid");
    if (f.size() != grid->n_nodes() || g.size() != grid->n_nodes())
      throw std::invalid_argument("ProblemSpec: data fields must live on the solve grid");
    if (!f.all_finite() || !g.all_finite())
      throw std::invalid_argument("ProblemSpec: data fields must be finite");
    for (double v : f.values())
      if (v < 0.0) throw std::invalid_argument("ProblemSpec: f must be nonnegative");
    for (double v : g.values())
      if (v < 0.0) throw std::invalid_argument("ProblemSpec: g must be nonnegative");
    if (lambda < 0.0) throw std::invalid_argument("ProblemSpec: lambda must be nonnegative");
    if (lambda > 0.0 && g.max_abs() == 0.0)
      throw std::invalid_argument(
          "ProblemSpec: g must not vanish identically when lambda is positive");
    const auto rep = check_admissibility(exponents, grid->dimension);
    if (!variant_conditions_pass(rep, exponents.variant)) {
      std::string failed;
      for (const auto& c : rep.checks)
        if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
      throw std::invalid_argument("ProblemSpec: exponent conditions failed for the " +
                                  std::string(to_string(exponents.variant)) +
                                  " variant: " + failed);
    }
  }
};

struct SolverConfig {
  // inner solver
  double delta = 1e-6;          // gradient-flux regularization in the residual
  double newton_tol = 1e-11;    // sup-norm residual target
  int newton_max_iters = 80;
  bool picard_hamiltonian = false;  // lag the gradient-power term in the Jacobian
  double jacobian_floor = 1e-8;     // clamp for the source derivative argument
  double hamiltonian_scale = 1.0;   // testing hook: 0 disables the gradient power
  // outer scheme
  std::vector<int> schedule = {1, 2, 4, 8, 16, 32, 64};  // strictly increasing
  std::vector<double> diagnostic_k = {1.0, 2.0, 4.0, 8.0};
  double outer_tol = 1e-4;       // stop when every d(n,k) falls below this
  double bound_rel_tol = 1e-3;   // stabilization of the gradient-norm sequence
  bool final_polish = true;      // finish with the exact gradient power and raw data
  double polish_tol_factor = 0.01;

  void validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("SolverConfig: delta must be positive");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be positive");
    for (std::size_t i = 1; i < schedule.size(); ++i)
      if (schedule[i] <= schedule[i - 1])
        throw std::invalid_argument("SolverConfig: schedule must be strictly increasing");
    for (std::size_t i = 1; i < diagnostic_k.size(); ++i)
      if (diagnostic_k[i] <= diagnostic_k[i - 1])
        throw std::invalid_argument("SolverConfig: diagnostic levels must be strictly increasing");
  }
};

struct NewtonTrace {
  std::vector<double> residual_norms;
  int iterations = 0;
  bool converged = false;
};

// Inner solver failure carrying the trace and the last iterate.
class SolveFailure : public std::runtime_error {
public:
  SolveFailure(const std::string& what, NewtonTrace trace, GridFunction last)
      : std::runtime_error(what), trace(std::move(trace)), last_iterate(std::move(last)) {}
  NewtonTrace trace;
  GridFunction last_iterate;
};

struct StageRecord {
  int n = 0;                      // regularization / truncation index; -1 for the polish
  GridFunction solution;
  NewtonTrace inner;
  double gradient_modular = 0.0;  // int |grad u|^p
  double gradient_norm_q = 0.0;   // Luxemburg norm of |grad u| in q
  std::map<double, double> tail;            // k -> int_{u >= k} |grad u|^q
  std::map<double, double> excess_modular;  // k -> int |grad G_k u|^p
  std::map<double, double> distance;        // k -> || grad T_k u - grad T_k u_prev ||_p
  double comparison_margin = 0.0;  // min over nodes of (barrier - u)
  double min_value = 0.0;
  double hn_gap = 0.0;  // int (|grad u|^q - H_n(|grad u|)); consistency budget

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["inner_iterations"] = inner.iterations;
    j["inner_converged"] = inner.converged;
    j["residual_norms"] = inner.residual_norms;
    j["gradient_modular"] = gradient_modular;
    j["gradient_norm_q"] = gradient_norm_q;
    auto map_to_json = [](const std::map<double, double>& m) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& [k, v] : m) a.push_back({k, v});
      return a;
    };
    j["tail"] = map_to_json(tail);
    j["excess_modular"] = map_to_json(excess_modular);
    j["distance"] = map_to_json(distance);
    j["comparison_margin"] = comparison_margin;
    j["min_value"] = min_value;
    j["hn_gap"] = hn_gap;
    return j;
  }
};

enum class SolveStatus { converged = 0, diagnostic_failure = 2, inner_failure = 3 };

struct SolveReport {
  std::vector<StageRecord> stages;
  std::optional<StageRecord> polish;
  GridFunction solution;
  std::string variant;
  std::string hamiltonian_treatment;  // "newton" or "picard"
  double delta = 0.0;
  double inner_tol = 0.0;
  double outer_tol = 0.0;

  bool outer_converged = false;
  bool nonnegativity_ok = false;
  bool barrier_ok = false;
  bool tail_monotone_ok = false;
  std::vector<double> weak_residual_defects;
  double max_weak_defect = 0.0;

  // data-exponent diagnostics; absent when the Sobolev conjugate is
  // undefined at this dimension (then the note says why)
  std::optional<double> f_norm_q0;
  std::optional<double> g_norm_q1;
  std::string data_norm_note;
  std::optional<ValidationReport> natural_map_check;

  SolveStatus status = SolveStatus::inner_failure;

  bool diagnostics_ok() const { return nonnegativity_ok && barrier_ok && tail_monotone_ok; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["variant"] = variant;
    j["hamiltonian_treatment"] = hamiltonian_treatment;
    j["delta"] = delta;
    j["inner_tol"] = inner_tol;
    j["outer_tol"] = outer_tol;
    j["outer_converged"] = outer_converged;
    j["nonnegativity_ok"] = nonnegativity_ok;
    j["barrier_ok"] = barrier_ok;
    j["tail_monotone_ok"] = tail_monotone_ok;
    j["weak_residual_defects"] = weak_residual_defects;
    j["max_weak_defect"] = max_weak_defect;
    j["status"] = static_cast<int>(status);
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages) j["stages"].push_back(s.to_json());
    if (polish) j["polish"] = polish->to_json();
    if (f_norm_q0) j["f_norm_q0"] = *f_norm_q0;
    if (g_norm_q1) j["g_norm_q1"] = *g_norm_q1;
    if (!data_norm_note.empty()) j["data_norm_note"] = data_norm_note;
    if (natural_map_check) j["natural_map_check"] = natural_map_check->to_json();
    return j;
  }
};

}  // namespace vexlab

#endif  // VEXLAB_PROBLEM_HPP
