#pragma once

// Restricted values V(R), full-scenario costs Z(x), regret, CFLP
// feasibility rates and compression budgets.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "prise/parallel.hpp"
#include "prise/problem.hpp"
#include "prise/solver.hpp"

namespace prise {

// Absolute slack granted whenever two solver values are compared; the
// relative part is the MIP gap in use.
inline constexpr double kAbsSlack = 1e-6;

inline double comparison_slack(double reference, const SolveSettings& settings) {
  return kAbsSlack + settings.mip_gap * std::abs(reference);
}

template <class Decision>
struct SetValue {
  SolveStatus status = SolveStatus::Optimal;
  std::optional<double> value;  // V(R); 0 for the empty set
  std::optional<Decision> decision;
  double seconds = 0.0;

  bool ok() const { return value.has_value(); }
};

// V(R). The empty set is worth 0 by convention and triggers no solve.
template <RobustProblem P>
SetValue<typename P::Decision> value_of_set(const P& problem, std::span<const int> R, const SolveSettings& settings) {
  SetValue<typename P::Decision> out;
  if (R.empty()) {
    out.value = 0.0;
    return out;
  }
  const MilpModel model = problem.reduced_model(R);
  const SolveResult result = solve(model, settings);
  out.status = result.status;
  out.seconds = result.seconds;
  if (result.has_solution()) {
    out.value = *result.objective;
    out.decision = problem.decision(model, result);
  }
  return out;
}

struct FullCost {
  bool feasible = true;                     // false when some scenario admits no recourse
  bool error = false;                       // some recourse solve ended without a usable answer
  std::optional<double> value;              // Z(x), present iff feasible && !error
  double first_stage = 0.0;
  std::vector<std::optional<double>> recourse;  // Q(x, xi_s)
  std::vector<SolveStatus> status;
  int worst_scenario = -1;
  double seconds = 0.0;
};

// Z(x) = first-stage cost + max_s Q(x, xi_s), one recourse solve per scenario.
// Solves run on `threads` workers; the max is reduced in scenario order.
template <RobustProblem P>
FullCost full_cost(const P& problem, const typename P::Decision& x, const SolveSettings& settings, int threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  const int S = problem.scenario_count();
  FullCost out;
  out.first_stage = problem.first_stage_cost(x);
  out.recourse.assign(S, std::nullopt);
  out.status.assign(S, SolveStatus::Error);
  std::atomic<bool> infeasible{false};
  parallel_for(static_cast<std::size_t>(S), threads, [&](std::size_t s) {
    if (infeasible.load()) return;  // result already decided
    const SolveResult r = solve(problem.recourse_model(x, static_cast<int>(s)), settings);
    out.status[s] = r.status;
    if (r.has_solution()) out.recourse[s] = *r.objective;
    if (r.status == SolveStatus::Infeasible) infeasible = true;
  });
  double worst = -kInf;
  for (int s = 0; s < S; ++s) {
    if (out.status[s] == SolveStatus::Infeasible) out.feasible = false;
    else if (!out.recourse[s]) out.error = true;
    else if (*out.recourse[s] > worst) {
      worst = *out.recourse[s];
      out.worst_scenario = s;
    }
  }
  if (!out.feasible) out.error = false;
  if (out.feasible && !out.error) out.value = out.first_stage + worst;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// (Z - V(Xi)) / V(Xi) * 100.
inline double regret_percent(double realized, double v_full) {
  if (!(v_full > 0.0)) throw ParameterError("regret needs V(Xi) > 0");
  return (realized - v_full) / v_full * 100.0;
}

template <class Decision>
struct RegretResult {
  std::optional<double> regret_pct;  // absent on infeasible recourse or solver failure
  bool infeasible = false;
  SetValue<Decision> reduced;
  FullCost realized;
  double v_full = 0.0;
};

// Regret of the reduced set R against a known V(Xi). The same settings are
// used for the reduced solve and the recourse solves.
template <RobustProblem P>
RegretResult<typename P::Decision> regret(const P& problem, std::span<const int> R, double v_full,
                                          const SolveSettings& settings, int threads = 1) {
  RegretResult<typename P::Decision> out;
  out.v_full = v_full;
  out.reduced = value_of_set(problem, R, settings);
  if (!out.reduced.decision) return out;
  out.realized = full_cost(problem, *out.reduced.decision, settings, threads);
  out.infeasible = !out.realized.feasible;
  if (out.realized.value) out.regret_pct = regret_percent(*out.realized.value, v_full);
  return out;
}

// Convenience overload computing V(Xi) first.
template <RobustProblem P>
RegretResult<typename P::Decision> regret(const P& problem, std::span<const int> R, const SolveSettings& settings,
                                          int threads = 1) {
  std::vector<int> all(problem.scenario_count());
  for (int s = 0; s < problem.scenario_count(); ++s) all[s] = s;
  const auto full = value_of_set(problem, all, settings);
  if (!full.value) throw EnvironmentError("full-scenario problem has no solution (status " + std::string(to_string(full.status)) + ")");
  return regret(problem, R, *full.value, settings, threads);
}

// Smallest k (1-based) with (V(Xi) - V(R^(k))) / V(Xi) <= tol over a chain of
// values V(R^(1)), V(R^(2)), ...; empty when no prefix qualifies.
inline std::optional<int> compression_budget(double v_full, std::span<const double> chain_values, double tol = 0.01) {
  if (!(v_full > 0.0)) throw ParameterError("compression budget needs V(Xi) > 0");
  for (std::size_t k = 0; k < chain_values.size(); ++k)
    if ((v_full - chain_values[k]) / v_full <= tol) return static_cast<int>(k) + 1;
  return std::nullopt;
}

inline bool is_nested_chain(std::span<const std::vector<int>> sets) {
  for (std::size_t k = 1; k < sets.size(); ++k) {
    auto prev = sets[k - 1];
    auto cur = sets[k];
    std::sort(prev.begin(), prev.end());
    std::sort(cur.begin(), cur.end());
    if (prev.size() >= cur.size() || !std::includes(cur.begin(), cur.end(), prev.begin(), prev.end())) return false;
  }
  return true;
}

// Solves V on every set of a nested chain R^(1) < R^(2) < ... and returns k-hat.
template <RobustProblem P>
std::optional<int> compression_budget(const P& problem, std::span<const std::vector<int>> nested_sets, double v_full,
                                      const SolveSettings& settings, double tol = 0.01) {
  if (!is_nested_chain(nested_sets)) throw ParameterError("scenario sets are not a strictly nested chain");
  std::vector<double> values;
  for (const auto& R : nested_sets) {
    const auto v = value_of_set(problem, R, settings);
    if (!v.value) throw EnvironmentError("reduced problem has no solution (status " + std::string(to_string(v.status)) + ")");
    values.push_back(*v.value);
    if ((v_full - values.back()) / v_full <= tol) break;
  }
  return compression_budget(v_full, values, tol);
}

// One evaluated (instance, method, budget) combination.
struct EvalReport {
  std::string instance_id;
  ProblemClass cls = ProblemClass::SEL;
  std::string method;
  std::optional<int> k;  // empty for budget-agnostic methods (exact)
  std::optional<double> regret_pct;
  bool infeasible = false;
  double v_full = 0.0;
  std::optional<double> v_reduced;
  std::optional<double> z_realized;
  double t_select_s = 0.0;
  double t_solve_s = 0.0;
  std::string status = "ok";
  double mip_gap = 1e-4;
  int threads = 1;

  std::string key() const {
    std::ostringstream os;
    os << instance_id << '|' << method << '|' << (k ? std::to_string(*k) : "-") << '|' << mip_gap;
    return os.str();
  }
};

// Percentage of the given CFLP reports (one method, one budget) whose first
// stage leaves some scenario without feasible recourse.
inline double feasibility_rate(std::span<const EvalReport> reports, const std::string& method, int k) {
  int total = 0, failing = 0;
  for (const auto& r : reports) {
    if (r.method != method || r.k != k) continue;
    if (r.cls != ProblemClass::CFLP) throw ParameterError("feasibility rate is only defined for CFLP (recourse is always feasible otherwise)");
    ++total;
    failing += r.infeasible ? 1 : 0;
  }
  if (total == 0) throw ParameterError("no reports for method '" + method + "' at k=" + std::to_string(k));
  return 100.0 * failing / total;
}

}  // namespace prise
