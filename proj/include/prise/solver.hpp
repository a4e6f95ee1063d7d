#pragma once

// Branch-and-bound backend: HiGHS. Every call builds its own Highs object, so
// distinct models may be solved concurrently from distinct threads.

#include <chrono>
#include <string>

#include "Highs.h"
#include "prise/milp.hpp"

namespace prise {

namespace detail {

inline HighsLp to_highs(const MilpModel& model) {
  HighsLp lp;
  const int n = model.num_variables();
  const int m = model.num_constraints();
  lp.num_col_ = n;
  lp.num_row_ = m;
  lp.offset_ = model.objective_offset;
  lp.sense_ = ObjSense::kMinimize;
  lp.col_cost_.reserve(n);
  lp.integrality_.reserve(n);
  bool any_integer = false;
  for (const auto& v : model.variables()) {
    lp.col_cost_.push_back(v.objective);
    const bool integral = v.type != VarType::Continuous;
    any_integer |= integral;
    lp.col_lower_.push_back(v.type == VarType::Binary ? std::max(0.0, v.lower) : v.lower);
    lp.col_upper_.push_back(v.type == VarType::Binary ? std::min(1.0, v.upper) : v.upper);
    lp.integrality_.push_back(integral ? HighsVarType::kInteger : HighsVarType::kContinuous);
  }
  if (!any_integer) lp.integrality_.clear();
  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.num_col_ = n;
  lp.a_matrix_.num_row_ = m;
  lp.a_matrix_.start_.assign(1, 0);
  for (const auto& row : model.constraints()) {
    for (const auto& t : row.terms) {
      lp.a_matrix_.index_.push_back(t.var);
      lp.a_matrix_.value_.push_back(t.coef);
    }
    lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    lp.row_lower_.push_back(row.sense == Sense::LessEqual ? -kHighsInf : row.rhs);
    lp.row_upper_.push_back(row.sense == Sense::GreaterEqual ? kHighsInf : row.rhs);
  }
  return lp;
}

}  // namespace detail

// Solver failures are reported through SolveResult::status, never thrown.
inline SolveResult solve(const MilpModel& model, const SolveSettings& settings) {
  settings.check();
  SolveResult result;
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&]() -> SolveResult {
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("threads", 1);
  highs.setOptionValue("mip_rel_gap", settings.mip_gap);
  highs.setOptionValue("random_seed", static_cast<int>(settings.random_seed));
  if (settings.time_limit) highs.setOptionValue("time_limit", *settings.time_limit);

  if (model.num_variables() == 0) {
    result.status = SolveStatus::Optimal;
    result.objective = model.objective_offset;
    result.gap = 0.0;
    for (const auto& row : model.constraints()) {
      const bool ok = row.sense == Sense::LessEqual ? 0.0 <= row.rhs + 1e-9
                      : row.sense == Sense::Equal   ? std::abs(row.rhs) <= 1e-9
                                                    : 0.0 >= row.rhs - 1e-9;
      if (!ok) {
        result.status = SolveStatus::Infeasible;
        result.objective.reset();
        result.gap.reset();
      }
    }
    return finish();
  }

  if (highs.passModel(detail::to_highs(model)) == HighsStatus::kError) {
    result.status = SolveStatus::Error;
    result.message = "backend rejected the model";
    return finish();
  }
  const HighsStatus run_status = highs.run();
  const HighsModelStatus status = highs.getModelStatus();
  const HighsInfo& info = highs.getInfo();
  const bool has_incumbent = info.primal_solution_status == kSolutionStatusFeasible;

  switch (status) {
    case HighsModelStatus::kOptimal: result.status = SolveStatus::Optimal; break;
    case HighsModelStatus::kInfeasible:
    case HighsModelStatus::kUnboundedOrInfeasible: result.status = SolveStatus::Infeasible; break;
    case HighsModelStatus::kTimeLimit:
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kSolutionLimit:
    case HighsModelStatus::kInterrupt: result.status = SolveStatus::TimeLimit; break;
    default:
      result.status = SolveStatus::Error;
      result.message = "backend status: " + highs.modelStatusToString(status);
      break;
  }
  if (run_status == HighsStatus::kError && result.status == SolveStatus::Optimal) {
    result.status = SolveStatus::Error;
    result.message = "backend run failed";
  }
  if (has_incumbent && result.status != SolveStatus::Infeasible && result.status != SolveStatus::Error) {
    result.objective = info.objective_function_value;
    result.values = highs.getSolution().col_value;
    const bool is_mip = info.mip_node_count >= 0;
    result.gap = is_mip ? std::max(0.0, info.mip_gap) : 0.0;
    if (result.status == SolveStatus::Optimal && is_mip && info.mip_gap > settings.mip_gap + 1e-12)
      result.status = SolveStatus::Feasible;
  }
  return finish();
}

}  // namespace prise
