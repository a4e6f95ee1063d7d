#pragma once

// The interface shared by every two-stage robust problem the evaluator and
// the selectors work on: build the reduced deterministic equivalent for a
// scenario subset, read a first stage back from its solution, and evaluate a
// fixed first stage scenario by scenario.

#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "prise/formulation.hpp"
#include "prise/instance.hpp"
#include "prise/milp.hpp"

namespace prise {

template <class P>
concept RobustProblem = requires(const P& p, std::span<const int> R, const typename P::Decision& x, int s,
                                 const MilpModel& model, const SolveResult& result) {
  typename P::Decision;
  { p.scenario_count() } -> std::convertible_to<int>;
  { p.reduced_model(R) } -> std::same_as<MilpModel>;
  { p.decision(model, result) } -> std::same_as<typename P::Decision>;
  { p.first_stage_cost(x) } -> std::convertible_to<double>;
  { p.recourse_model(x, s) } -> std::same_as<MilpModel>;
};

// Generated SEL / VC / CFLP instance.
class InstanceProblem {
 public:
  using Decision = FirstStage;

  explicit InstanceProblem(const Instance& inst, CapacityPolicy policy = CapacityPolicy::Fixed)
      : inst_(&inst), policy_(policy) {}

  const Instance& instance() const { return *inst_; }
  CapacityPolicy policy() const { return policy_; }

  int scenario_count() const { return inst_->scenario_count(); }
  MilpModel reduced_model(std::span<const int> R) const { return build_reduced_model(*inst_, R); }
  Decision decision(const MilpModel& model, const SolveResult& result) const {
    return extract_first_stage(*inst_, model, result);
  }
  double first_stage_cost(const Decision& x) const { return prise::first_stage_cost(*inst_, x, policy_); }
  MilpModel recourse_model(const Decision& x, int s) const { return build_fixed_x_recourse(*inst_, x, s, policy_); }

 private:
  const Instance* inst_;
  CapacityPolicy policy_;
};

// Finite first-stage set given as a table: cost[d][s] is the total cost
// (first stage plus recourse) of decision d under scenario s.
class DecisionTable {
 public:
  using Decision = int;

  explicit DecisionTable(std::vector<std::vector<double>> cost) : cost_(std::move(cost)) {
    if (cost_.empty() || cost_.front().empty()) throw ParameterError("decision table is empty");
    for (const auto& row : cost_)
      if (row.size() != cost_.front().size()) throw ParameterError("decision table rows differ in length");
  }

  int decision_count() const { return static_cast<int>(cost_.size()); }
  int scenario_count() const { return static_cast<int>(cost_.front().size()); }
  double cost(int d, int s) const { return cost_[d][s]; }

  // min eta  s.t.  sum_d w_d = 1,  eta >= sum_d cost[d][s] w_d  for s in R,  w binary.
  MilpModel reduced_model(std::span<const int> R) const {
    MilpModel model;
    Constraint pick{"pick", {}, Sense::Equal, 1.0};
    for (int d = 0; d < decision_count(); ++d) {
      const int w = model.add_variable({"w_" + std::to_string(d), 0.0, 1.0, VarType::Binary, VarRole::FirstStage, -1, 0.0});
      pick.terms.push_back({w, 1.0});
    }
    model.add_constraint(std::move(pick));
    const int eta = model.add_variable({"eta", -kInf, kInf, VarType::Continuous, VarRole::Epigraph, -1, 1.0});
    for (int s : R) {
      if (s < 0 || s >= scenario_count()) throw ParameterError("scenario index " + std::to_string(s) + " out of range");
      Constraint epi{"epi_" + std::to_string(s), {{eta, 1.0}}, Sense::GreaterEqual, 0.0, s, true};
      for (int d = 0; d < decision_count(); ++d) epi.terms.push_back({d, -cost_[d][s]});
      model.add_constraint(std::move(epi));
    }
    return model;
  }

  Decision decision(const MilpModel& model, const SolveResult& result) const {
    const auto w = result.values_with_role(model, VarRole::FirstStage);
    int best = 0;
    for (int d = 1; d < static_cast<int>(w.size()); ++d)
      if (w[d] > w[best]) best = d;
    return best;
  }

  double first_stage_cost(const Decision&) const { return 0.0; }

  // Constant model whose optimum is cost[x][s].
  MilpModel recourse_model(const Decision& x, int s) const {
    if (x < 0 || x >= decision_count()) throw ParameterError("decision index out of range");
    MilpModel model;
    model.objective_offset = cost_[x][s];
    return model;
  }

 private:
  std::vector<std::vector<double>> cost_;
};

static_assert(RobustProblem<InstanceProblem>);
static_assert(RobustProblem<DecisionTable>);

}  // namespace prise
