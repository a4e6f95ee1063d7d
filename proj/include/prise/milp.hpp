#pragma once

// Solver-independent mixed-integer linear programs.

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "prise/error.hpp"

namespace prise {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Binary, Integer, Continuous };
enum class Sense { LessEqual, Equal, GreaterEqual };

// What a column stands for in the two-stage model.
enum class VarRole {
  FirstStage,  // x
  Capacity,    // z (CFLP), first stage
  Epigraph,    // eta
  Recourse,    // y^(s)
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarType type = VarType::Continuous;
  VarRole role = VarRole::Recourse;
  int scenario = -1;  // recourse block, -1 otherwise
  double objective = 0.0;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  int scenario = -1;  // recourse block the row belongs to, -1 for first-stage rows
  bool epigraph = false;
};

// Minimization problem. Objective coefficients live on the variables.
class MilpModel {
 public:
  int add_variable(Variable v) {
    vars_.push_back(std::move(v));
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_constraint(Constraint c) {
    rows_.push_back(std::move(c));
    return static_cast<int>(rows_.size()) - 1;
  }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  Variable& variable(int j) { return vars_[j]; }
  const Variable& variable(int j) const { return vars_[j]; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }

  double objective_offset = 0.0;

  std::vector<int> columns_with_role(VarRole role) const {
    std::vector<int> out;
    for (int j = 0; j < num_variables(); ++j)
      if (vars_[j].role == role) out.push_back(j);
    return out;
  }

  int count_role(VarRole role) const { return static_cast<int>(columns_with_role(role).size()); }

  // Throws ParameterError naming the first violated structural invariant.
  // A model without an epigraph column is legal (single-scenario recourse
  // models); `require_epigraph` enforces exactly one.
  void check_invariants(bool require_epigraph) const {
    const int n_eta = count_role(VarRole::Epigraph);
    if (require_epigraph ? n_eta != 1 : n_eta > 1)
      throw ParameterError("model has " + std::to_string(n_eta) + " epigraph variables");
    for (const auto& v : vars_) {
      if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
        throw ParameterError("variable '" + v.name + "' has invalid bounds");
      if (v.role == VarRole::Recourse && v.scenario < 0)
        throw ParameterError("recourse variable '" + v.name + "' has no scenario tag");
    }
    for (const auto& row : rows_) {
      for (const auto& t : row.terms) {
        if (t.var < 0 || t.var >= num_variables())
          throw ParameterError("constraint '" + row.name + "' references undeclared variable " + std::to_string(t.var));
        const auto& v = vars_[t.var];
        if (v.role == VarRole::Recourse && v.scenario != row.scenario)
          throw ParameterError("recourse variable '" + v.name + "' appears in constraint '" + row.name +
                               "' of another scenario block");
      }
    }
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

struct SolveSettings {
  double mip_gap = 1e-4;
  std::optional<double> time_limit;  // seconds; unbounded when empty
  int thread_count = 1;               // concurrent solves issued by the caller
  unsigned random_seed = 0;

  void check() const {
    if (!(mip_gap >= 0.0)) throw ParameterError("mip_gap must be >= 0");
    if (thread_count < 1) throw ParameterError("thread_count must be >= 1");
    if (time_limit && !(*time_limit > 0.0)) throw ParameterError("time_limit must be positive");
  }
};

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit, Error };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Error: return "error";
  }
  return "?";
}

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  std::optional<double> objective;  // present iff an incumbent exists
  std::optional<double> gap;        // relative MIP gap of the incumbent
  std::vector<double> values;       // one per model column, empty without incumbent
  double seconds = 0.0;
  std::string message;

  bool has_solution() const { return objective.has_value(); }

  std::vector<double> values_with_role(const MilpModel& model, VarRole role) const {
    std::vector<double> out;
    for (int j : model.columns_with_role(role)) out.push_back(values.at(j));
    return out;
  }

  // Values of recourse block s (in column order).
  std::vector<double> recourse_values(const MilpModel& model, int scenario) const {
    std::vector<double> out;
    for (int j = 0; j < model.num_variables(); ++j)
      if (model.variable(j).role == VarRole::Recourse && model.variable(j).scenario == scenario) out.push_back(values.at(j));
    return out;
  }
};

// CPLEX LP text format, for debugging.
inline void write_lp(const MilpModel& model, std::ostream& out) {
  auto term = [&](double c, const std::string& name, bool first) {
    if (c < 0) out << (first ? "- " : " - ") << -c << ' ' << name;
    else out << (first ? "" : " + ") << c << ' ' << name;
  };
  out.precision(17);
  out << "Minimize\n obj:";
  bool first = true;
  for (const auto& v : model.variables())
    if (v.objective != 0.0) {
      out << ' ';
      term(v.objective, v.name, first);
      first = false;
    }
  if (first) out << " 0 " << (model.num_variables() ? model.variable(0).name : "x");
  out << "\nSubject To\n";
  for (int r = 0; r < model.num_constraints(); ++r) {
    const auto& row = model.constraints()[r];
    out << ' ' << (row.name.empty() ? "c" + std::to_string(r) : row.name) << ':';
    first = true;
    for (const auto& t : row.terms) {
      out << ' ';
      term(t.coef, model.variable(t.var).name, first);
      first = false;
    }
    if (first) out << " 0 " << (model.num_variables() ? model.variable(0).name : "x");
    out << (row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::Equal ? " = " : " >= ") << row.rhs << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.variables()) {
    if (v.type == VarType::Binary) continue;
    out << ' ';
    if (std::isinf(v.lower)) out << "-inf";
    else out << v.lower;
    out << " <= " << v.name << " <= ";
    if (std::isinf(v.upper)) out << "+inf";
    else out << v.upper;
    out << '\n';
  }
  bool any = false;
  for (const auto& v : model.variables())
    if (v.type == VarType::Binary) {
      if (!any) out << "Binary\n";
      any = true;
      out << ' ' << v.name << '\n';
    }
  any = false;
  for (const auto& v : model.variables())
    if (v.type == VarType::Integer) {
      if (!any) out << "General\n";
      any = true;
      out << ' ' << v.name << '\n';
    }
  out << "End\n";
}

}  // namespace prise
