#pragma once

// Deterministic-equivalent models: one recourse block per retained scenario
// and an epigraph variable eta bounding every block's recourse cost.
//
//   SEL   min c'x + eta
//         eta >= d^s'y^s,  sum_i (x_i + y^s_i) = floor(n/2),  x_i + y^s_i <= 1
//   VC    min c'x + eta
//         eta >= d^s'y^s,  x_u + y^s_u + x_v + y^s_v >= 1 (uv in E),  y^s_i <= 1 - x_i
//   CFLP  min f'x + a'z + eta
//         eta >= sum_ij c_ij y^s_ij,  z_j <= K_j x_j,
//         sum_i y^s_ij <= z_j,  sum_j y^s_ij >= d^s_i

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "prise/instance.hpp"
#include "prise/milp.hpp"

namespace prise {

// How a fixed first stage is evaluated on CFLP, where capacities z belong to
// the first stage alongside the opening decisions x.
enum class CapacityPolicy {
  Fixed,       // (x, z) fixed; recourse only routes flow within z
  Reoptimize,  // x fixed; z chosen per scenario within z_j <= K_j x_j and charged to the recourse
};

// First-stage decision. `capacity` is only populated for CFLP.
struct FirstStage {
  std::vector<int> open;  // x, 0/1
  std::vector<double> capacity;

  friend bool operator==(const FirstStage&, const FirstStage&) = default;
};

namespace detail {

inline void check_scenario_set(const Instance& inst, std::span<const int> R) {
  if (R.empty()) throw ParameterError("reduced scenario set is empty");
  std::vector<int> seen(R.begin(), R.end());
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw ParameterError("reduced scenario set has duplicates");
  for (int s : R)
    if (s < 0 || s >= inst.scenario_count())
      throw ParameterError("scenario index " + std::to_string(s) + " out of range [0, " + std::to_string(inst.scenario_count()) + ")");
}

inline std::string idx(const char* base, int a) { return std::string(base) + "_" + std::to_string(a); }
inline std::string idx(const char* base, int a, int b) { return idx(base, a) + "_" + std::to_string(b); }
inline std::string idx(const char* base, int a, int b, int c) { return idx(base, a, b) + "_" + std::to_string(c); }

// Adds one recourse block for scenario s. `first` holds the column of x_i
// (SEL/VC) or z_j (CFLP). Returns the recourse cost terms for the epigraph row.
inline std::vector<Term> add_recourse_block(MilpModel& model, const Instance& inst, int s, const std::vector<int>& first) {
  std::vector<Term> cost;
  const auto d = inst.scenarios.row(s);
  if (inst.cls == ProblemClass::CFLP) {
    std::vector<int> y(static_cast<std::size_t>(inst.n) * inst.m);
    for (int i = 0; i < inst.n; ++i)
      for (int j = 0; j < inst.m; ++j) {
        y[static_cast<std::size_t>(i) * inst.m + j] =
            model.add_variable({idx("y", s, i, j), 0.0, kInf, VarType::Continuous, VarRole::Recourse, s, 0.0});
        cost.push_back({y[static_cast<std::size_t>(i) * inst.m + j], inst.transport(i, j)});
      }
    for (int j = 0; j < inst.m; ++j) {
      Constraint cap{idx("cap", s, j), {}, Sense::LessEqual, 0.0, s};
      for (int i = 0; i < inst.n; ++i) cap.terms.push_back({y[static_cast<std::size_t>(i) * inst.m + j], 1.0});
      cap.terms.push_back({first[j], -1.0});
      model.add_constraint(std::move(cap));
    }
    for (int i = 0; i < inst.n; ++i) {
      Constraint dem{idx("dem", s, i), {}, Sense::GreaterEqual, d[i], s};
      for (int j = 0; j < inst.m; ++j) dem.terms.push_back({y[static_cast<std::size_t>(i) * inst.m + j], 1.0});
      model.add_constraint(std::move(dem));
    }
    return cost;
  }

  std::vector<int> y(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    y[i] = model.add_variable({idx("y", s, i), 0.0, 1.0, VarType::Binary, VarRole::Recourse, s, 0.0});
    cost.push_back({y[i], d[i]});
  }
  if (inst.cls == ProblemClass::SEL) {
    Constraint card{idx("card", s), {}, Sense::Equal, static_cast<double>(inst.selection_size()), s};
    for (int i = 0; i < inst.n; ++i) {
      card.terms.push_back({first[i], 1.0});
      card.terms.push_back({y[i], 1.0});
    }
    model.add_constraint(std::move(card));
    for (int i = 0; i < inst.n; ++i)
      model.add_constraint({idx("pair", s, i), {{first[i], 1.0}, {y[i], 1.0}}, Sense::LessEqual, 1.0, s});
  } else {
    for (const auto& e : inst.edges)
      model.add_constraint({idx("cover", s, e.u, e.v),
                            {{first[e.u], 1.0}, {y[e.u], 1.0}, {first[e.v], 1.0}, {y[e.v], 1.0}},
                            Sense::GreaterEqual, 1.0, s});
    for (int i = 0; i < inst.n; ++i)
      model.add_constraint({idx("excl", s, i), {{y[i], 1.0}, {first[i], 1.0}}, Sense::LessEqual, 1.0, s});
  }
  return cost;
}

}  // namespace detail

// Deterministic equivalent restricted to the scenarios in R (column order:
// x, z (CFLP), eta, then one recourse block per element of R in the given order).
inline MilpModel build_reduced_model(const Instance& inst, std::span<const int> R) {
  detail::check_scenario_set(inst, R);
  MilpModel model;
  std::vector<int> x, linked;
  if (inst.cls == ProblemClass::CFLP) {
    for (int j = 0; j < inst.m; ++j)
      x.push_back(model.add_variable({detail::idx("x", j), 0.0, 1.0, VarType::Binary, VarRole::FirstStage, -1, inst.fixed_cost[j]}));
    for (int j = 0; j < inst.m; ++j)
      linked.push_back(model.add_variable({detail::idx("z", j), 0.0, inst.max_capacity[j], VarType::Continuous, VarRole::Capacity, -1,
                                           inst.capacity_cost[j]}));
    for (int j = 0; j < inst.m; ++j)
      model.add_constraint({detail::idx("zcap", j), {{linked[j], 1.0}, {x[j], -inst.max_capacity[j]}}, Sense::LessEqual, 0.0});
  } else {
    for (int i = 0; i < inst.n; ++i)
      x.push_back(model.add_variable({detail::idx("x", i), 0.0, 1.0, VarType::Binary, VarRole::FirstStage, -1, inst.first_stage_cost[i]}));
    linked = x;
  }
  const int eta = model.add_variable({"eta", 0.0, kInf, VarType::Continuous, VarRole::Epigraph, -1, 1.0});
  for (int s : R) {
    auto cost = detail::add_recourse_block(model, inst, s, linked);
    Constraint epi{detail::idx("epi", s), {{eta, 1.0}}, Sense::GreaterEqual, 0.0, s, true};
    for (const auto& t : cost) epi.terms.push_back({t.var, -t.coef});
    model.add_constraint(std::move(epi));
  }
  return model;
}

// Reads the first stage of a solved reduced model.
inline FirstStage extract_first_stage(const Instance& inst, const MilpModel& model, const SolveResult& result) {
  FirstStage fs;
  for (double v : result.values_with_role(model, VarRole::FirstStage)) fs.open.push_back(v > 0.5 ? 1 : 0);
  if (inst.cls == ProblemClass::CFLP) {
    fs.capacity = result.values_with_role(model, VarRole::Capacity);
    for (int j = 0; j < inst.m; ++j) fs.capacity[j] = fs.open[j] ? std::clamp(fs.capacity[j], 0.0, inst.max_capacity[j]) : 0.0;
  }
  return fs;
}

inline void check_first_stage(const Instance& inst, const FirstStage& fs, CapacityPolicy policy = CapacityPolicy::Fixed) {
  if (fs.open.size() != static_cast<std::size_t>(inst.first_stage_size()))
    throw ParameterError("first-stage vector has length " + std::to_string(fs.open.size()) + ", expected " +
                         std::to_string(inst.first_stage_size()));
  for (int v : fs.open)
    if (v != 0 && v != 1) throw ParameterError("first-stage decisions must be 0/1");
  if (inst.cls == ProblemClass::SEL) {
    int picked = 0;
    for (int v : fs.open) picked += v;
    if (picked > inst.selection_size()) throw ParameterError("first stage selects more than floor(n/2) items");
  }
  if (inst.cls == ProblemClass::CFLP && policy == CapacityPolicy::Fixed) {
    if (fs.capacity.size() != static_cast<std::size_t>(inst.m)) throw ParameterError("CFLP first stage needs m capacities");
    for (int j = 0; j < inst.m; ++j)
      if (fs.capacity[j] < -1e-9 || fs.capacity[j] > inst.max_capacity[j] * fs.open[j] + 1e-6)
        throw ParameterError("capacity of facility " + std::to_string(j) + " violates 0 <= z_j <= K_j x_j");
  }
}

// c'x for SEL/VC; f'x + a'z for CFLP (capacity part only under the Fixed policy).
inline double first_stage_cost(const Instance& inst, const FirstStage& fs, CapacityPolicy policy = CapacityPolicy::Fixed) {
  double total = 0.0;
  if (inst.cls == ProblemClass::CFLP) {
    for (int j = 0; j < inst.m; ++j) {
      total += inst.fixed_cost[j] * fs.open[j];
      if (policy == CapacityPolicy::Fixed) total += inst.capacity_cost[j] * fs.capacity[j];
    }
  } else {
    for (int i = 0; i < inst.n; ++i) total += inst.first_stage_cost[i] * fs.open[i];
  }
  return total;
}

// Recourse problem of scenario s under a fixed first stage; its optimum is
// Q(x, xi_s). Under CapacityPolicy::Reoptimize the capacity cost a'z is part
// of the recourse objective.
inline MilpModel build_fixed_x_recourse(const Instance& inst, const FirstStage& fs, int s,
                                        CapacityPolicy policy = CapacityPolicy::Fixed) {
  check_first_stage(inst, fs, policy);
  if (s < 0 || s >= inst.scenario_count()) throw ParameterError("scenario index " + std::to_string(s) + " out of range");
  MilpModel model;
  const auto d = inst.scenarios.row(s);
  using detail::idx;

  if (inst.cls == ProblemClass::SEL) {
    int picked = 0;
    for (int v : fs.open) picked += v;
    Constraint card{idx("card", s), {}, Sense::Equal, static_cast<double>(inst.selection_size() - picked), s};
    for (int i = 0; i < inst.n; ++i) {
      const int y = model.add_variable({idx("y", s, i), 0.0, 1.0 - fs.open[i], VarType::Binary, VarRole::Recourse, s, d[i]});
      card.terms.push_back({y, 1.0});
    }
    model.add_constraint(std::move(card));
    return model;
  }

  if (inst.cls == ProblemClass::VC) {
    std::vector<int> y(inst.n);
    for (int i = 0; i < inst.n; ++i)
      y[i] = model.add_variable({idx("y", s, i), 0.0, 1.0 - fs.open[i], VarType::Binary, VarRole::Recourse, s, d[i]});
    for (const auto& e : inst.edges) {
      const double rhs = 1.0 - fs.open[e.u] - fs.open[e.v];
      if (rhs <= 0.0) continue;
      model.add_constraint({idx("cover", s, e.u, e.v), {{y[e.u], 1.0}, {y[e.v], 1.0}}, Sense::GreaterEqual, rhs, s});
    }
    return model;
  }

  std::vector<int> y(static_cast<std::size_t>(inst.n) * inst.m);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.m; ++j)
      y[static_cast<std::size_t>(i) * inst.m + j] =
          model.add_variable({idx("y", s, i, j), 0.0, kInf, VarType::Continuous, VarRole::Recourse, s, inst.transport(i, j)});
  for (int j = 0; j < inst.m; ++j) {
    Constraint cap{idx("cap", s, j), {}, Sense::LessEqual, 0.0, s};
    for (int i = 0; i < inst.n; ++i) cap.terms.push_back({y[static_cast<std::size_t>(i) * inst.m + j], 1.0});
    if (policy == CapacityPolicy::Fixed) {
      cap.rhs = fs.capacity[j];
    } else {
      const int z = model.add_variable(
          {idx("z", s, j), 0.0, inst.max_capacity[j] * fs.open[j], VarType::Continuous, VarRole::Recourse, s, inst.capacity_cost[j]});
      cap.terms.push_back({z, -1.0});
    }
    model.add_constraint(std::move(cap));
  }
  for (int i = 0; i < inst.n; ++i) {
    Constraint dem{idx("dem", s, i), {}, Sense::GreaterEqual, d[i], s};
    for (int j = 0; j < inst.m; ++j) dem.terms.push_back({y[static_cast<std::size_t>(i) * inst.m + j], 1.0});
    model.add_constraint(std::move(dem));
  }
  return model;
}

}  // namespace prise
