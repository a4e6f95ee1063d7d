#include <gtest/gtest.h>

#include <sstream>

#include "prise/formulation.hpp"
#include "prise/problem.hpp"
#include "prise/solver.hpp"

using namespace prise;

namespace {

Instance sel(int n, int S, std::uint64_t seed) {
  return generate_instance(ProblemClass::SEL, n, std::nullopt, S, DistributionSpec::uniform(ProblemClass::SEL), seed);
}

Instance vc(int n, int S, std::uint64_t seed) {
  return generate_instance(ProblemClass::VC, n, std::nullopt, S, DistributionSpec::uniform(ProblemClass::VC), seed);
}

Instance cflp(int n, int m, int S, std::uint64_t seed) {
  return generate_instance(ProblemClass::CFLP, n, m, S, DistributionSpec::uniform(ProblemClass::CFLP), seed);
}

int count_rows(const MilpModel& m, const std::string& prefix) {
  int c = 0;
  for (const auto& r : m.constraints()) c += r.name.rfind(prefix, 0) == 0 ? 1 : 0;
  return c;
}

std::vector<int> iota(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(Model, SelFourItemsOneScenario) {
  const auto inst = sel(4, 3, 1);
  const std::vector<int> R{0};
  const auto m = build_reduced_model(inst, R);
  EXPECT_EQ(m.count_role(VarRole::FirstStage), 4);
  EXPECT_EQ(m.count_role(VarRole::Recourse), 4);
  EXPECT_EQ(m.count_role(VarRole::Epigraph), 1);
  EXPECT_EQ(count_rows(m, "epi"), 1);
  ASSERT_EQ(count_rows(m, "card"), 1);
  EXPECT_EQ(count_rows(m, "pair"), 4);
  EXPECT_EQ(m.num_constraints(), 6);
  for (const auto& r : m.constraints())
    if (r.name.rfind("card", 0) == 0) {
      EXPECT_EQ(r.rhs, 2.0);
    }
  EXPECT_NO_THROW(m.check_invariants(true));
}

TEST(Model, InvalidScenarioSets) {
  const auto inst = sel(4, 3, 1);
  EXPECT_THROW(build_reduced_model(inst, std::vector<int>{}), ParameterError);
  EXPECT_THROW(build_reduced_model(inst, std::vector<int>{3}), ParameterError);
  EXPECT_THROW(build_reduced_model(inst, std::vector<int>{-1}), ParameterError);
  EXPECT_THROW(build_reduced_model(inst, std::vector<int>{1, 1}), ParameterError);
}

TEST(Model, GrowthIsAffineInR) {
  for (const auto& inst : {sel(6, 5, 2), vc(8, 5, 3), cflp(4, 3, 5, 4)}) {
    std::vector<int> vars, rows;
    for (int k = 1; k <= 5; ++k) {
      const auto m = build_reduced_model(inst, iota(k));
      vars.push_back(m.num_variables());
      rows.push_back(m.num_constraints());
      EXPECT_NO_THROW(m.check_invariants(true));
    }
    for (int k = 2; k < 5; ++k) {
      EXPECT_EQ(vars[k] - vars[k - 1], vars[1] - vars[0]) << to_string(inst.cls);
      EXPECT_EQ(rows[k] - rows[k - 1], rows[1] - rows[0]) << to_string(inst.cls);
    }
    const int block_vars = vars[1] - vars[0];
    if (inst.cls == ProblemClass::CFLP) EXPECT_EQ(block_vars, inst.n * inst.m);
    else EXPECT_EQ(block_vars, inst.n);
  }
}

TEST(Model, InvariantsCatchStrayRecourse) {
  MilpModel m;
  const int eta = m.add_variable({"eta", 0, kInf, VarType::Continuous, VarRole::Epigraph, -1, 1});
  const int y = m.add_variable({"y", 0, 1, VarType::Binary, VarRole::Recourse, 0, 0});
  m.add_constraint({"bad", {{y, 1.0}}, Sense::LessEqual, 1.0, 1});
  EXPECT_THROW(m.check_invariants(true), ParameterError);
  MilpModel two;
  two.add_variable({"eta", 0, kInf, VarType::Continuous, VarRole::Epigraph, -1, 1});
  two.add_variable({"eta2", 0, kInf, VarType::Continuous, VarRole::Epigraph, -1, 1});
  EXPECT_THROW(two.check_invariants(true), ParameterError);
  (void)eta;
}

TEST(Solve, CflpDemandAboveCapacityIsInfeasible) {
  Instance inst;
  inst.cls = ProblemClass::CFLP;
  inst.n = 1;
  inst.m = 1;
  inst.fixed_cost = {100};
  inst.capacity_cost = {10};
  inst.max_capacity = {200};
  inst.transport_cost = {5};
  inst.scenarios = ScenarioSet(1, 1);
  inst.scenarios(0, 0) = 300;
  inst.dist = DistributionSpec::uniform(ProblemClass::CFLP);
  const auto r = solve(build_reduced_model(inst, std::vector<int>{0}), SolveSettings{});
  EXPECT_EQ(r.status, SolveStatus::Infeasible);
  EXPECT_FALSE(r.has_solution());
}

TEST(Solve, DecisionTableFullSetIsEight) {
  const DecisionTable t({{9, 1, 5}, {1, 9, 6}, {4, 4, 8}});
  const auto r = solve(t.reduced_model(iota(3)), SolveSettings{});
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(*r.objective, 8.0, 1e-6);
}

TEST(Solve, DeterministicSingleThread) {
  const auto inst = vc(12, 6, 11);
  const auto model = build_reduced_model(inst, iota(4));
  const auto a = solve(model, SolveSettings{});
  const auto b = solve(model, SolveSettings{});
  EXPECT_EQ(a.status, b.status);
  ASSERT_TRUE(a.objective && b.objective);
  EXPECT_NEAR(*a.objective, *b.objective, 1e-6 + 1e-4 * std::abs(*a.objective));
}

TEST(Solve, EmptyModelReturnsOffset) {
  MilpModel m;
  m.objective_offset = 3.5;
  const auto r = solve(m, SolveSettings{});
  EXPECT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_EQ(*r.objective, 3.5);
}

TEST(Solve, SettingsChecked) {
  SolveSettings s;
  s.mip_gap = -1;
  EXPECT_THROW(s.check(), ParameterError);
  s = {};
  s.thread_count = 0;
  EXPECT_THROW(s.check(), ParameterError);
}

TEST(Recourse, SelCardinalityAlreadyMet) {
  auto inst = sel(6, 2, 5);
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 6; ++i) inst.scenarios(s, i) = 1e4;
  FirstStage x{{0, 0, 0, 0, 0, 0}, {}};
  std::vector<int> by_cost = iota(6);
  std::sort(by_cost.begin(), by_cost.end(), [&](int a, int b) { return inst.first_stage_cost[a] < inst.first_stage_cost[b]; });
  for (int i = 0; i < 3; ++i) x.open[by_cost[i]] = 1;
  for (int s = 0; s < 2; ++s) {
    const auto r = solve(build_fixed_x_recourse(inst, x, s), SolveSettings{});
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_NEAR(*r.objective, 0.0, 1e-9);
  }
}

TEST(Recourse, VcAllOnesCostsNothing) {
  const auto inst = vc(10, 3, 6);
  const FirstStage x{std::vector<int>(10, 1), {}};
  for (int s = 0; s < 3; ++s) {
    const auto r = solve(build_fixed_x_recourse(inst, x, s), SolveSettings{});
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    EXPECT_NEAR(*r.objective, 0.0, 1e-9);
  }
}

TEST(Recourse, CflpCapacityBelowDemandIsInfeasible) {
  const auto inst = cflp(4, 3, 2, 8);
  const double demand = inst.scenarios.row_sum(0);
  FirstStage x{{1, 1, 1}, {}};
  for (int j = 0; j < 3; ++j) x.capacity.push_back(std::min(inst.max_capacity[j], demand / 3.0 - 1.0));
  EXPECT_EQ(solve(build_fixed_x_recourse(inst, x, 0), SolveSettings{}).status, SolveStatus::Infeasible);
  FirstStage closed{{0, 0, 0}, {0, 0, 0}};
  EXPECT_EQ(solve(build_fixed_x_recourse(inst, closed, 0), SolveSettings{}).status, SolveStatus::Infeasible);
}

TEST(Recourse, DimensionMismatch) {
  const auto inst = sel(4, 2, 1);
  EXPECT_THROW(build_fixed_x_recourse(inst, FirstStage{{1, 0}, {}}, 0), ParameterError);
  EXPECT_THROW(build_fixed_x_recourse(inst, FirstStage{{1, 0, 0, 0}, {}}, 5), ParameterError);
  EXPECT_THROW(build_fixed_x_recourse(inst, FirstStage{{1, 1, 1, 0}, {}}, 0), ParameterError);
}

// c'x* + max_{s in R} Q(x*, s) reproduces the reduced objective.
TEST(Recourse, RestrictionConsistency) {
  const SolveSettings settings;
  for (const auto& inst : {sel(8, 6, 21), vc(10, 6, 22), cflp(5, 5, 6, 23)}) {
    for (const auto& R : {std::vector<int>{0}, std::vector<int>{1, 3}, std::vector<int>{5, 2, 4}}) {
      const auto model = build_reduced_model(inst, R);
      const auto r = solve(model, settings);
      ASSERT_TRUE(r.has_solution()) << to_string(inst.cls);
      const auto x = extract_first_stage(inst, model, r);
      double worst = -kInf;
      for (int s : R) {
        const auto q = solve(build_fixed_x_recourse(inst, x, s), settings);
        ASSERT_TRUE(q.has_solution());
        worst = std::max(worst, *q.objective);
      }
      const double z = first_stage_cost(inst, x) + worst;
      EXPECT_NEAR(z, *r.objective, 1e-6 + settings.mip_gap * std::abs(*r.objective)) << to_string(inst.cls);
    }
  }
}

TEST(Recourse, ReoptimizedCapacityNeverCostsMore) {
  const auto inst = cflp(5, 5, 4, 31);
  const auto model = build_reduced_model(inst, iota(4));
  const auto r = solve(model, SolveSettings{});
  ASSERT_TRUE(r.has_solution());
  const auto x = extract_first_stage(inst, model, r);
  for (int s = 0; s < 4; ++s) {
    const auto fixed = solve(build_fixed_x_recourse(inst, x, s, CapacityPolicy::Fixed), SolveSettings{});
    const auto reopt = solve(build_fixed_x_recourse(inst, x, s, CapacityPolicy::Reoptimize), SolveSettings{});
    ASSERT_TRUE(fixed.has_solution() && reopt.has_solution());
    const double fixed_total = first_stage_cost(inst, x, CapacityPolicy::Fixed) + *fixed.objective;
    const double reopt_total = first_stage_cost(inst, x, CapacityPolicy::Reoptimize) + *reopt.objective;
    EXPECT_LE(reopt_total, fixed_total + 1e-6 + 1e-4 * fixed_total);
  }
}

TEST(LpDump, WritesSections) {
  const auto inst = sel(4, 2, 1);
  std::ostringstream os;
  write_lp(build_reduced_model(inst, std::vector<int>{0, 1}), os);
  const auto text = os.str();
  for (const char* token : {"Minimize", "Subject To", "Bounds", "Binary", "End", "eta", "card_0"})
    EXPECT_NE(text.find(token), std::string::npos) << token;
}
