#include <gtest/gtest.h>

#include "oracle.hpp"
#include "prise/evaluator.hpp"

using namespace prise;

namespace {

const DecisionTable& remark_table() {
  // rows a, b, c; columns s1, s2, s3
  static const DecisionTable t({{9, 1, 5}, {1, 9, 6}, {4, 4, 8}});
  return t;
}

double V(const DecisionTable& t, std::vector<int> R) { return *value_of_set(t, R, SolveSettings{}).value; }

Instance gen(ProblemClass cls, int n, int S, std::uint64_t seed) {
  return generate_instance(cls, n, cls == ProblemClass::CFLP ? std::optional<int>(n) : std::nullopt, S,
                           DistributionSpec::uniform(cls), seed);
}

std::vector<std::vector<int>> all_subsets(int S) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << S); ++mask) {
    std::vector<int> R;
    for (int s = 0; s < S; ++s)
      if ((mask >> s) & 1u) R.push_back(s);
    out.push_back(R);
  }
  return out;
}

}  // namespace

TEST(RemarkTable, SubsetValues) {
  const auto& t = remark_table();
  EXPECT_NEAR(V(t, {0}), 1, 1e-6);
  EXPECT_NEAR(V(t, {1}), 1, 1e-6);
  EXPECT_NEAR(V(t, {2}), 5, 1e-6);
  EXPECT_NEAR(V(t, {0, 1}), 4, 1e-6);
  EXPECT_NEAR(V(t, {0, 2}), 6, 1e-6);
  EXPECT_NEAR(V(t, {1, 2}), 5, 1e-6);
  EXPECT_NEAR(V(t, {0, 1, 2}), 8, 1e-6);
}

TEST(RemarkTable, EmptySetIsZeroWithoutSolve) {
  const auto v = value_of_set(remark_table(), std::vector<int>{}, SolveSettings{});
  EXPECT_EQ(*v.value, 0.0);
  EXPECT_EQ(v.seconds, 0.0);
}

TEST(RemarkTable, FullCostOfA) {
  const auto z = full_cost(remark_table(), 0, SolveSettings{});
  ASSERT_TRUE(z.value);
  EXPECT_NEAR(*z.value, 9, 1e-9);
  EXPECT_EQ(z.worst_scenario, 0);
}

TEST(RemarkTable, Regret) {
  const auto r3 = regret(remark_table(), std::vector<int>{2}, 8.0, SolveSettings{});
  EXPECT_EQ(*r3.reduced.decision, 0);
  EXPECT_NEAR(*r3.regret_pct, 12.5, 1e-6);
  const auto full = regret(remark_table(), std::vector<int>{0, 1, 2}, SolveSettings{});
  EXPECT_NEAR(*full.regret_pct, 0.0, 1e-6);
}

TEST(RemarkTable, CompressionBudget) {
  const std::vector<double> chain{5, 6, 8};
  EXPECT_EQ(compression_budget(8.0, chain), 3);
  const std::vector<std::vector<int>> sets{{2}, {2, 0}, {2, 0, 1}};
  EXPECT_EQ(compression_budget(remark_table(), sets, 8.0, SolveSettings{}), 3);
}

TEST(Compression, FirstPrefixExact) {
  const std::vector<double> chain{10, 10};
  EXPECT_EQ(compression_budget(10.0, chain), 1);
}

TEST(Compression, NotConverged) {
  const std::vector<double> chain{1, 2, 3};
  EXPECT_FALSE(compression_budget(10.0, chain).has_value());
}

TEST(Compression, RejectsNonNested) {
  const std::vector<std::vector<int>> sets{{0}, {1, 2}};
  EXPECT_THROW(compression_budget(remark_table(), sets, 8.0, SolveSettings{}), ParameterError);
}

TEST(Regret, NeedsPositiveReference) { EXPECT_THROW(regret_percent(1.0, 0.0), ParameterError); }

// Solver values against exhaustive enumeration, for every subset R.
TEST(Oracle, SolverMatchesEnumeration) {
  std::uint64_t seed = 1;
  for (auto cls : {ProblemClass::SEL, ProblemClass::VC})
    for (int n : {4, 5, 6})
      for (int rep = 0; rep < 2; ++rep) {
        const auto inst = gen(cls, n, 3 + rep, seed++);
        const InstanceProblem problem(inst);
        for (const auto& R : all_subsets(inst.scenario_count())) {
          const auto v = value_of_set(problem, R, SolveSettings{});
          ASSERT_TRUE(v.value);
          EXPECT_NEAR(*v.value, oracle::value(inst, R), 1e-6) << inst.id << " |R|=" << R.size();
        }
        const auto z = full_cost(problem, FirstStage{std::vector<int>(n, 0), {}}, SolveSettings{});
        EXPECT_NEAR(*z.value, oracle::cost(inst, 0u, {}), 1e-6);
      }
}

TEST(Oracle, FullCostMatchesEnumeration) {
  const auto inst = gen(ProblemClass::VC, 6, 4, 77);
  const InstanceProblem problem(inst);
  for (unsigned x = 0; x < 64; x += 5) {
    FirstStage fs;
    for (int i = 0; i < 6; ++i) fs.open.push_back((x >> i) & 1u);
    EXPECT_NEAR(*full_cost(problem, fs, SolveSettings{}).value, oracle::cost(inst, x, {}), 1e-6);
  }
}

TEST(Oracle, FullOptimumHasZeroRegret) {
  const auto inst = gen(ProblemClass::SEL, 6, 4, 3);
  const InstanceProblem problem(inst);
  const auto r = regret(problem, std::vector<int>{0, 1, 2, 3}, SolveSettings{});
  EXPECT_NEAR(*r.regret_pct, 0.0, 1e-6);
  EXPECT_NEAR(*r.realized.value, oracle::value(inst, std::vector<int>{0, 1, 2, 3}), 1e-6);
}

TEST(Property, MonotoneUnderInclusion) {
  RandomStream rng(5);
  for (auto cls : {ProblemClass::SEL, ProblemClass::VC, ProblemClass::CFLP}) {
    const auto inst = gen(cls, 8, 8, 100 + static_cast<int>(cls));
    const InstanceProblem problem(inst);
    for (int pair = 0; pair < 12; ++pair) {
      std::vector<int> big, small;
      for (int s = 0; s < 8; ++s)
        if (rng.bernoulli(0.6)) big.push_back(s);
      if (big.empty()) big.push_back(0);
      for (int s : big)
        if (rng.bernoulli(0.5)) small.push_back(s);
      const SolveSettings settings;
      const double vs = *value_of_set(problem, small, settings).value;
      const double vb = *value_of_set(problem, big, settings).value;
      EXPECT_LE(vs, vb + comparison_slack(vb, settings)) << to_string(cls);
    }
  }
}

TEST(Property, CostScalingPreservesArgmin) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto inst = gen(ProblemClass::SEL, 6, 3, 40 + seed);
    auto scaled = inst;
    for (auto& c : scaled.first_stage_cost) c *= 3;
    for (int s = 0; s < 3; ++s)
      for (auto& v : scaled.scenarios.row(s)) v *= 3;
    const std::vector<int> R{0, 2};
    EXPECT_EQ(oracle::argmins(inst, R), oracle::argmins(scaled, R));
    const double v = *value_of_set(InstanceProblem(inst), R, SolveSettings{}).value;
    const double vs = *value_of_set(InstanceProblem(scaled), R, SolveSettings{}).value;
    EXPECT_NEAR(vs, 3 * v, 1e-6);
    const auto x = *value_of_set(InstanceProblem(scaled), R, SolveSettings{}).decision;
    const auto opt = oracle::argmins(inst, R);
    EXPECT_NE(std::find(opt.begin(), opt.end(), oracle::to_mask(x.open)), opt.end());
  }
}

TEST(Cflp, KEqualsSIsFeasible) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto inst = gen(ProblemClass::CFLP, 5, 6, seed);
    const InstanceProblem problem(inst);
    const auto r = regret(problem, std::vector<int>{0, 1, 2, 3, 4, 5}, SolveSettings{});
    EXPECT_FALSE(r.infeasible);
    EXPECT_GE(*r.regret_pct, -0.05);
  }
}

TEST(Cflp, DominantScenarioKeepsRecourseFeasible) {
  auto inst = gen(ProblemClass::CFLP, 4, 5, 9);
  for (int i = 0; i < 4; ++i)
    for (int s = 0; s < 5; ++s) inst.scenarios(3, i) = std::max(inst.scenarios(3, i), inst.scenarios(s, i));
  const InstanceProblem problem(inst);
  const auto r = regret(problem, std::vector<int>{3}, SolveSettings{});
  EXPECT_FALSE(r.infeasible);
  EXPECT_TRUE(r.regret_pct.has_value());
}

TEST(FeasibilityRate, CountsAndRejectsOtherClasses) {
  std::vector<EvalReport> rows(4);
  for (int i = 0; i < 4; ++i) {
    rows[i].cls = ProblemClass::CFLP;
    rows[i].method = "random";
    rows[i].k = 1;
    rows[i].infeasible = i < 3;
  }
  EXPECT_DOUBLE_EQ(feasibility_rate(rows, "random", 1), 75.0);
  EXPECT_THROW(feasibility_rate(rows, "random", 2), ParameterError);
  rows[0].cls = ProblemClass::SEL;
  EXPECT_THROW(feasibility_rate(rows, "random", 1), ParameterError);
}

TEST(FullCost, ParallelMatchesSerial) {
  const auto inst = gen(ProblemClass::SEL, 10, 12, 8);
  const InstanceProblem problem(inst);
  const FirstStage x{{1, 0, 1, 0, 0, 0, 0, 0, 0, 0}, {}};
  const auto a = full_cost(problem, x, SolveSettings{}, 1);
  const auto b = full_cost(problem, x, SolveSettings{}, 4);
  EXPECT_EQ(*a.value, *b.value);
  EXPECT_EQ(a.worst_scenario, b.worst_scenario);
}
