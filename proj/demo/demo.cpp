// Reduce one SEL instance with every selector and print the regret per budget.

#include <iomanip>
#include <iostream>

#include "prise/bench.hpp"

int main(int argc, char** argv) {
  using namespace prise;
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 42;

  Instance inst = generate_instance(ProblemClass::SEL, 20, std::nullopt, 50, DistributionSpec::uniform(ProblemClass::SEL), seed);
  inst.id = "demo";
  const InstanceProblem problem(inst);
  const SolveSettings settings;

  std::vector<int> all(inst.scenario_count());
  std::iota(all.begin(), all.end(), 0);
  const double v_full = *value_of_set(problem, all, settings).value;
  std::cout << "SEL n=20 S=50 seed=" << seed << "  V(all) = " << v_full << "\n\n";

  PriseOptions po;
  po.budget = 6;
  const PriseTrace trace = prise_select(problem, po, settings, inst.id);
  std::cout << "PRISE order:";
  for (const auto& r : trace.records) std::cout << ' ' << r.chosen << " (+" << r.gain << ')';
  std::cout << "\n\n";

  std::cout << std::left << std::setw(8) << "k" << std::setw(12) << "prise" << std::setw(12) << "maxsum" << std::setw(12)
            << "kmeans" << "random\n";
  for (int k : {1, 2, 4, 6}) {
    auto pct = [&](const std::vector<int>& R) {
      const auto r = regret(problem, R, v_full, settings);
      std::ostringstream os;
      os << std::fixed << std::setprecision(2) << *r.regret_pct << '%';
      return os.str();
    };
    std::cout << std::setw(8) << k << std::setw(12) << pct(trace.prefix(k)) << std::setw(12) << pct(select_maxsum(inst, k))
              << std::setw(12) << pct(select_kmeans(inst, k, seed)) << pct(select_random(inst, k, seed)) << '\n';
  }
}
