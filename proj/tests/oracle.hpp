#pragma once

// Exhaustive enumeration for tiny SEL and VC instances. Every first stage x
// and every recourse y is tried explicitly, so nothing here shares code with
// the MILP formulations under test.

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "prise/instance.hpp"

namespace oracle {

using prise::Instance;
using prise::ProblemClass;

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

inline bool bit(unsigned mask, int i) { return (mask >> i) & 1u; }

inline bool first_stage_ok(const Instance& inst, unsigned x) {
  if (inst.cls == ProblemClass::SEL) return __builtin_popcount(x) <= inst.selection_size();
  return true;
}

inline double first_stage_cost(const Instance& inst, unsigned x) {
  double c = 0.0;
  for (int i = 0; i < inst.n; ++i)
    if (bit(x, i)) c += inst.first_stage_cost[i];
  return c;
}

// Q(x, xi_s) by enumerating every y in {0,1}^n.
inline double recourse(const Instance& inst, unsigned x, int s) {
  double best = kInfeasible;
  for (unsigned y = 0; y < (1u << inst.n); ++y) {
    if (x & y) continue;  // x_i + y_i <= 1
    bool ok = true;
    if (inst.cls == ProblemClass::SEL) {
      ok = __builtin_popcount(x) + __builtin_popcount(y) == inst.selection_size();
    } else {
      for (const auto& e : inst.edges)
        if (!(bit(x | y, e.u) || bit(x | y, e.v))) {
          ok = false;
          break;
        }
    }
    if (!ok) continue;
    double c = 0.0;
    for (int i = 0; i < inst.n; ++i)
      if (bit(y, i)) c += inst.scenarios(s, i);
    best = std::min(best, c);
  }
  return best;
}

// c'x + max_{s in R} Q(x, s); every scenario when R is empty.
inline double cost(const Instance& inst, unsigned x, std::span<const int> R) {
  double worst = 0.0;
  if (R.empty()) {
    for (int s = 0; s < inst.scenario_count(); ++s) worst = std::max(worst, recourse(inst, x, s));
  } else {
    for (int s : R) worst = std::max(worst, recourse(inst, x, s));
  }
  return first_stage_cost(inst, x) + worst;
}

// V(R) = min_x c'x + max_{s in R} Q(x, s); V({}) = 0.
inline double value(const Instance& inst, std::span<const int> R) {
  if (R.empty()) return 0.0;
  double best = kInfeasible;
  for (unsigned x = 0; x < (1u << inst.n); ++x)
    if (first_stage_ok(inst, x)) best = std::min(best, cost(inst, x, R));
  return best;
}

// Every x attaining V(R).
inline std::vector<unsigned> argmins(const Instance& inst, std::span<const int> R) {
  const double v = value(inst, R);
  std::vector<unsigned> out;
  for (unsigned x = 0; x < (1u << inst.n); ++x)
    if (first_stage_ok(inst, x) && cost(inst, x, R) == v) out.push_back(x);
  return out;
}

inline unsigned to_mask(const std::vector<int>& open) {
  unsigned m = 0;
  for (std::size_t i = 0; i < open.size(); ++i)
    if (open[i]) m |= 1u << i;
  return m;
}

}  // namespace oracle
