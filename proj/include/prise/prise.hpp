#pragma once

// Problem-driven sequential lookahead selection.
//
// Starting from R = {}, every step re-solves the reduced problem on R + {j}
// for each unselected scenario j and appends the scenario with the largest
// value (smallest index among ties). The step's marginal gain is that value
// minus the previous one; the loop stops once the gain is <= eps or |R| = K.
// Gains are not assumed to be monotone.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prise/error.hpp"
#include "prise/evaluator.hpp"
#include "prise/instance_io.hpp"
#include "prise/parallel.hpp"

namespace prise {

struct SupervisionRecord {
  int step = 0;
  std::vector<int> selected_before;  // R_t
  int chosen = -1;
  double gain = 0.0;     // V(R_t + chosen) - V(R_t)
  double value = 0.0;    // V(R_{t+1})
  double seconds = 0.0;  // wall clock of this step
  std::vector<std::optional<double>> candidate_scores;  // per scenario, only when requested
};

enum class StopReason { Budget, GainBelowTolerance, SolverFailure };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Budget: return "budget";
    case StopReason::GainBelowTolerance: return "gain";
    case StopReason::SolverFailure: return "solver_failure";
  }
  return "?";
}

struct PriseTrace {
  std::string instance_id;
  int scenario_count = 0;
  std::vector<SupervisionRecord> records;
  StopReason stop = StopReason::Budget;
  std::string error;  // set when stop == SolverFailure

  int k_hat() const { return static_cast<int>(records.size()); }
  std::vector<int> order() const {
    std::vector<int> out;
    for (const auto& r : records) out.push_back(r.chosen);
    return out;
  }
  std::vector<double> gains() const {
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.gain);
    return out;
  }
  // First k selections (nested by construction).
  std::vector<int> prefix(int k) const {
    auto o = order();
    o.resize(std::min<std::size_t>(o.size(), static_cast<std::size_t>(k)));
    return o;
  }
  // Wall clock spent producing the first k selections.
  double seconds_through(int k) const {
    double t = 0.0;
    for (int i = 0; i < std::min(k, k_hat()); ++i) t += records[i].seconds;
    return t;
  }
  // g_j = gain of the step that selected j, 0 for unselected scenarios.
  std::vector<double> dense_gains() const {
    std::vector<double> g(scenario_count, 0.0);
    for (const auto& r : records) g[r.chosen] = r.gain;
    return g;
  }
};

struct PriseOptions {
  int budget = 1;        // K
  double eps = 0.0;      // gain tolerance
  int threads = 1;       // concurrent candidate solves per step
  bool keep_scores = false;
  double tie_tolerance = 1e-9;  // relative; scores this close count as tied
};

template <RobustProblem P>
PriseTrace prise_select(const P& problem, const PriseOptions& options, const SolveSettings& settings,
                        std::string instance_id = {}) {
  const int S = problem.scenario_count();
  if (options.budget < 1 || options.budget > S)
    throw ParameterError("budget K=" + std::to_string(options.budget) + " must lie in [1, " + std::to_string(S) + "]");
  if (!(options.eps >= 0.0)) throw ParameterError("eps must be >= 0");
  settings.check();

  PriseTrace trace;
  trace.instance_id = std::move(instance_id);
  trace.scenario_count = S;
  std::vector<int> selected;
  std::vector<char> in_set(S, 0);
  double v_prev = 0.0;

  while (static_cast<int>(selected.size()) < options.budget) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> candidates;
    for (int j = 0; j < S; ++j)
      if (!in_set[j]) candidates.push_back(j);

    std::vector<std::optional<double>> score(S);
    std::vector<SolveStatus> status(S, SolveStatus::Optimal);
    parallel_for(candidates.size(), options.threads, [&](std::size_t c) {
      const int j = candidates[c];
      std::vector<int> R = selected;
      R.push_back(j);
      const auto v = value_of_set(problem, R, settings);
      status[j] = v.status;
      score[j] = v.value;
    });

    for (int j : candidates)
      if (!score[j]) {
        trace.stop = StopReason::SolverFailure;
        trace.error = "candidate " + std::to_string(j) + " at step " + std::to_string(selected.size()) +
                      " ended with status " + std::string(to_string(status[j]));
        return trace;
      }

    int best = candidates.front();
    for (int j : candidates) {
      const double tol = options.tie_tolerance * std::max(1.0, std::abs(*score[best]));
      if (*score[j] > *score[best] + tol) best = j;
    }
    const double gain = *score[best] - v_prev;
    if (gain <= options.eps) {
      trace.stop = StopReason::GainBelowTolerance;
      return trace;
    }

    SupervisionRecord rec;
    rec.step = static_cast<int>(selected.size());
    rec.selected_before = selected;
    rec.chosen = best;
    rec.gain = gain;
    rec.value = *score[best];
    if (options.keep_scores) rec.candidate_scores = score;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.records.push_back(std::move(rec));

    selected.push_back(best);
    in_set[best] = 1;
    v_prev = *score[best];
  }
  trace.stop = StopReason::Budget;
  return trace;
}

// Supervision file: JSON lines, one object per instance
//   { instance_id, S, order, gains, g_dense, v_full? , scores? }
struct SupervisionEntry {
  std::string instance_id;
  int S = 0;
  std::vector<int> order;
  std::vector<double> gains;
  std::vector<double> g_dense;
  std::optional<double> v_full;
  std::vector<std::vector<std::optional<double>>> scores;  // per step, optional
};

inline SupervisionEntry to_supervision(const PriseTrace& trace, std::optional<double> v_full = std::nullopt) {
  SupervisionEntry e{trace.instance_id, trace.scenario_count, trace.order(), trace.gains(), trace.dense_gains(), v_full, {}};
  for (const auto& r : trace.records)
    if (!r.candidate_scores.empty()) e.scores.push_back(r.candidate_scores);
  return e;
}

inline nlohmann::json supervision_to_json(const SupervisionEntry& e) {
  nlohmann::json j{{"instance_id", e.instance_id}, {"S", e.S}, {"order", e.order}, {"gains", e.gains}, {"g_dense", e.g_dense}};
  if (e.v_full) j["v_full"] = *e.v_full;
  if (!e.scores.empty()) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& step : e.scores) {
      nlohmann::json row = nlohmann::json::array();
      for (const auto& v : step) row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
      steps.push_back(std::move(row));
    }
    j["scores"] = std::move(steps);
  }
  return j;
}

inline SupervisionEntry supervision_from_json(const nlohmann::json& j, const std::string& where) {
  using detail::get_as;
  using detail::require;
  SupervisionEntry e;
  e.instance_id = get_as<std::string>(require(j, "instance_id", where), where + ".instance_id");
  e.S = get_as<int>(require(j, "S", where), where + ".S");
  e.order = get_as<std::vector<int>>(require(j, "order", where), where + ".order");
  e.gains = get_as<std::vector<double>>(require(j, "gains", where), where + ".gains");
  e.g_dense = get_as<std::vector<double>>(require(j, "g_dense", where), where + ".g_dense");
  if (auto it = j.find("v_full"); it != j.end()) e.v_full = get_as<double>(*it, where + ".v_full");
  if (e.order.size() != e.gains.size()) throw ParseError(where + ": order and gains differ in length");
  if (e.g_dense.size() != static_cast<std::size_t>(e.S)) throw ParseError(where + ": g_dense must have S entries");
  return e;
}

inline void export_supervision(const std::vector<SupervisionEntry>& entries, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  for (const auto& e : entries) out << supervision_to_json(e).dump() << '\n';
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline void export_supervision(const std::vector<PriseTrace>& traces, const std::filesystem::path& path) {
  std::vector<SupervisionEntry> entries;
  for (const auto& t : traces) entries.push_back(to_supervision(t));
  export_supervision(entries, path);
}

inline std::vector<SupervisionEntry> read_supervision(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::vector<SupervisionEntry> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    try {
      out.push_back(supervision_from_json(nlohmann::json::parse(line), where));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace prise
