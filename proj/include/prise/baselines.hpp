#pragma once

// Problem-agnostic scenario selectors and the ranking adapter.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "prise/error.hpp"
#include "prise/instance.hpp"
#include "prise/instance_io.hpp"
#include "prise/rng.hpp"

namespace prise {

namespace detail {
inline void check_budget(const Instance& inst, int k) {
  if (k < 1 || k > inst.scenario_count())
    throw ParameterError("budget k=" + std::to_string(k) + " must lie in [1, " + std::to_string(inst.scenario_count()) + "]");
}
}  // namespace detail

// Full scenario order; descending score, ties by smallest index.
inline std::vector<int> order_by_score(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

// Uniformly random permutation of the scenarios; its k-prefix is a uniform
// k-subset, and prefixes are nested across budgets.
inline std::vector<int> random_order(int S, std::uint64_t seed) {
  auto rng = RandomStream::derive(seed, "select_random");
  std::vector<int> order(S);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i + 1 < S; ++i) {
    const int j = static_cast<int>(rng.uniform_int(i, S - 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

inline std::vector<int> select_random(const Instance& inst, int k, std::uint64_t seed) {
  detail::check_budget(inst, k);
  auto order = random_order(inst.scenario_count(), seed);
  order.resize(k);
  return order;
}

// Scenarios by descending row sum (total cost, or total demand for CFLP).
inline std::vector<int> maxsum_order(const Instance& inst) {
  std::vector<double> sums(inst.scenario_count());
  for (int s = 0; s < inst.scenario_count(); ++s) sums[s] = inst.scenarios.row_sum(s);
  return order_by_score(sums);
}

inline std::vector<int> select_maxsum(const Instance& inst, int k) {
  detail::check_budget(inst, k);
  auto order = maxsum_order(inst);
  order.resize(k);
  return order;
}

struct KMeansOptions {
  int max_iterations = 100;
  double rel_tolerance = 1e-6;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace detail

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignment;
  double inertia = 0.0;
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding on the scenario rows.
inline KMeansResult kmeans(const ScenarioSet& rows, int k, std::uint64_t seed, const KMeansOptions& options = {}) {
  const int S = rows.size();
  const int dim = rows.dimension();
  auto rng = RandomStream::derive(seed, "kmeans");
  KMeansResult out;

  // k-means++ seeding
  std::vector<double> nearest(S, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.uniform_int(0, S - 1));
  out.centroids.emplace_back(rows.row(first).begin(), rows.row(first).end());
  while (static_cast<int>(out.centroids.size()) < k) {
    double total = 0.0;
    for (int s = 0; s < S; ++s) {
      nearest[s] = std::min(nearest[s], detail::squared_distance(rows.row(s), out.centroids.back()));
      total += nearest[s];
    }
    int pick = -1;
    if (total > 0.0) {
      double target = rng.uniform01() * total;
      for (int s = 0; s < S; ++s) {
        if (nearest[s] <= 0.0) continue;
        pick = s;
        target -= nearest[s];
        if (target < 0.0) break;
      }
    } else {
      pick = static_cast<int>(rng.uniform_int(0, S - 1));  // all points coincide with centroids
    }
    out.centroids.emplace_back(rows.row(pick).begin(), rows.row(pick).end());
  }

  out.assignment.assign(S, 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (out.iterations = 1; out.iterations <= options.max_iterations; ++out.iterations) {
    out.inertia = 0.0;
    for (int s = 0; s < S; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = detail::squared_distance(rows.row(s), out.centroids[c]);
        if (d < best) {
          best = d;
          out.assignment[s] = c;
        }
      }
      out.inertia += best;
    }
    std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
    std::vector<int> members(k, 0);
    for (int s = 0; s < S; ++s) {
      ++members[out.assignment[s]];
      for (int i = 0; i < dim; ++i) sum[out.assignment[s]][i] += rows(s, i);
    }
    for (int c = 0; c < k; ++c) {
      if (members[c] == 0) continue;  // empty cluster keeps its centroid
      for (int i = 0; i < dim; ++i) out.centroids[c][i] = sum[c][i] / members[c];
    }
    const bool converged = std::isfinite(prev_inertia) &&
                           std::abs(prev_inertia - out.inertia) <= options.rel_tolerance * std::max(prev_inertia, 1e-300);
    prev_inertia = out.inertia;
    if (converged) break;
  }
  out.iterations = std::min(out.iterations, options.max_iterations);
  return out;
}

// Nearest original scenario to every centroid; a scenario already taken by
// an earlier centroid is replaced by the next-nearest unused one.
inline std::vector<int> select_kmeans(const Instance& inst, int k, std::uint64_t seed, const KMeansOptions& options = {}) {
  detail::check_budget(inst, k);
  const int S = inst.scenario_count();
  const auto result = kmeans(inst.scenarios, k, seed, options);
  std::vector<char> used(S, 0);
  std::vector<int> out;
  for (const auto& centroid : result.centroids) {
    std::vector<int> order(S);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(S);
    for (int s = 0; s < S; ++s) dist[s] = detail::squared_distance(inst.scenarios.row(s), centroid);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] < dist[b]; });
    for (int s : order)
      if (!used[s]) {
        used[s] = 1;
        out.push_back(s);
        break;
      }
  }
  return out;
}

// Externally produced scenario ordering for one instance.
struct Ranking {
  std::string instance_id;
  std::string method;
  std::string version;
  std::vector<double> scores;     // either scores ...
  std::vector<int> permutation;   // ... or an explicit permutation

  int size() const { return static_cast<int>(scores.empty() ? permutation.size() : scores.size()); }

  void validate() const {
    if (scores.empty() == permutation.empty())
      throw ValidationError("ranking for '" + instance_id + "' must carry exactly one of scores / permutation");
    for (double v : scores)
      if (std::isnan(v)) throw ValidationError("ranking for '" + instance_id + "' has NaN scores");
    if (!permutation.empty()) {
      std::vector<char> seen(permutation.size(), 0);
      for (int s : permutation) {
        if (s < 0 || s >= static_cast<int>(permutation.size()) || seen[s])
          throw ValidationError("ranking for '" + instance_id + "' is not a permutation of 0.." +
                                std::to_string(permutation.size() - 1));
        seen[s] = 1;
      }
    }
  }

  std::vector<int> to_permutation() const {
    validate();
    return permutation.empty() ? order_by_score(scores) : permutation;
  }

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

inline std::vector<int> top_k_from_ranking(const Ranking& rank, int k) {
  auto perm = rank.to_permutation();
  if (k < 1 || k > static_cast<int>(perm.size()))
    throw ParameterError("budget k=" + std::to_string(k) + " exceeds ranking size " + std::to_string(perm.size()));
  perm.resize(k);
  return perm;
}

inline nlohmann::json ranking_to_json(const Ranking& r) {
  nlohmann::json j{{"instance_id", r.instance_id}, {"method", r.method}};
  if (!r.version.empty()) j["version"] = r.version;
  if (!r.scores.empty()) j["scores"] = r.scores;
  else j["permutation"] = r.permutation;
  return j;
}

inline Ranking ranking_from_json(const nlohmann::json& j, const std::string& where) {
  using detail::get_as;
  using detail::require;
  Ranking r;
  r.instance_id = get_as<std::string>(require(j, "instance_id", where), where + ".instance_id");
  r.method = get_as<std::string>(require(j, "method", where), where + ".method");
  if (auto it = j.find("version"); it != j.end()) r.version = get_as<std::string>(*it, where + ".version");
  if (auto it = j.find("scores"); it != j.end()) r.scores = get_as<std::vector<double>>(*it, where + ".scores");
  if (auto it = j.find("permutation"); it != j.end()) r.permutation = get_as<std::vector<int>>(*it, where + ".permutation");
  try {
    r.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return r;
}

inline void write_rankings(const std::vector<Ranking>& rankings, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  for (const auto& r : rankings) out << ranking_to_json(r).dump() << '\n';
}

inline std::vector<Ranking> read_rankings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ranking file '" + path.string() + "'");
  std::vector<Ranking> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    try {
      out.push_back(ranking_from_json(nlohmann::json::parse(line), where));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace prise
