#pragma once

// Two-stage robust instances over a finite scenario set: selection (SEL),
// vertex cover (VC) and capacitated facility location (CFLP), plus the seeded
// generators for every supported scenario distribution.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prise/error.hpp"
#include "prise/rng.hpp"

namespace prise {

enum class ProblemClass { SEL, VC, CFLP };

inline std::string_view to_string(ProblemClass c) {
  switch (c) {
    case ProblemClass::SEL: return "SEL";
    case ProblemClass::VC: return "VC";
    case ProblemClass::CFLP: return "CFLP";
  }
  return "?";
}

inline ProblemClass problem_class_from_string(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) { return std::toupper(ch); });
  if (u == "SEL") return ProblemClass::SEL;
  if (u == "VC") return ProblemClass::VC;
  if (u == "CFLP") return ProblemClass::CFLP;
  throw ParameterError("unknown problem class '" + std::string(s) + "'");
}

// Row-major S x dim matrix. Row s is scenario s; the row index is the
// scenario's identity everywhere else in the library.
class ScenarioSet {
 public:
  ScenarioSet() = default;
  ScenarioSet(int count, int dimension)
      : count_(count), dimension_(dimension),
        data_(static_cast<std::size_t>(count) * static_cast<std::size_t>(dimension), 0.0) {}

  int size() const { return count_; }
  int dimension() const { return dimension_; }

  std::span<const double> row(int s) const {
    return {data_.data() + static_cast<std::size_t>(s) * dimension_, static_cast<std::size_t>(dimension_)};
  }
  std::span<double> row(int s) {
    return {data_.data() + static_cast<std::size_t>(s) * dimension_, static_cast<std::size_t>(dimension_)};
  }
  double operator()(int s, int i) const { return data_[static_cast<std::size_t>(s) * dimension_ + i]; }
  double& operator()(int s, int i) { return data_[static_cast<std::size_t>(s) * dimension_ + i]; }

  double row_sum(int s) const {
    double total = 0.0;
    for (double v : row(s)) total += v;
    return total;
  }

  // First `count` rows.
  ScenarioSet prefix(int count) const {
    ScenarioSet out(count, dimension_);
    std::copy_n(data_.begin(), static_cast<std::size_t>(count) * dimension_, out.data_.begin());
    return out;
  }

  friend bool operator==(const ScenarioSet&, const ScenarioSet&) = default;

 private:
  int count_ = 0;
  int dimension_ = 0;
  std::vector<double> data_;
};

enum class DistributionFamily { Uniform, Normal, Multimodal };

inline std::string_view to_string(DistributionFamily f) {
  switch (f) {
    case DistributionFamily::Uniform: return "uniform";
    case DistributionFamily::Normal: return "normal";
    case DistributionFamily::Multimodal: return "multimodal";
  }
  return "?";
}

inline DistributionFamily distribution_family_from_string(std::string_view s) {
  if (s == "uniform") return DistributionFamily::Uniform;
  if (s == "normal") return DistributionFamily::Normal;
  if (s == "multimodal" || s == "mm") return DistributionFamily::Multimodal;
  throw ParameterError("unknown distribution family '" + std::string(s) + "'");
}

// Scenario distribution. Not every field is used by every family:
//   Uniform     lo/hi (SEL/VC: integers in {lo..hi})
//   Normal      mean_lo/mean_hi, sigma_rel, sigma_lo/sigma_hi, clip
//   Multimodal  modes_lo/modes_hi, mean_lo/mean_hi (mode centers),
//               dev_lo/dev_hi (relative half-widths), scale_sd (CFLP only), clip
struct DistributionSpec {
  DistributionFamily family = DistributionFamily::Uniform;
  double clip_lo = 1.0;
  double clip_hi = 100.0;
  double mean_lo = 25.0;
  double mean_hi = 75.0;
  double sigma_rel = 0.15;
  double sigma_lo = 3.0;
  double sigma_hi = 15.0;
  int modes_lo = 3;
  int modes_hi = 8;
  double dev_lo = 0.1;
  double dev_hi = 0.5;
  double scale_sd = 0.0;

  static DistributionSpec uniform(ProblemClass cls) {
    DistributionSpec d;
    if (cls == ProblemClass::CFLP) {
      d.clip_lo = 10.0;
      d.clip_hi = 500.0;
    }
    return d;
  }

  static DistributionSpec normal(ProblemClass cls) {
    DistributionSpec d = uniform(cls);
    d.family = DistributionFamily::Normal;
    if (cls == ProblemClass::CFLP) {
      d.mean_lo = 180.0;
      d.mean_hi = 260.0;
      d.sigma_rel = 0.08;
      d.sigma_lo = 12.0;
      d.sigma_hi = 22.0;
    }
    return d;
  }

  static DistributionSpec multimodal(ProblemClass cls) {
    DistributionSpec d = uniform(cls);
    d.family = DistributionFamily::Multimodal;
    if (cls == ProblemClass::CFLP) {
      d.modes_lo = 3;
      d.modes_hi = 6;
      d.mean_lo = 80.0;
      d.mean_hi = 380.0;
      d.dev_lo = 0.05;
      d.dev_hi = 0.20;
      d.scale_sd = 0.08;
    }
    return d;
  }

  static DistributionSpec for_family(ProblemClass cls, DistributionFamily family) {
    switch (family) {
      case DistributionFamily::Uniform: return uniform(cls);
      case DistributionFamily::Normal: return normal(cls);
      case DistributionFamily::Multimodal: return multimodal(cls);
    }
    return uniform(cls);
  }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

// Value envelope a class admits for scenario entries.
inline std::pair<double, double> scenario_envelope(ProblemClass cls) {
  return cls == ProblemClass::CFLP ? std::pair{10.0, 500.0} : std::pair{1.0, 100.0};
}

inline void validate(const DistributionSpec& d, ProblemClass cls) {
  const auto [env_lo, env_hi] = scenario_envelope(cls);
  auto fail = [&](const std::string& what) {
    throw ParameterError(std::string(to_string(d.family)) + " distribution for " +
                         std::string(to_string(cls)) + ": " + what);
  };
  if (!(d.clip_lo <= d.clip_hi)) fail("clip_lo > clip_hi");
  if (d.clip_lo < env_lo || d.clip_hi > env_hi)
    fail("clip range [" + std::to_string(d.clip_lo) + ", " + std::to_string(d.clip_hi) +
         "] outside the class envelope [" + std::to_string(env_lo) + ", " + std::to_string(env_hi) + "]");
  if (cls != ProblemClass::CFLP && (std::floor(d.clip_lo) != d.clip_lo || std::floor(d.clip_hi) != d.clip_hi))
    fail("integer-valued classes need integer clip bounds");
  if (d.family == DistributionFamily::Uniform) return;
  if (!(d.mean_lo <= d.mean_hi) || d.mean_lo <= 0.0) fail("invalid mean range");
  if (d.family == DistributionFamily::Normal) {
    if (!(d.sigma_rel > 0.0) || !(0.0 < d.sigma_lo && d.sigma_lo <= d.sigma_hi)) fail("invalid sigma parameters");
    return;
  }
  if (d.modes_lo < 1 || d.modes_lo > d.modes_hi) fail("invalid mode count range");
  if (!(0.0 <= d.dev_lo && d.dev_lo <= d.dev_hi && d.dev_hi < 1.0)) fail("invalid relative deviation range");
  if (d.scale_sd < 0.0) fail("negative scale deviation");
  if (cls != ProblemClass::CFLP && d.scale_sd != 0.0) fail("global scale factor is CFLP-only");
}

struct Edge {
  int u = 0;
  int v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Instance {
  std::string id;
  ProblemClass cls = ProblemClass::SEL;
  int n = 0;  // items (SEL), nodes (VC), customers (CFLP)
  int m = 0;  // facilities, CFLP only

  std::vector<double> first_stage_cost;  // SEL/VC, length n

  // CFLP
  std::vector<double> fixed_cost;      // length m
  std::vector<double> capacity_cost;   // length m, per unit of installed capacity
  std::vector<double> max_capacity;    // length m
  std::vector<double> transport_cost;  // n x m row-major: [i * m + j]

  std::vector<Edge> edges;  // VC, u < v

  ScenarioSet scenarios;
  std::uint64_t seed = 0;
  DistributionSpec dist;

  int scenario_count() const { return scenarios.size(); }
  double transport(int customer, int facility) const {
    return transport_cost[static_cast<std::size_t>(customer) * m + facility];
  }
  // SEL selection size.
  int selection_size() const { return n / 2; }
  // Number of first-stage decisions (x only; CFLP capacities are counted separately).
  int first_stage_size() const { return cls == ProblemClass::CFLP ? m : n; }

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline void validate(const Instance& inst) {
  auto fail = [&](const std::string& what) {
    throw ParameterError("instance '" + inst.id + "': " + what);
  };
  auto check_costs = [&](const std::vector<double>& v, std::size_t len, const char* name) {
    if (v.size() != len) fail(std::string(name) + " has length " + std::to_string(v.size()) + ", expected " + std::to_string(len));
    for (double c : v)
      if (!std::isfinite(c) || c < 0.0) fail(std::string(name) + " contains a negative or non-finite entry");
  };
  if (inst.n < 1) fail("n must be positive");
  if (inst.scenarios.size() < 1) fail("scenario set is empty");
  if (inst.scenarios.dimension() != inst.n) fail("scenario dimension differs from n");
  for (int s = 0; s < inst.scenarios.size(); ++s)
    for (double v : inst.scenarios.row(s))
      if (!std::isfinite(v) || v < 0.0) fail("scenario " + std::to_string(s) + " has a negative or non-finite entry");
  if (inst.cls == ProblemClass::CFLP) {
    if (inst.m < 1) fail("CFLP needs m >= 1");
    const auto m = static_cast<std::size_t>(inst.m);
    check_costs(inst.fixed_cost, m, "fixed_cost");
    check_costs(inst.capacity_cost, m, "capacity_cost");
    check_costs(inst.max_capacity, m, "max_capacity");
    check_costs(inst.transport_cost, m * static_cast<std::size_t>(inst.n), "transport_cost");
    if (!inst.edges.empty()) fail("CFLP instances carry no edges");
  } else {
    if (inst.m != 0) fail("m is only meaningful for CFLP");
    check_costs(inst.first_stage_cost, static_cast<std::size_t>(inst.n), "first_stage_cost");
    if (inst.cls == ProblemClass::SEL && !inst.edges.empty()) fail("SEL instances carry no edges");
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
      const auto& edge = inst.edges[e];
      if (!(0 <= edge.u && edge.u < edge.v && edge.v < inst.n))
        fail("edge (" + std::to_string(edge.u) + "," + std::to_string(edge.v) + ") violates 0 <= u < v < n");
      if (e > 0 && !(inst.edges[e - 1] < edge)) fail("edges must be sorted and unique");
    }
  }
}

namespace detail {

inline double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// SEL/VC costs are integers; rounding happens before clipping so the clip
// bounds (integers) are preserved exactly.
inline double integral_cost(double v, double lo, double hi) { return clip(std::round(v), lo, hi); }

inline void fill_scenarios(ScenarioSet& out, ProblemClass cls, const DistributionSpec& d, std::uint64_t seed) {
  const int S = out.size();
  const int dim = out.dimension();
  const bool integral = cls != ProblemClass::CFLP;
  auto params = RandomStream::derive(seed, "scenario_params");
  auto draws = RandomStream::derive(seed, "scenarios");
  switch (d.family) {
    case DistributionFamily::Uniform:
      for (int s = 0; s < S; ++s)
        for (int i = 0; i < dim; ++i)
          out(s, i) = integral ? static_cast<double>(draws.uniform_int(static_cast<std::int64_t>(d.clip_lo),
                                                                        static_cast<std::int64_t>(d.clip_hi)))
                               : draws.uniform(d.clip_lo, d.clip_hi);
      break;
    case DistributionFamily::Normal: {
      std::vector<double> mean(dim), sd(dim);
      for (int i = 0; i < dim; ++i) {
        mean[i] = params.uniform(d.mean_lo, d.mean_hi);
        sd[i] = clip(d.sigma_rel * mean[i], d.sigma_lo, d.sigma_hi);
      }
      for (int s = 0; s < S; ++s)
        for (int i = 0; i < dim; ++i) {
          const double v = draws.normal(mean[i], sd[i]);
          out(s, i) = integral ? integral_cost(v, d.clip_lo, d.clip_hi) : clip(v, d.clip_lo, d.clip_hi);
        }
      break;
    }
    case DistributionFamily::Multimodal: {
      const int modes = static_cast<int>(params.uniform_int(d.modes_lo, d.modes_hi));
      // SEL/VC: one relative deviation per mode. CFLP: one per mode and customer.
      std::vector<double> center(static_cast<std::size_t>(modes) * dim), dev(static_cast<std::size_t>(modes) * dim);
      for (int k = 0; k < modes; ++k) {
        const double mode_dev = params.uniform(d.dev_lo, d.dev_hi);
        for (int i = 0; i < dim; ++i) {
          center[static_cast<std::size_t>(k) * dim + i] = params.uniform(d.mean_lo, d.mean_hi);
          dev[static_cast<std::size_t>(k) * dim + i] = integral ? mode_dev : params.uniform(d.dev_lo, d.dev_hi);
        }
      }
      for (int s = 0; s < S; ++s) {
        const int k = static_cast<int>(draws.uniform_int(0, modes - 1));
        const double scale = d.scale_sd > 0.0 ? draws.normal(1.0, d.scale_sd) : 1.0;
        for (int i = 0; i < dim; ++i) {
          const double c = center[static_cast<std::size_t>(k) * dim + i];
          const double r = dev[static_cast<std::size_t>(k) * dim + i];
          const double v = draws.uniform((1.0 - r) * c, (1.0 + r) * c) * scale;
          out(s, i) = integral ? integral_cost(v, d.clip_lo, d.clip_hi) : clip(v, d.clip_lo, d.clip_hi);
        }
      }
      break;
    }
  }
}

}  // namespace detail

// Deterministic in all arguments. `m` is ignored (and must be absent/0) for SEL and VC.
inline Instance generate_instance(ProblemClass cls, int n, std::optional<int> m, int S,
                                  const DistributionSpec& dist, std::uint64_t seed) {
  if (n < 2) throw ParameterError("n must be at least 2");
  if (S < 1) throw ParameterError("S must be at least 1");
  if (cls == ProblemClass::CFLP) {
    if (!m || *m < 1) throw ParameterError("CFLP needs m >= 1");
  } else if (m && *m != 0) {
    throw ParameterError("m is only meaningful for CFLP");
  }
  validate(dist, cls);

  Instance inst;
  inst.cls = cls;
  inst.n = n;
  inst.seed = seed;
  inst.dist = dist;

  if (cls == ProblemClass::CFLP) {
    inst.m = *m;
    auto fixed = RandomStream::derive(seed, "fixed_cost");
    auto capc = RandomStream::derive(seed, "capacity_cost");
    auto cap = RandomStream::derive(seed, "max_capacity");
    auto trans = RandomStream::derive(seed, "transport_cost");
    for (int j = 0; j < inst.m; ++j) {
      inst.fixed_cost.push_back(fixed.uniform(100.0, 1000.0));
      inst.capacity_cost.push_back(capc.uniform(10.0, 100.0));
      inst.max_capacity.push_back(cap.uniform(200.0, 700.0));
    }
    inst.transport_cost.resize(static_cast<std::size_t>(n) * inst.m);
    for (double& c : inst.transport_cost) c = trans.uniform(1.0, 1000.0);
  } else {
    auto first = RandomStream::derive(seed, "first_stage_cost");
    for (int i = 0; i < n; ++i) inst.first_stage_cost.push_back(static_cast<double>(first.uniform_int(1, 100)));
    if (cls == ProblemClass::VC) {
      auto edges = RandomStream::derive(seed, "edges");
      const double p = std::min(1.0, 10.0 / n);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (edges.bernoulli(p)) inst.edges.push_back({u, v});
    }
  }

  inst.scenarios = ScenarioSet(S, n);
  detail::fill_scenarios(inst.scenarios, cls, dist, seed);
  inst.id = std::string(to_string(cls)) + "-" + std::to_string(n) + (cls == ProblemClass::CFLP ? "-" + std::to_string(inst.m) : "") +
            "-" + std::to_string(S) + "-" + std::to_string(seed);
  return inst;
}

// Same instance restricted to its first `count` scenarios.
inline Instance truncate_scenarios(const Instance& inst, int count) {
  if (count < 1 || count > inst.scenario_count())
    throw ParameterError("cannot truncate " + std::to_string(inst.scenario_count()) + " scenarios to " + std::to_string(count));
  Instance out = inst;
  out.scenarios = inst.scenarios.prefix(count);
  return out;
}

}  // namespace prise
