#pragma once

// Benchmark orchestration behind the command-line verbs: dataset generation,
// method runs across budgets, gap sweeps, scenario-count scaling and
// supervision export. Every verb is a plain function so it can be driven
// from tests without going through the CLI.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "prise/baselines.hpp"
#include "prise/evaluator.hpp"
#include "prise/instance_io.hpp"
#include "prise/prise.hpp"

namespace prise {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- generate

struct GenerateConfig {
  ProblemClass cls = ProblemClass::SEL;
  int n = 20;
  std::optional<int> m;
  int S = 50;
  int count = 1;
  DistributionFamily family = DistributionFamily::Uniform;
  std::uint64_t seed = 0;
  fs::path out;
  bool force = false;
};

inline std::uint64_t instance_seed(std::uint64_t dataset_seed, int index) {
  return splitmix64(dataset_seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
}

inline std::vector<Instance> generate_dataset(const GenerateConfig& cfg) {
  if (cfg.count < 1) throw ParameterError("count must be positive");
  const auto dist = DistributionSpec::for_family(cfg.cls, cfg.family);
  std::vector<Instance> out;
  for (int i = 0; i < cfg.count; ++i) {
    Instance inst = generate_instance(cfg.cls, cfg.n, cfg.m, cfg.S, dist, instance_seed(cfg.seed, i));
    std::ostringstream id;
    id << to_string(cfg.cls) << '-' << cfg.n;
    if (cfg.cls == ProblemClass::CFLP) id << '-' << *cfg.m;
    id << '-' << cfg.S << '-' << std::setw(4) << std::setfill('0') << i;
    inst.id = id.str();
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<ManifestEntry> cmd_generate(const GenerateConfig& cfg) {
  if (cfg.out.empty()) throw ParameterError("output directory required");
  if (fs::exists(cfg.out) && !fs::is_empty(cfg.out) && !cfg.force)
    throw ParameterError("output directory '" + cfg.out.string() + "' is not empty (use --force)");
  const auto instances = generate_dataset(cfg);
  fs::create_directories(cfg.out);
  const auto splits = assign_splits(cfg.count);
  std::vector<ManifestEntry> manifest;
  for (int i = 0; i < cfg.count; ++i) {
    const std::string file = instances[i].id + ".json";
    write_instance(instances[i], cfg.out / file);
    manifest.push_back({instances[i].id, file, splits[i]});
  }
  write_manifest(manifest, cfg.out);
  return manifest;
}

struct Dataset {
  fs::path dir;
  std::vector<ManifestEntry> entries;
};

inline Dataset open_dataset(const fs::path& dir, std::optional<Split> split = std::nullopt) {
  if (!fs::is_directory(dir)) throw ParameterError("dataset directory '" + dir.string() + "' does not exist");
  Dataset d{dir, read_manifest(dir)};
  if (split) std::erase_if(d.entries, [&](const ManifestEntry& e) { return e.split != *split; });
  return d;
}

inline std::vector<Instance> load_instances(const Dataset& d) {
  std::vector<Instance> out;
  for (const auto& e : d.entries) {
    Instance inst = read_instance(d.dir / e.file);
    inst.id = e.id;
    out.push_back(std::move(inst));
  }
  return out;
}

// ---------------------------------------------------------------- methods

enum class MethodKind { Exact, Prise, Random, KMeans, MaxSum, Ranking };

struct Method {
  MethodKind kind = MethodKind::Exact;
  std::string name;
  fs::path ranking_file;  // MethodKind::Ranking
};

inline Method parse_method(const std::string& spec) {
  if (spec == "exact") return {MethodKind::Exact, spec, {}};
  if (spec == "prise") return {MethodKind::Prise, spec, {}};
  if (spec == "random") return {MethodKind::Random, spec, {}};
  if (spec == "kmeans") return {MethodKind::KMeans, spec, {}};
  if (spec == "maxsum") return {MethodKind::MaxSum, spec, {}};
  if (spec.rfind("ranking:", 0) == 0 && spec.size() > 8) {
    const fs::path file = spec.substr(8);
    return {MethodKind::Ranking, "ranking:" + file.stem().string(), file};
  }
  throw ParameterError("unknown method '" + spec + "' (expected exact, prise, random, kmeans, maxsum or ranking:<file>)");
}

struct RunOptions {
  std::vector<Method> methods;
  std::vector<int> budgets{1, 2, 4, 6};
  SolveSettings settings;
  std::uint64_t seed = 0;
  double eps = 0.0;  // PRISE gain tolerance
  CapacityPolicy policy = CapacityPolicy::Fixed;
  int threads = 1;  // instance-level workers
};

// Rankings keyed by method name, then instance id.
using RankingTable = std::map<std::string, std::map<std::string, Ranking>>;

inline RankingTable load_rankings(const std::vector<Method>& methods, const std::vector<Instance>& instances) {
  RankingTable table;
  for (const auto& m : methods) {
    if (m.kind != MethodKind::Ranking) continue;
    if (!fs::exists(m.ranking_file)) throw ParameterError("ranking file '" + m.ranking_file.string() + "' does not exist");
    auto& slot = table[m.name];
    for (auto& r : read_rankings(m.ranking_file)) slot[r.instance_id] = std::move(r);
    std::vector<std::string> missing;
    for (const auto& inst : instances) {
      auto it = slot.find(inst.id);
      if (it == slot.end()) {
        missing.push_back(inst.id);
        continue;
      }
      if (it->second.size() != inst.scenario_count())
        throw ValidationError("ranking for '" + inst.id + "' in " + m.ranking_file.string() + " covers " +
                              std::to_string(it->second.size()) + " scenarios, instance has " + std::to_string(inst.scenario_count()));
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
      throw ValidationError(m.ranking_file.string() + " has no ranking for instance(s): " + list);
    }
  }
  return table;
}

inline void check_budgets(const std::vector<int>& budgets, int S) {
  if (budgets.empty()) throw ParameterError("at least one budget required");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1 || budgets[i] > S)
      throw ParameterError("budget " + std::to_string(budgets[i]) + " outside [1, " + std::to_string(S) + "]");
    if (i > 0 && budgets[i] <= budgets[i - 1]) throw ParameterError("budgets must be strictly ascending");
  }
}

// Reduced sets of one method for every budget, with the selection time
// attributed to each budget.
struct Selection {
  std::vector<std::vector<int>> sets;
  std::vector<double> seconds;
  std::optional<PriseTrace> trace;
  std::string error;
};

inline Selection select_for_budgets(const Instance& inst, const Method& method, const std::vector<int>& budgets,
                                    const RunOptions& opt, const RankingTable& rankings) {
  Selection sel;
  const InstanceProblem problem(inst, opt.policy);
  auto timed = [](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = fn();
    return std::pair{std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
  };
  const std::uint64_t seed = opt.seed ^ inst.seed;
  switch (method.kind) {
    case MethodKind::Exact: break;
    case MethodKind::Prise: {
      PriseOptions po;
      po.budget = budgets.back();
      po.eps = opt.eps;
      sel.trace = prise_select(problem, po, opt.settings, inst.id);
      if (sel.trace->stop == StopReason::SolverFailure) sel.error = sel.trace->error;
      for (int k : budgets) {
        sel.sets.push_back(sel.trace->prefix(k));
        sel.seconds.push_back(sel.trace->seconds_through(k));
      }
      break;
    }
    case MethodKind::Random: {
      auto [order, t] = timed([&] { return random_order(inst.scenario_count(), seed); });
      for (int k : budgets) {
        sel.sets.emplace_back(order.begin(), order.begin() + k);
        sel.seconds.push_back(t);
      }
      break;
    }
    case MethodKind::MaxSum: {
      auto [order, t] = timed([&] { return maxsum_order(inst); });
      for (int k : budgets) {
        sel.sets.emplace_back(order.begin(), order.begin() + k);
        sel.seconds.push_back(t);
      }
      break;
    }
    case MethodKind::KMeans:
      for (int k : budgets) {
        auto [set, t] = timed([&] { return select_kmeans(inst, k, seed); });
        sel.sets.push_back(std::move(set));
        sel.seconds.push_back(t);
      }
      break;
    case MethodKind::Ranking: {
      const Ranking& r = rankings.at(method.name).at(inst.id);
      auto [perm, t] = timed([&] { return r.to_permutation(); });
      for (int k : budgets) {
        sel.sets.emplace_back(perm.begin(), perm.begin() + k);
        sel.seconds.push_back(t);
      }
      break;
    }
  }
  return sel;
}

inline EvalReport make_report(const Instance& inst, const std::string& method, std::optional<int> k, double v_full,
                              const SolveSettings& settings) {
  EvalReport row;
  row.instance_id = inst.id;
  row.cls = inst.cls;
  row.method = method;
  row.k = k;
  row.v_full = v_full;
  row.mip_gap = settings.mip_gap;
  row.threads = settings.thread_count;
  return row;
}

// Fills the evaluation part of a report from a regret computation.
inline void fill_report(EvalReport& row, const RegretResult<FirstStage>& r) {
  row.v_reduced = r.reduced.value;
  row.t_solve_s = r.reduced.seconds;
  row.infeasible = r.infeasible;
  row.regret_pct = r.regret_pct;
  if (r.realized.value) row.z_realized = r.realized.value;
  if (!r.reduced.decision) row.status = "reduced_" + std::string(to_string(r.reduced.status));
  else if (r.infeasible) row.status = "infeasible_recourse";
  else if (r.realized.error) row.status = "recourse_error";
  else row.status = std::string(to_string(r.reduced.status));
}

struct FullSolve {
  SetValue<FirstStage> value;
  double seconds = 0.0;
};

inline FullSolve solve_full(const Instance& inst, const SolveSettings& settings, CapacityPolicy policy) {
  std::vector<int> all(inst.scenario_count());
  std::iota(all.begin(), all.end(), 0);
  FullSolve out;
  out.value = value_of_set(InstanceProblem(inst, policy), all, settings);
  out.seconds = out.value.seconds;
  if (!out.value.value)
    throw EnvironmentError("full-scenario problem of '" + inst.id + "' ended with status " + std::string(to_string(out.value.status)));
  return out;
}

// All rows of one instance. `skip` holds report keys that are already done.
inline std::vector<EvalReport> evaluate_instance(const Instance& inst, const RunOptions& opt, const RankingTable& rankings,
                                                 const std::set<std::string>& skip = {}) {
  check_budgets(opt.budgets, inst.scenario_count());
  const InstanceProblem problem(inst, opt.policy);
  std::vector<EvalReport> rows;
  auto done = [&](const std::string& method, std::optional<int> k) {
    return skip.contains(make_report(inst, method, k, 0.0, opt.settings).key());
  };

  bool pending = false;
  for (const auto& m : opt.methods) {
    if (m.kind == MethodKind::Exact) pending |= !done(m.name, std::nullopt);
    else
      for (int k : opt.budgets) pending |= !done(m.name, k);
  }
  if (!pending) return rows;

  const FullSolve full = solve_full(inst, opt.settings, opt.policy);
  const double v_full = *full.value.value;

  for (const auto& m : opt.methods) {
    if (m.kind == MethodKind::Exact) {
      if (done(m.name, std::nullopt)) continue;
      EvalReport row = make_report(inst, m.name, std::nullopt, v_full, opt.settings);
      const FullCost z = full_cost(problem, *full.value.decision, opt.settings);
      row.v_reduced = v_full;
      row.t_solve_s = full.seconds;
      row.z_realized = z.value;
      row.infeasible = !z.feasible;
      if (z.value) row.regret_pct = regret_percent(*z.value, v_full);
      row.status = z.value ? std::string(to_string(full.value.status)) : "recourse_error";
      rows.push_back(row);
      continue;
    }
    bool any = false;
    for (int k : opt.budgets) any |= !done(m.name, k);
    if (!any) continue;
    const Selection sel = select_for_budgets(inst, m, opt.budgets, opt, rankings);
    const bool nested = is_nested_chain(sel.sets) || m.kind == MethodKind::Prise;
    std::optional<double> v_prev;
    for (std::size_t b = 0; b < opt.budgets.size(); ++b) {
      const int k = opt.budgets[b];
      if (done(m.name, k)) continue;
      EvalReport row = make_report(inst, m.name, k, v_full, opt.settings);
      row.t_select_s = sel.seconds[b];
      if (!sel.error.empty() && static_cast<int>(sel.sets[b].size()) < k) {
        row.status = "selection_failed";
        rows.push_back(row);
        continue;
      }
      const auto r = regret(problem, sel.sets[b], v_full, opt.settings);
      fill_report(row, r);
      // V is non-decreasing along a nested chain.
      if (nested && v_prev && r.reduced.value && *r.reduced.value < *v_prev - comparison_slack(*v_prev, opt.settings))
        row.status = "v_decrease";
      if (r.reduced.value) v_prev = r.reduced.value;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------- reports

inline const char* kReportHeader =
    "instance_id,class,method,k,regret_pct,infeasible,v_full,v_reduced,z_realized,t_select_s,t_solve_s,status,mip_gap,threads";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace detail

inline std::string to_csv(const EvalReport& r) {
  std::ostringstream os;
  os << r.instance_id << ',' << to_string(r.cls) << ',' << r.method << ',' << (r.k ? std::to_string(*r.k) : "-") << ','
     << detail::fmt_opt(r.regret_pct) << ',' << (r.infeasible ? 1 : 0) << ',' << detail::fmt_double(r.v_full) << ','
     << detail::fmt_opt(r.v_reduced) << ',' << detail::fmt_opt(r.z_realized) << ',' << detail::fmt_double(r.t_select_s) << ','
     << detail::fmt_double(r.t_solve_s) << ',' << r.status << ',' << detail::fmt_double(r.mip_gap) << ',' << r.threads;
  return os.str();
}

inline EvalReport report_from_csv(const std::string& line) {
  const auto f = detail::split_csv(line);
  if (f.size() != 14) throw ParseError("report row has " + std::to_string(f.size()) + " fields, expected 14: " + line);
  EvalReport r;
  try {
    r.instance_id = f[0];
    r.cls = problem_class_from_string(f[1]);
    r.method = f[2];
    if (f[3] != "-") r.k = std::stoi(f[3]);
    r.regret_pct = detail::parse_opt(f[4]);
    r.infeasible = f[5] == "1";
    r.v_full = std::stod(f[6]);
    r.v_reduced = detail::parse_opt(f[7]);
    r.z_realized = detail::parse_opt(f[8]);
    r.t_select_s = std::stod(f[9]);
    r.t_solve_s = std::stod(f[10]);
    r.status = f[11];
    r.mip_gap = std::stod(f[12]);
    r.threads = std::stoi(f[13]);
  } catch (const std::logic_error& e) {
    throw ParseError("malformed report row '" + line + "': " + e.what());
  }
  return r;
}

inline std::vector<EvalReport> read_reports(const fs::path& path) {
  std::vector<EvalReport> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  if (!std::getline(in, line)) return out;
  if (detail::split_csv(line) != detail::split_csv(kReportHeader)) throw ParseError(path.string() + ": unexpected report header");
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(report_from_csv(line));
  return out;
}

// Serialized sink for report rows. Existing rows are kept; rows whose key is
// rewritten replace the old ones when `force` is set.
class ReportWriter {
 public:
  ReportWriter(fs::path path, bool force) : path_(std::move(path)) {
    existing_ = read_reports(path_);
    if (force) {
      force_ = true;
    } else {
      for (const auto& r : existing_) done_.insert(r.key());
    }
  }

  const std::set<std::string>& completed() const { return done_; }

  void append(const std::vector<EvalReport>& rows) {
    std::lock_guard lock(mutex_);
    if (force_) {
      std::set<std::string> replaced;
      for (const auto& r : rows) replaced.insert(r.key());
      std::erase_if(existing_, [&](const EvalReport& r) { return replaced.contains(r.key()); });
      existing_.insert(existing_.end(), rows.begin(), rows.end());
      rewrite();
      return;
    }
    const bool fresh = !fs::exists(path_) || fs::file_size(path_) == 0;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to '" + path_.string() + "'");
    if (fresh) out << kReportHeader << '\n';
    for (const auto& r : rows) {
      out << to_csv(r) << '\n';
      done_.insert(r.key());
      existing_.push_back(r);
    }
  }

  const std::vector<EvalReport>& rows() const { return existing_; }

 private:
  void rewrite() {
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path_.string() + "'");
    out << kReportHeader << '\n';
    for (const auto& r : existing_) out << to_csv(r) << '\n';
  }

  fs::path path_;
  bool force_ = false;
  std::vector<EvalReport> existing_;
  std::set<std::string> done_;
  std::mutex mutex_;
};

struct SummaryRow {
  std::string method;
  std::optional<int> k;
  double mip_gap = 0.0;
  int count = 0;
  int with_regret = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;  // sample standard deviation
  double total_time = 0.0;  // selection + reduced solve
  double total_solve_time = 0.0;
  std::optional<double> infeasible_pct;  // CFLP only
};

// Mean regret and total time per (method, k, gap), in first-appearance order.
inline std::vector<SummaryRow> summarize(std::span<const EvalReport> rows) {
  std::vector<SummaryRow> out;
  std::map<std::string, std::size_t> index;
  std::vector<int> infeasible_count, cflp_count;
  std::vector<std::vector<double>> regrets;
  for (const auto& r : rows) {
    const std::string key = r.method + "|" + (r.k ? std::to_string(*r.k) : "-") + "|" + detail::fmt_double(r.mip_gap);
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      SummaryRow row;
      row.method = r.method;
      row.k = r.k;
      row.mip_gap = r.mip_gap;
      out.push_back(row);
      infeasible_count.push_back(0);
      cflp_count.push_back(0);
      regrets.emplace_back();
    }
    auto& s = out[it->second];
    ++s.count;
    s.total_time += r.t_select_s + r.t_solve_s;
    s.total_solve_time += r.t_solve_s;
    if (r.regret_pct) regrets[it->second].push_back(*r.regret_pct);
    if (r.cls == ProblemClass::CFLP) {
      ++cflp_count[it->second];
      infeasible_count[it->second] += r.infeasible ? 1 : 0;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = regrets[i];
    out[i].with_regret = static_cast<int>(v.size());
    if (!v.empty()) out[i].mean_regret = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - out[i].mean_regret) * (x - out[i].mean_regret);
      out[i].std_regret = std::sqrt(ss / (v.size() - 1));
    }
    if (cflp_count[i]) out[i].infeasible_pct = 100.0 * infeasible_count[i] / cflp_count[i];
  }
  return out;
}

inline const SummaryRow* find_summary(const std::vector<SummaryRow>& rows, const std::string& method, std::optional<int> k) {
  for (const auto& r : rows)
    if (r.method == method && r.k == k) return &r;
  return nullptr;
}

inline void print_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << std::left << std::setw(24) << "method" << std::setw(6) << "k" << std::setw(10) << "gap" << std::right << std::setw(7)
     << "n" << std::setw(12) << "regret%" << std::setw(10) << "std" << std::setw(12) << "time(s)" << std::setw(10) << "infeas%" << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(24) << r.method << std::setw(6) << (r.k ? std::to_string(*r.k) : "-") << std::setw(10)
       << r.mip_gap << std::right << std::setw(7) << r.count << std::setw(12) << std::fixed << std::setprecision(2)
       << (r.with_regret ? r.mean_regret : std::numeric_limits<double>::quiet_NaN()) << std::setw(10) << r.std_regret
       << std::setw(12) << r.total_time
       << std::setw(10);
    if (r.infeasible_pct) os << *r.infeasible_pct;
    else os << "";
    os << std::defaultfloat << std::setprecision(6) << '\n';
  }
}

// ---------------------------------------------------------------- run

struct RunResult {
  std::vector<EvalReport> rows;  // rows produced by this invocation
  std::vector<SummaryRow> summary;  // over every row in the report file
};

inline RunResult evaluate_instances(const std::vector<Instance>& instances, const RunOptions& opt, ReportWriter* writer) {
  opt.settings.check();
  const RankingTable rankings = load_rankings(opt.methods, instances);
  RunResult result;
  std::mutex mutex;
  const std::set<std::string> skip = writer ? writer->completed() : std::set<std::string>{};
  std::vector<std::vector<EvalReport>> per_instance(instances.size());
  parallel_for(instances.size(), opt.threads, [&](std::size_t i) {
    per_instance[i] = evaluate_instance(instances[i], opt, rankings, skip);
    if (writer) writer->append(per_instance[i]);
  });
  for (auto& rows : per_instance) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  result.summary = summarize(writer ? std::span<const EvalReport>(writer->rows()) : std::span<const EvalReport>(result.rows));
  return result;
}

struct RunConfig {
  fs::path dataset;
  std::optional<Split> split;
  RunOptions options;
  fs::path out;  // CSV report
  bool force = false;
};

inline RunResult cmd_run(const RunConfig& cfg) {
  const auto instances = load_instances(open_dataset(cfg.dataset, cfg.split));
  if (instances.empty()) throw ParameterError("dataset selection is empty");
  if (cfg.out.empty()) return evaluate_instances(instances, cfg.options, nullptr);
  ReportWriter writer(cfg.out, cfg.force);
  return evaluate_instances(instances, cfg.options, &writer);
}

// ---------------------------------------------------------------- gap sweep

// Selections are made once at the base settings; only the reduced solve is
// repeated under each gap. V(Xi) and Z(x) always use the base settings.
inline std::vector<EvalReport> tolerance_sweep(const std::vector<Instance>& instances, const RunOptions& opt,
                                               const std::vector<double>& gaps) {
  for (double g : gaps)
    if (!(g >= 0.0 && g < 1.0)) throw ParameterError("gaps must lie in [0, 1)");
  const RankingTable rankings = load_rankings(opt.methods, instances);
  std::vector<std::vector<EvalReport>> per_instance(instances.size());
  parallel_for(instances.size(), opt.threads, [&](std::size_t i) {
    const Instance& inst = instances[i];
    check_budgets(opt.budgets, inst.scenario_count());
    const InstanceProblem problem(inst, opt.policy);
    const double v_full = *solve_full(inst, opt.settings, opt.policy).value.value;
    for (const auto& m : opt.methods) {
      if (m.kind == MethodKind::Exact) continue;
      const Selection sel = select_for_budgets(inst, m, opt.budgets, opt, rankings);
      for (double gap : gaps) {
        SolveSettings at_gap = opt.settings;
        at_gap.mip_gap = gap;
        for (std::size_t b = 0; b < opt.budgets.size(); ++b) {
          EvalReport row = make_report(inst, m.name, opt.budgets[b], v_full, at_gap);
          row.t_select_s = sel.seconds[b];
          RegretResult<FirstStage> r;
          r.v_full = v_full;
          r.reduced = value_of_set(problem, sel.sets[b], at_gap);
          if (r.reduced.decision) {
            r.realized = full_cost(problem, *r.reduced.decision, opt.settings);
            r.infeasible = !r.realized.feasible;
            if (r.realized.value) r.regret_pct = regret_percent(*r.realized.value, v_full);
          }
          fill_report(row, r);
          per_instance[i].push_back(row);
        }
      }
    }
  });
  std::vector<EvalReport> rows;
  for (auto& r : per_instance) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

struct SweepConfig {
  RunConfig run;
  std::vector<double> gaps;
};

inline RunResult cmd_tolerance_sweep(const SweepConfig& cfg) {
  const auto instances = load_instances(open_dataset(cfg.run.dataset, cfg.run.split));
  if (instances.empty()) throw ParameterError("dataset selection is empty");
  RunResult result;
  result.rows = tolerance_sweep(instances, cfg.run.options, cfg.gaps);
  if (!cfg.run.out.empty()) {
    ReportWriter writer(cfg.run.out, true);
    writer.append(result.rows);
  }
  result.summary = summarize(result.rows);
  return result;
}

// ---------------------------------------------------------------- scenario scaling

struct ScalingRow {
  std::string instance_id;
  std::string method;
  int S = 0;
  int k = 0;
  double t_select_s = 0.0;
  double t_solve_s = 0.0;
  std::optional<double> v_reduced;
};

struct ScalingSummary {
  std::string method;
  int S = 0;
  double mean_select_s = 0.0;
  double mean_solve_s = 0.0;
  double select_ratio = 1.0;  // relative to the smallest S
  double solve_ratio = 1.0;
  double total_ratio = 1.0;
};

// Fixed budget k on the first s scenarios of every instance, for each s.
inline std::vector<ScalingRow> scenario_scaling(const std::vector<Instance>& instances, const RunOptions& opt,
                                                std::vector<int> s_values, int k) {
  std::sort(s_values.begin(), s_values.end());
  for (int s : s_values) {
    if (s < k) throw ParameterError("scenario count " + std::to_string(s) + " is below the budget k=" + std::to_string(k));
    for (const auto& inst : instances)
      if (s > inst.scenario_count())
        throw ParameterError("scenario count " + std::to_string(s) + " exceeds the native S=" +
                             std::to_string(inst.scenario_count()) + " of '" + inst.id + "'");
  }
  std::vector<std::vector<ScalingRow>> per_instance(instances.size());
  parallel_for(instances.size(), opt.threads, [&](std::size_t i) {
    for (int s : s_values) {
      const Instance inst = truncate_scenarios(instances[i], s);
      const InstanceProblem problem(inst, opt.policy);
      for (const auto& m : opt.methods) {
        if (m.kind == MethodKind::Exact || m.kind == MethodKind::Ranking) continue;
        const Selection sel = select_for_budgets(inst, m, {k}, opt, {});
        const auto v = value_of_set(problem, sel.sets[0], opt.settings);
        per_instance[i].push_back({inst.id, m.name, s, k, sel.seconds[0], v.seconds, v.value});
      }
    }
  });
  std::vector<ScalingRow> rows;
  for (auto& r : per_instance) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

inline std::vector<ScalingSummary> summarize_scaling(const std::vector<ScalingRow>& rows) {
  std::map<std::pair<std::string, int>, std::pair<ScalingSummary, int>> acc;
  std::vector<std::string> method_order;
  for (const auto& r : rows) {
    auto& [s, count] = acc[{r.method, r.S}];
    if (count == 0) {
      s.method = r.method;
      s.S = r.S;
      if (std::find(method_order.begin(), method_order.end(), r.method) == method_order.end()) method_order.push_back(r.method);
    }
    s.mean_select_s += r.t_select_s;
    s.mean_solve_s += r.t_solve_s;
    ++count;
  }
  std::vector<ScalingSummary> out;
  for (const auto& method : method_order) {
    const ScalingSummary* base = nullptr;
    for (auto& [key, value] : acc) {
      if (key.first != method) continue;
      auto& [s, count] = value;
      s.mean_select_s /= count;
      s.mean_solve_s /= count;
      if (!base) base = &s;
      const double eps = 1e-12;
      s.select_ratio = (s.mean_select_s + eps) / (base->mean_select_s + eps);
      s.solve_ratio = (s.mean_solve_s + eps) / (base->mean_solve_s + eps);
      s.total_ratio = (s.mean_select_s + s.mean_solve_s + eps) / (base->mean_select_s + base->mean_solve_s + eps);
      out.push_back(s);
    }
  }
  return out;
}

inline void write_scaling_csv(const std::vector<ScalingRow>& rows, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "instance_id,method,S,k,t_select_s,t_solve_s,v_reduced\n";
  for (const auto& r : rows)
    out << r.instance_id << ',' << r.method << ',' << r.S << ',' << r.k << ',' << detail::fmt_double(r.t_select_s) << ','
        << detail::fmt_double(r.t_solve_s) << ',' << detail::fmt_opt(r.v_reduced) << '\n';
}

inline void print_scaling(std::ostream& os, const std::vector<ScalingSummary>& rows) {
  os << std::left << std::setw(12) << "method" << std::right << std::setw(6) << "S" << std::setw(14) << "select(s)"
     << std::setw(14) << "solve(s)" << std::setw(12) << "sel.ratio" << std::setw(12) << "solve.ratio" << std::setw(12)
     << "total.ratio" << '\n';
  for (const auto& r : rows)
    os << std::left << std::setw(12) << r.method << std::right << std::setw(6) << r.S << std::setw(14) << std::setprecision(5)
       << r.mean_select_s << std::setw(14) << r.mean_solve_s << std::setw(12) << std::setprecision(3) << r.select_ratio
       << std::setw(12) << r.solve_ratio << std::setw(12) << r.total_ratio << std::setprecision(6) << '\n';
}

// ---------------------------------------------------------------- supervision

struct SupervisionConfig {
  fs::path dataset;
  std::optional<Split> split;
  int budget = 6;
  double eps = 0.0;
  bool with_v_full = false;
  bool keep_scores = false;
  SolveSettings settings;
  CapacityPolicy policy = CapacityPolicy::Fixed;
  int threads = 1;
  fs::path out;
};

inline std::vector<SupervisionEntry> label_instances(const std::vector<Instance>& instances, const SupervisionConfig& cfg) {
  std::vector<SupervisionEntry> entries(instances.size());
  std::vector<std::string> failures(instances.size());
  parallel_for(instances.size(), cfg.threads, [&](std::size_t i) {
    const InstanceProblem problem(instances[i], cfg.policy);
    PriseOptions po;
    po.budget = std::min(cfg.budget, instances[i].scenario_count());
    po.eps = cfg.eps;
    po.keep_scores = cfg.keep_scores;
    const PriseTrace trace = prise_select(problem, po, cfg.settings, instances[i].id);
    if (trace.stop == StopReason::SolverFailure) failures[i] = instances[i].id + ": " + trace.error;
    std::optional<double> v_full;
    if (cfg.with_v_full) v_full = *solve_full(instances[i], cfg.settings, cfg.policy).value.value;
    entries[i] = to_supervision(trace, v_full);
  });
  for (const auto& f : failures)
    if (!f.empty()) throw EnvironmentError("PRISE failed on " + f);
  return entries;
}

inline std::vector<SupervisionEntry> cmd_export_supervision(const SupervisionConfig& cfg) {
  if (cfg.out.empty()) throw ParameterError("output path required");
  const auto instances = load_instances(open_dataset(cfg.dataset, cfg.split));
  auto entries = label_instances(instances, cfg);
  export_supervision(entries, cfg.out);
  return entries;
}

}  // namespace prise
