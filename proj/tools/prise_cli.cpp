// prise: command-line front end for dataset generation, method runs, gap
// sweeps, scenario scaling and supervision export.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prise/bench.hpp"

namespace {

using namespace prise;

enum ExitCode { kOk = 0, kValidation = 2, kEnvironment = 3 };

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  double mip_gap = 1e-4;
  std::optional<double> time_limit;
  std::string out;
  bool force = false;
};

struct DatasetArgs {
  std::string dataset;
  std::string split;
  std::vector<std::string> methods;
  std::vector<int> budgets{1, 2, 4, 6};
  double eps = 0.0;
  std::string policy = "fixed";
  std::string dump_lp;
};

SolveSettings settings_from(const Globals& g) {
  SolveSettings s;
  s.mip_gap = g.mip_gap;
  s.time_limit = g.time_limit;
  s.random_seed = static_cast<unsigned>(g.seed % 2147483647u);
  s.check();
  return s;
}

CapacityPolicy policy_from(const std::string& name) {
  if (name == "fixed") return CapacityPolicy::Fixed;
  if (name == "reoptimize") return CapacityPolicy::Reoptimize;
  throw ParameterError("unknown capacity policy '" + name + "' (fixed or reoptimize)");
}

std::optional<Split> split_from(const std::string& s) {
  if (s.empty() || s == "all") return std::nullopt;
  return split_from_string(s);
}

RunConfig run_config(const Globals& g, const DatasetArgs& a) {
  RunConfig cfg;
  cfg.dataset = a.dataset;
  cfg.split = split_from(a.split);
  for (const auto& m : a.methods) cfg.options.methods.push_back(parse_method(m));
  cfg.options.budgets = a.budgets;
  cfg.options.settings = settings_from(g);
  cfg.options.seed = g.seed;
  cfg.options.eps = a.eps;
  cfg.options.policy = policy_from(a.policy);
  cfg.options.threads = g.threads;
  cfg.out = g.out;
  cfg.force = g.force;
  return cfg;
}

// Writes the reduced model of the first instance for every set size in
// `budgets` (top of the MaxSum order) as LP text.
void dump_models(const RunConfig& cfg, const std::string& dir) {
  if (dir.empty()) return;
  const auto instances = load_instances(open_dataset(cfg.dataset, cfg.split));
  if (instances.empty()) return;
  fs::create_directories(dir);
  const auto& inst = instances.front();
  const auto order = maxsum_order(inst);
  for (int k : cfg.options.budgets) {
    if (k > inst.scenario_count()) continue;
    std::ofstream out(fs::path(dir) / (inst.id + "-k" + std::to_string(k) + ".lp"));
    write_lp(build_reduced_model(inst, std::vector<int>(order.begin(), order.begin() + k)), out);
  }
}

void report(const RunResult& r) {
  print_summary(std::cout, r.summary);
  int flagged = 0;
  for (const auto& row : r.rows) flagged += row.status == "v_decrease" ? 1 : 0;
  if (flagged) std::cerr << "warning: " << flagged << " row(s) where V decreased along a nested chain\n";
}

void add_dataset_options(CLI::App* cmd, DatasetArgs& a, bool with_methods) {
  cmd->add_option("--dataset,-d", a.dataset, "Dataset directory (with manifest.json)")->required();
  cmd->add_option("--split", a.split, "Restrict to train, val or test");
  if (with_methods)
    cmd->add_option("--methods", a.methods, "exact, prise, random, kmeans, maxsum, ranking:<file>")->delimiter(',')->required();
  cmd->add_option("--budgets", a.budgets, "Reduction budgets, ascending")->delimiter(',');
  cmd->add_option("--eps", a.eps, "PRISE gain tolerance");
  cmd->add_option("--capacity", a.policy, "CFLP capacity under evaluation: fixed or reoptimize");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario reduction for two-stage robust optimization"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--mip-gap", g.mip_gap, "Relative MIP gap")->capture_default_str();
  app.add_option("--time-limit", g.time_limit, "Per-solve time limit in seconds");
  app.add_option("--out,-o", g.out, "Output path (directory for generate, file otherwise)");
  app.add_flag("--force", g.force, "Overwrite existing outputs");
  app.fallthrough();

  // generate
  GenerateConfig gen;
  std::string cls = "sel", dist = "uniform";
  int m = 0;
  auto* generate = app.add_subcommand("generate", "Generate a dataset of instances plus manifest");
  generate->add_option("--class", cls, "sel, vc or cflp")->capture_default_str();
  generate->add_option("--n", gen.n, "Items / nodes / customers")->capture_default_str();
  generate->add_option("--m", m, "Facilities (CFLP)");
  generate->add_option("--s", gen.S, "Scenarios per instance")->capture_default_str();
  generate->add_option("--count", gen.count, "Number of instances")->capture_default_str();
  generate->add_option("--dist", dist, "uniform, normal or multimodal")->capture_default_str();

  // run
  DatasetArgs run_args;
  auto* run = app.add_subcommand("run", "Evaluate methods across budgets");
  add_dataset_options(run, run_args, true);
  run->add_option("--dump-lp", run_args.dump_lp, "Write reduced models of the first instance as LP files here");

  // sweep-gap
  DatasetArgs sweep_args;
  std::vector<double> gaps{1e-4, 0.01, 0.05, 0.25};
  auto* sweep = app.add_subcommand("sweep-gap", "Re-solve reduced problems under several MIP gaps");
  add_dataset_options(sweep, sweep_args, true);
  sweep->add_option("--gaps", gaps, "MIP gaps in [0, 1)")->delimiter(',');

  // scale-s
  DatasetArgs scale_args;
  std::vector<int> s_values;
  int scale_k = 4;
  auto* scale = app.add_subcommand("scale-s", "Fixed budget on truncated scenario sets");
  add_dataset_options(scale, scale_args, true);
  scale->add_option("--s-values", s_values, "Scenario counts")->delimiter(',')->required();
  scale->add_option("--k", scale_k, "Budget")->capture_default_str();

  // export-supervision
  DatasetArgs sup_args;
  int sup_budget = 6;
  bool with_v_full = false, keep_scores = false;
  auto* supervise = app.add_subcommand("export-supervision", "Label instances with PRISE traces (JSON lines)");
  add_dataset_options(supervise, sup_args, false);
  supervise->add_option("--K", sup_budget, "PRISE budget")->capture_default_str();
  supervise->add_flag("--with-v-full", with_v_full, "Also solve and record V over all scenarios");
  supervise->add_flag("--scores", keep_scores, "Record every candidate score per step");

  // eval-ranking
  DatasetArgs rank_args;
  std::string ranking_file;
  std::vector<std::string> compare;
  auto* eval_ranking = app.add_subcommand("eval-ranking", "Evaluate an external ranking file");
  add_dataset_options(eval_ranking, rank_args, false);
  eval_ranking->add_option("--ranking", ranking_file, "Ranking JSON lines")->required();
  eval_ranking->add_option("--compare", compare, "Reference methods evaluated alongside")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*generate) {
      gen.cls = problem_class_from_string(cls);
      if (gen.cls == ProblemClass::CFLP) gen.m = m > 0 ? m : gen.n;
      else if (m != 0) throw ParameterError("--m is only meaningful for cflp");
      gen.family = distribution_family_from_string(dist);
      gen.seed = g.seed;
      gen.out = g.out;
      gen.force = g.force;
      const auto manifest = cmd_generate(gen);
      int counts[3] = {0, 0, 0};
      for (const auto& e : manifest) ++counts[static_cast<int>(e.split)];
      std::cout << "wrote " << manifest.size() << " instances to " << gen.out.string() << " (train " << counts[0] << ", val "
                << counts[1] << ", test " << counts[2] << ")\n";
    } else if (*run) {
      const RunConfig cfg = run_config(g, run_args);
      dump_models(cfg, run_args.dump_lp);
      report(cmd_run(cfg));
    } else if (*sweep) {
      SweepConfig cfg{run_config(g, sweep_args), gaps};
      report(cmd_tolerance_sweep(cfg));
    } else if (*scale) {
      const RunConfig cfg = run_config(g, scale_args);
      const auto instances = load_instances(open_dataset(cfg.dataset, cfg.split));
      const auto rows = scenario_scaling(instances, cfg.options, s_values, scale_k);
      if (!cfg.out.empty()) write_scaling_csv(rows, cfg.out);
      print_scaling(std::cout, summarize_scaling(rows));
    } else if (*supervise) {
      SupervisionConfig cfg;
      cfg.dataset = sup_args.dataset;
      cfg.split = split_from(sup_args.split);
      cfg.budget = sup_budget;
      cfg.eps = sup_args.eps;
      cfg.with_v_full = with_v_full;
      cfg.keep_scores = keep_scores;
      cfg.settings = settings_from(g);
      cfg.policy = policy_from(sup_args.policy);
      cfg.threads = g.threads;
      cfg.out = g.out;
      const auto entries = cmd_export_supervision(cfg);
      std::cout << "wrote " << entries.size() << " supervision records to " << cfg.out.string() << '\n';
    } else if (*eval_ranking) {
      rank_args.methods = compare;
      rank_args.methods.push_back("ranking:" + ranking_file);
      report(cmd_run(run_config(g, rank_args)));
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const VersionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEnvironment;
  }
  return kOk;
}
