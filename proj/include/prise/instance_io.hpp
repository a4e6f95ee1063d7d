#pragma once

// JSON instance files and dataset manifests.
//
// Instance file (schema_version "1"):
//   { "schema_version": "1", "id": ..., "class": "SEL"|"VC"|"CFLP", "n": ..., "m": ... (CFLP),
//     "costs": { "first_stage": [...] }                                       (SEL/VC)
//              { "fixed": [...], "capacity": [...], "max_capacity": [...],
//                "transport": [[... m ...] x n] }                             (CFLP)
//     "edges": [[u, v], ...]                                                  (VC)
//     "scenarios": { "S": ..., "rows": [[... n ...] x S] },
//     "seed": ..., "dist": { "family": ..., ... } }
//
// Manifest (manifest.json in the dataset directory):
//   { "schema_version": "1", "instances": [ { "id", "file", "split" }, ... ] }

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "prise/error.hpp"
#include "prise/instance.hpp"

namespace prise {

inline constexpr const char* kSchemaVersion = "1";

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* field, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + field + "'");
  return *it;
}

template <class T>
T get_as(const json& value, const std::string& where) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline json dist_to_json(const DistributionSpec& d) {
  json j = {{"family", to_string(d.family)}, {"clip", {d.clip_lo, d.clip_hi}}};
  if (d.family != DistributionFamily::Uniform) {
    j["mean"] = {d.mean_lo, d.mean_hi};
  }
  if (d.family == DistributionFamily::Normal) {
    j["sigma_rel"] = d.sigma_rel;
    j["sigma"] = {d.sigma_lo, d.sigma_hi};
  }
  if (d.family == DistributionFamily::Multimodal) {
    j["modes"] = {d.modes_lo, d.modes_hi};
    j["dev"] = {d.dev_lo, d.dev_hi};
    j["scale_sd"] = d.scale_sd;
  }
  return j;
}

inline DistributionSpec dist_from_json(const json& j, ProblemClass cls, const std::string& where) {
  const auto family = distribution_family_from_string(get_as<std::string>(require(j, "family", where), where + ".family"));
  DistributionSpec d = DistributionSpec::for_family(cls, family);
  auto pair = [&](const char* key, auto& lo, auto& hi) {
    if (auto it = j.find(key); it != j.end()) {
      const std::string w = where + "." + key;
      if (!it->is_array() || it->size() != 2) throw ParseError(w + ": expected a two-element array");
      lo = get_as<std::remove_reference_t<decltype(lo)>>((*it)[0], w);
      hi = get_as<std::remove_reference_t<decltype(hi)>>((*it)[1], w);
    }
  };
  pair("clip", d.clip_lo, d.clip_hi);
  pair("mean", d.mean_lo, d.mean_hi);
  pair("sigma", d.sigma_lo, d.sigma_hi);
  pair("modes", d.modes_lo, d.modes_hi);
  pair("dev", d.dev_lo, d.dev_hi);
  if (auto it = j.find("sigma_rel"); it != j.end()) d.sigma_rel = get_as<double>(*it, where + ".sigma_rel");
  if (auto it = j.find("scale_sd"); it != j.end()) d.scale_sd = get_as<double>(*it, where + ".scale_sd");
  return d;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst) {
  using nlohmann::json;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["id"] = inst.id;
  j["class"] = to_string(inst.cls);
  j["n"] = inst.n;
  if (inst.cls == ProblemClass::CFLP) {
    j["m"] = inst.m;
    json transport = json::array();
    for (int i = 0; i < inst.n; ++i) {
      json row = json::array();
      for (int f = 0; f < inst.m; ++f) row.push_back(inst.transport(i, f));
      transport.push_back(std::move(row));
    }
    j["costs"] = {{"fixed", inst.fixed_cost},
                  {"capacity", inst.capacity_cost},
                  {"max_capacity", inst.max_capacity},
                  {"transport", std::move(transport)}};
  } else {
    j["costs"] = {{"first_stage", inst.first_stage_cost}};
  }
  if (inst.cls == ProblemClass::VC) {
    json edges = json::array();
    for (const auto& e : inst.edges) edges.push_back({e.u, e.v});
    j["edges"] = std::move(edges);
  }
  json rows = json::array();
  for (int s = 0; s < inst.scenarios.size(); ++s) {
    const auto r = inst.scenarios.row(s);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["scenarios"] = {{"S", inst.scenarios.size()}, {"rows", std::move(rows)}};
  j["seed"] = inst.seed;
  j["dist"] = detail::dist_to_json(inst.dist);
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j, const std::string& where = "instance") {
  using detail::get_as;
  using detail::require;
  const auto version = get_as<std::string>(require(j, "schema_version", where), where + ".schema_version");
  if (version != kSchemaVersion)
    throw VersionError(where + ": schema_version '" + version + "' is not supported (expected '" + kSchemaVersion + "')");

  Instance inst;
  if (auto it = j.find("id"); it != j.end()) inst.id = get_as<std::string>(*it, where + ".id");
  inst.cls = problem_class_from_string(get_as<std::string>(require(j, "class", where), where + ".class"));
  inst.n = get_as<int>(require(j, "n", where), where + ".n");
  const auto& costs = require(j, "costs", where);
  if (inst.cls == ProblemClass::CFLP) {
    inst.m = get_as<int>(require(j, "m", where), where + ".m");
    const std::string w = where + ".costs";
    inst.fixed_cost = get_as<std::vector<double>>(require(costs, "fixed", w), w + ".fixed");
    inst.capacity_cost = get_as<std::vector<double>>(require(costs, "capacity", w), w + ".capacity");
    inst.max_capacity = get_as<std::vector<double>>(require(costs, "max_capacity", w), w + ".max_capacity");
    const auto transport = get_as<std::vector<std::vector<double>>>(require(costs, "transport", w), w + ".transport");
    if (transport.size() != static_cast<std::size_t>(inst.n)) throw ParseError(w + ".transport: expected n rows");
    for (const auto& row : transport) {
      if (row.size() != static_cast<std::size_t>(inst.m)) throw ParseError(w + ".transport: expected m columns per row");
      inst.transport_cost.insert(inst.transport_cost.end(), row.begin(), row.end());
    }
  } else {
    inst.first_stage_cost = get_as<std::vector<double>>(require(costs, "first_stage", where + ".costs"), where + ".costs.first_stage");
  }
  if (inst.cls == ProblemClass::VC) {
    for (const auto& e : get_as<std::vector<std::array<int, 2>>>(require(j, "edges", where), where + ".edges"))
      inst.edges.push_back({e[0], e[1]});
  }
  const auto& scen = require(j, "scenarios", where);
  const int S = get_as<int>(require(scen, "S", where + ".scenarios"), where + ".scenarios.S");
  const auto rows = get_as<std::vector<std::vector<double>>>(require(scen, "rows", where + ".scenarios"), where + ".scenarios.rows");
  if (rows.size() != static_cast<std::size_t>(S) || S < 1)
    throw ParseError(where + ".scenarios: S = " + std::to_string(S) + " but " + std::to_string(rows.size()) + " rows");
  inst.scenarios = ScenarioSet(S, inst.n);
  for (int s = 0; s < S; ++s) {
    if (rows[s].size() != static_cast<std::size_t>(inst.n))
      throw ParseError(where + ".scenarios.rows[" + std::to_string(s) + "]: expected " + std::to_string(inst.n) + " entries");
    std::copy(rows[s].begin(), rows[s].end(), inst.scenarios.row(s).begin());
  }
  inst.seed = get_as<std::uint64_t>(require(j, "seed", where), where + ".seed");
  inst.dist = detail::dist_from_json(require(j, "dist", where), inst.cls, where + ".dist");
  try {
    validate(inst);
  } catch (const ParameterError& e) {
    throw ParseError(where + ": " + e.what());
  }
  return inst;
}

inline void write_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << instance_to_json(inst).dump() << '\n';
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline Instance read_instance(const std::filesystem::path& path) {
  Instance inst = instance_from_json(read_json_file(path), path.string());
  if (inst.id.empty()) inst.id = path.stem().string();
  return inst;
}

enum class Split { Train, Val, Test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

inline Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw ParseError("unknown split '" + std::string(s) + "'");
}

struct ManifestEntry {
  std::string id;
  std::string file;
  Split split = Split::Train;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// 80/10/10 by floor; the remainder goes to test. A single instance lands in train.
inline std::vector<Split> assign_splits(int count) {
  const int train = count == 1 ? 1 : count * 8 / 10;
  const int val = count == 1 ? 0 : count / 10;
  std::vector<Split> out;
  for (int i = 0; i < count; ++i) out.push_back(i < train ? Split::Train : i < train + val ? Split::Val : Split::Test);
  return out;
}

inline void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& dir) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instances"] = nlohmann::json::array();
  for (const auto& e : entries) j["instances"].push_back({{"id", e.id}, {"file", e.file}, {"split", to_string(e.split)}});
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
  out << j.dump(1) << '\n';
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  const auto j = read_json_file(path);
  const std::string where = path.string();
  using detail::get_as;
  using detail::require;
  const auto version = get_as<std::string>(require(j, "schema_version", where), where + ".schema_version");
  if (version != kSchemaVersion) throw VersionError(where + ": unsupported schema_version '" + version + "'");
  std::vector<ManifestEntry> out;
  const auto& list = require(j, "instances", where);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string w = where + ".instances[" + std::to_string(i) + "]";
    out.push_back({get_as<std::string>(require(list[i], "id", w), w + ".id"),
                   get_as<std::string>(require(list[i], "file", w), w + ".file"),
                   split_from_string(get_as<std::string>(require(list[i], "split", w), w + ".split"))});
  }
  return out;
}

}  // namespace prise
