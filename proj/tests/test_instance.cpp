#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "prise/instance.hpp"
#include "prise/instance_io.hpp"
#include "prise/rng.hpp"

using namespace prise;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("prise_test_instance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance make(ProblemClass cls, int n, std::optional<int> m, int S, DistributionFamily fam, std::uint64_t seed) {
  return generate_instance(cls, n, m, S, DistributionSpec::for_family(cls, fam), seed);
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  RandomStream a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DerivedStreamsDiffer) {
  auto a = RandomStream::derive(1, "x");
  auto b = RandomStream::derive(1, "y");
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformIntCoversRange) {
  RandomStream r(3);
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 6000; ++i) {
    const auto v = r.uniform_int(0, 5);
    ASSERT_GE(v, 0);
    ASSERT_LE(v, 5);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Generate, Sel20x50Shape) {
  const auto inst = make(ProblemClass::SEL, 20, std::nullopt, 50, DistributionFamily::Uniform, 42);
  EXPECT_EQ(inst.n, 20);
  EXPECT_EQ(inst.first_stage_cost.size(), 20u);
  EXPECT_EQ(inst.scenarios.size(), 50);
  EXPECT_EQ(inst.scenarios.dimension(), 20);
  for (double c : inst.first_stage_cost) {
    EXPECT_EQ(c, std::round(c));
    EXPECT_GE(c, 1);
    EXPECT_LE(c, 100);
  }
  for (int s = 0; s < 50; ++s)
    for (int i = 0; i < 20; ++i) {
      EXPECT_EQ(inst.scenarios(s, i), std::round(inst.scenarios(s, i)));
      EXPECT_GE(inst.scenarios(s, i), 1);
      EXPECT_LE(inst.scenarios(s, i), 100);
    }
}

TEST(Generate, CflpDeterministicBytes) {
  const auto dir = temp_dir("det");
  const auto a = make(ProblemClass::CFLP, 3, 2, 2, DistributionFamily::Uniform, 7);
  const auto b = make(ProblemClass::CFLP, 3, 2, 2, DistributionFamily::Uniform, 7);
  EXPECT_EQ(a, b);
  write_instance(a, dir / "a.json");
  write_instance(b, dir / "b.json");
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(a.scenarios(s, i), 10);
      EXPECT_LE(a.scenarios(s, i), 500);
    }
}

TEST(Generate, CflpParameterRanges) {
  const auto inst = make(ProblemClass::CFLP, 10, 10, 5, DistributionFamily::Uniform, 1);
  for (int j = 0; j < 10; ++j) {
    EXPECT_GE(inst.fixed_cost[j], 100);
    EXPECT_LE(inst.fixed_cost[j], 1000);
    EXPECT_GE(inst.capacity_cost[j], 10);
    EXPECT_LE(inst.capacity_cost[j], 100);
    EXPECT_GE(inst.max_capacity[j], 200);
    EXPECT_LE(inst.max_capacity[j], 700);
  }
  ASSERT_EQ(inst.transport_cost.size(), 100u);
  for (double t : inst.transport_cost) {
    EXPECT_GE(t, 1);
    EXPECT_LE(t, 1000);
  }
}

TEST(Generate, DifferentSeedsDiffer) {
  const auto a = make(ProblemClass::SEL, 10, std::nullopt, 5, DistributionFamily::Uniform, 1);
  const auto b = make(ProblemClass::SEL, 10, std::nullopt, 5, DistributionFamily::Uniform, 2);
  EXPECT_NE(a.scenarios, b.scenarios);
}

TEST(Generate, EnvelopeHoldsForEveryFamily) {
  for (auto cls : {ProblemClass::SEL, ProblemClass::VC, ProblemClass::CFLP}) {
    for (auto fam : {DistributionFamily::Uniform, DistributionFamily::Normal, DistributionFamily::Multimodal}) {
      const auto spec = DistributionSpec::for_family(cls, fam);
      long samples = 0;
      for (std::uint64_t seed = 0; samples < 10000; ++seed) {
        const auto inst = generate_instance(cls, 20, cls == ProblemClass::CFLP ? std::optional<int>(5) : std::nullopt, 50, spec, seed);
        for (int s = 0; s < inst.scenario_count(); ++s)
          for (double v : inst.scenarios.row(s)) {
            ASSERT_TRUE(std::isfinite(v));
            ASSERT_GE(v, spec.clip_lo) << to_string(cls) << ' ' << to_string(fam);
            ASSERT_LE(v, spec.clip_hi) << to_string(cls) << ' ' << to_string(fam);
            ++samples;
          }
      }
      EXPECT_GE(samples, 10000);
    }
  }
}

TEST(Generate, NormalMeansLookRight) {
  // Normal SEL costs centre on the drawn means in [25, 75].
  const auto inst = make(ProblemClass::SEL, 40, std::nullopt, 400, DistributionFamily::Normal, 5);
  double sum = 0.0;
  for (int s = 0; s < inst.scenario_count(); ++s) sum += inst.scenarios.row_sum(s);
  const double mean = sum / (inst.scenario_count() * inst.n);
  EXPECT_GT(mean, 25.0);
  EXPECT_LT(mean, 75.0);
}

TEST(Generate, VcMeanDegreeNearTen) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = make(ProblemClass::VC, 50, std::nullopt, 1, DistributionFamily::Uniform, seed);
    total += 2.0 * inst.edges.size() / inst.n;
  }
  const double mean = total / 50;
  EXPECT_GE(mean, 7.0);
  EXPECT_LE(mean, 13.0);
}

TEST(Generate, VcEdgesOrderedAndUnique) {
  const auto inst = make(ProblemClass::VC, 30, std::nullopt, 2, DistributionFamily::Uniform, 9);
  std::set<std::pair<int, int>> seen;
  for (const auto& e : inst.edges) {
    EXPECT_LT(e.u, e.v);
    EXPECT_GE(e.u, 0);
    EXPECT_LT(e.v, 30);
    EXPECT_TRUE(seen.insert({e.u, e.v}).second);
  }
}

TEST(Generate, SmallVcIsDense) {
  // p = min(1, 10/n) = 1 for n <= 10.
  const auto inst = make(ProblemClass::VC, 2, std::nullopt, 1, DistributionFamily::Uniform, 0);
  ASSERT_EQ(inst.edges.size(), 1u);
  EXPECT_EQ(inst.edges[0], (Edge{0, 1}));
}

TEST(Generate, InvalidDimensions) {
  const auto sel = DistributionSpec::uniform(ProblemClass::SEL);
  EXPECT_THROW(generate_instance(ProblemClass::SEL, 1, std::nullopt, 5, sel, 0), ParameterError);
  EXPECT_THROW(generate_instance(ProblemClass::SEL, 4, std::nullopt, 0, sel, 0), ParameterError);
  EXPECT_THROW(generate_instance(ProblemClass::CFLP, 4, std::nullopt, 2, DistributionSpec::uniform(ProblemClass::CFLP), 0),
               ParameterError);
  EXPECT_THROW(generate_instance(ProblemClass::CFLP, 4, 0, 2, DistributionSpec::uniform(ProblemClass::CFLP), 0), ParameterError);
}

TEST(Generate, ClassDistributionMismatch) {
  EXPECT_THROW(generate_instance(ProblemClass::CFLP, 4, 2, 2, DistributionSpec::uniform(ProblemClass::SEL), 0), ParameterError);
  EXPECT_THROW(generate_instance(ProblemClass::SEL, 4, std::nullopt, 2, DistributionSpec::uniform(ProblemClass::CFLP), 0),
               ParameterError);
}

TEST(Generate, TruncateKeepsPrefix) {
  const auto inst = make(ProblemClass::SEL, 6, std::nullopt, 10, DistributionFamily::Uniform, 3);
  const auto t = truncate_scenarios(inst, 4);
  ASSERT_EQ(t.scenario_count(), 4);
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 6; ++i) EXPECT_EQ(t.scenarios(s, i), inst.scenarios(s, i));
  EXPECT_THROW(truncate_scenarios(inst, 11), ParameterError);
}

TEST(Io, RoundTripEveryClassAndFamily) {
  const auto dir = temp_dir("roundtrip");
  int i = 0;
  for (auto cls : {ProblemClass::SEL, ProblemClass::VC, ProblemClass::CFLP})
    for (auto fam : {DistributionFamily::Uniform, DistributionFamily::Normal, DistributionFamily::Multimodal}) {
      auto inst = make(cls, 7, cls == ProblemClass::CFLP ? std::optional<int>(3) : std::nullopt, 4, fam, 100 + i);
      inst.id = "inst" + std::to_string(i);
      const auto path = dir / (inst.id + ".json");
      write_instance(inst, path);
      EXPECT_EQ(read_instance(path), inst);
      ++i;
    }
}

TEST(Io, MissingScenariosNamesField) {
  const auto dir = temp_dir("missing");
  auto j = instance_to_json(make(ProblemClass::SEL, 4, std::nullopt, 2, DistributionFamily::Uniform, 1));
  j.erase("scenarios");
  std::ofstream(dir / "bad.json") << j.dump();
  try {
    read_instance(dir / "bad.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("scenarios"), std::string::npos);
  }
}

TEST(Io, VersionMismatch) {
  const auto dir = temp_dir("version");
  auto j = instance_to_json(make(ProblemClass::SEL, 4, std::nullopt, 2, DistributionFamily::Uniform, 1));
  j["schema_version"] = "2";
  std::ofstream(dir / "v2.json") << j.dump();
  EXPECT_THROW(read_instance(dir / "v2.json"), VersionError);
}

TEST(Io, MalformedJson) {
  const auto dir = temp_dir("malformed");
  std::ofstream(dir / "x.json") << "{ \"schema_version\": \"1\", ";
  EXPECT_THROW(read_instance(dir / "x.json"), ParseError);
}

TEST(Io, HandWrittenSelFixture) {
  const auto dir = temp_dir("fixture");
  std::ofstream(dir / "tiny-sel.json") << R"({
  "schema_version": "1",
  "class": "SEL",
  "n": 4,
  "costs": { "first_stage": [10, 20, 30, 40] },
  "scenarios": { "S": 3, "rows": [[1, 2, 3, 4], [50, 60, 70, 80], [9, 9, 9, 9]] },
  "seed": 0,
  "dist": { "family": "uniform", "clip": [1, 100] }
})";
  const auto inst = read_instance(dir / "tiny-sel.json");
  EXPECT_EQ(inst.id, "tiny-sel");
  EXPECT_EQ(inst.cls, ProblemClass::SEL);
  EXPECT_EQ(inst.scenario_count(), 3);
  EXPECT_EQ(inst.scenarios(1, 2), 70);
  EXPECT_EQ(inst.selection_size(), 2);
}

TEST(Io, ScenarioRowLengthChecked) {
  const auto dir = temp_dir("rowlen");
  auto j = instance_to_json(make(ProblemClass::SEL, 4, std::nullopt, 2, DistributionFamily::Uniform, 1));
  j["scenarios"]["rows"][1] = {1, 2, 3};
  std::ofstream(dir / "x.json") << j.dump();
  EXPECT_THROW(read_instance(dir / "x.json"), ParseError);
}

TEST(Manifest, SplitArithmetic) {
  const auto s25 = assign_splits(25);
  EXPECT_EQ(std::count(s25.begin(), s25.end(), Split::Train), 20);
  EXPECT_EQ(std::count(s25.begin(), s25.end(), Split::Val), 2);
  EXPECT_EQ(std::count(s25.begin(), s25.end(), Split::Test), 3);
  const auto s1 = assign_splits(1);
  ASSERT_EQ(s1.size(), 1u);
  EXPECT_EQ(s1[0], Split::Train);
}

TEST(Manifest, RoundTrip) {
  const auto dir = temp_dir("manifest");
  const std::vector<ManifestEntry> entries{{"a", "a.json", Split::Train}, {"b", "b.json", Split::Test}};
  write_manifest(entries, dir);
  EXPECT_EQ(read_manifest(dir), entries);
}
