#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "rado/cli.hpp"

using namespace rado;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rado");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rado_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, VerifyMatchingPair) {
  ASSERT_EQ(run({"--seed", "4", "gen", "--n", "9", "--out", path("c.json")}).code, 0);
  ASSERT_EQ(run({"decompose", "--algo", "gg", "--in", path("c.json"), "--out", path("d.json")}).code, 0);
  auto v = run({"verify", "--coloring", path("c.json"), "--decomp", path("d.json")});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "valid\n");
}

TEST_F(Cli, VerifyReportsOverlap) {
  ASSERT_EQ(run({"gen", "--n", "5", "--out", path("c.json")}).code, 0);
  write_file(path("d.json"), R"({"r": 2, "paths": [[0, 1, 2], [2, 3, 4]]})");
  write_file(path("c1.json"), R"({"n": 5, "r": 2, "triangle": [0,0,0,0,0,0,0,0,0,0]})");
  auto o = run({"verify", "--coloring", path("c1.json"), "--decomp", path("d.json")});
  EXPECT_EQ(o.code, 1);
  EXPECT_EQ(o.out, "invalid: overlap(2)\n");
  write_file(path("d2.json"), R"({"r": 2, "paths": [[0, 1, 2], [3, 4]]})");
  auto e = run({"verify", "--coloring", path("c1.json"), "--decomp", path("d2.json")});
  EXPECT_EQ(e.code, 1);
  EXPECT_EQ(e.out, "invalid: bad-edge(1,1)\n");
}

TEST_F(Cli, TruncatedTriangleIsParseError) {
  write_file(path("c.json"), R"({"n": 5, "r": 2, "triangle": [0,1,0]})");
  write_file(path("d.json"), R"({"r": 2, "paths": [[0], [1]]})");
  auto v = run({"verify", "--coloring", path("c.json"), "--decomp", path("d.json")});
  EXPECT_EQ(v.code, 2);
  EXPECT_NE(v.err.find("parse error"), std::string::npos);
  write_file(path("bad.json"), "{\"n\": 5,");
  EXPECT_EQ(run({"verify", "--coloring", path("bad.json"), "--decomp", path("d.json")}).code, 2);
  EXPECT_EQ(run({"verify", "--coloring", path("missing.json"), "--decomp", path("d.json")}).code, 2);
}

TEST_F(Cli, GgRefusesThreeColors) {
  ASSERT_EQ(run({"gen", "--n", "6", "--r", "3", "--out", path("c.json")}).code, 0);
  auto r = run({"decompose", "--algo", "gg", "--in", path("c.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("two coloring"), std::string::npos);
  EXPECT_EQ(run({"decompose", "--algo", "brute", "--in", path("c.json"), "--out", path("d.json")}).code, 0);
  EXPECT_EQ(run({"verify", "--coloring", path("c.json"), "--decomp", path("d.json")}).code, 0);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"gen", "--frobnicate"}).code, 2);
  EXPECT_EQ(run({"decompose", "--algo", "magic", "--in", "x"}).code, 2);
  EXPECT_EQ(run({"adversary"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, RoundTripHundredSeeds) {
  for (int seed = 0; seed < 100; ++seed) {
    const auto s = std::to_string(seed);
    ASSERT_EQ(run({"--seed", s, "gen", "--n", std::to_string(2 + seed % 30), "--out", path("c.json")}).code, 0);
    ASSERT_EQ(run({"decompose", "--in", path("c.json"), "--out", path("d.json")}).code, 0);
    ASSERT_EQ(run({"verify", "--coloring", path("c.json"), "--decomp", path("d.json")}).out, "valid\n") << seed;
  }
}

TEST_F(Cli, OutputsAreReproducible) {
  ASSERT_EQ(run({"--seed", "9", "gen", "--n", "14", "--out", path("c.json")}).code, 0);
  for (const char* out : {"a.json", "b.json"})
    ASSERT_EQ(run({"decompose", "--in", path("c.json"), "--out", path(out), "--trace", path(std::string("t") + out)})
                  .code,
              0);
  EXPECT_EQ(read_file(path("a.json")), read_file(path("b.json")));
  EXPECT_EQ(read_file(path("ta.json")), read_file(path("tb.json")));
  auto doc = json::parse(read_file(path("a.json")));
  EXPECT_EQ(doc["v"], 1);
  EXPECT_EQ(doc["config"]["seed"], 0);
  EXPECT_EQ(doc["inputs"][path("c.json")], fnv1a_hex(read_file(path("c.json"))));
}

TEST_F(Cli, JobsEnvironmentOverride) {
  ::setenv("RADO_JOBS", "3", 1);
  auto r = run({"--jobs", "1", "hunt", "--r", "2", "--n", "4"});
  ::unsetenv("RADO_JOBS");
  ASSERT_EQ(r.code, 0);
  auto doc = json::parse(r.out);
  EXPECT_EQ(doc["config"]["jobs"], 3);
  EXPECT_TRUE(doc["result"]["counterexamples"].empty());
}

TEST_F(Cli, StableAndLargenessAlgorithms) {
  ASSERT_EQ(run({"--seed", "2", "gen", "--n", "30", "--r", "3", "--stable-threshold", "6", "--out", path("s.json")})
                .code,
            0);
  ASSERT_EQ(run({"decompose", "--algo", "stable", "--in", path("s.json"), "--out", path("d.json")}).code, 0);
  EXPECT_EQ(run({"verify", "--coloring", path("s.json"), "--decomp", path("d.json")}).code, 0);
  ASSERT_EQ(run({"gen", "--n", "10", "--out", path("c.json")}).code, 0);
  EXPECT_EQ(run({"decompose", "--algo", "stable", "--in", path("c.json")}).code, 2);
  auto g = run({"decompose", "--algo", "generic", "--theta", "2", "--in", path("c.json")});
  EXPECT_EQ(g.code, 1);
  EXPECT_NE(g.err.find("theta"), std::string::npos);
}

TEST_F(Cli, SimulateWritesTrace) {
  ASSERT_EQ(run({"--seed", "1", "gen", "--n", "5", "--out", path("c.json")}).code, 0);
  auto r = run({"simulate", "--algo", "uniform", "--in", path("c.json"), "--trace", path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = json::parse(read_file(path("t.json")));
  auto t = trace_from_json(doc["result"]["trace"]);
  EXPECT_FALSE(check_trace_steps(t));
  auto c = coloring_from_json(json::parse(read_file(path("c.json"))));
  EXPECT_TRUE(validate_decomposition(c, t.final_state()).ok());
}

TEST_F(Cli, HaltingDecode) {
  auto r = run({"adversary", "halting", "--machines", std::string(RADO_SAMPLES_DIR) + "/machines.json", "--stages",
                "200", "--decode", "--out", path("h.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "decoded members: 0 2 4 6\n");
  auto doc = json::parse(read_file(path("h.json")));
  const auto& res = doc["result"];
  auto c = coloring_from_json(res["coloring"]);
  auto d = decomposition_from_json(res["decomposition"]);
  EXPECT_TRUE(validate_decomposition(c, d).ok());
  EXPECT_EQ(res["decoded"]["markers"], res["markers"]);
  EXPECT_EQ(run({"adversary", "halting", "--machines", std::string(RADO_SAMPLES_DIR) + "/machines.json", "--stages",
                 "10"})
                .code,
            1);
}

TEST_F(Cli, MachineFileErrors) {
  write_file(path("m.json"), R"([{"e": 0, "halts_at": 2}, {"e": 0, "halts_at": null}])");
  EXPECT_EQ(run({"adversary", "halting", "--machines", path("m.json")}).code, 2);
  write_file(path("m.json"), R"([{"e": 0}])");
  EXPECT_EQ(run({"adversary", "halting", "--machines", path("m.json")}).code, 2);
}

TEST_F(Cli, DiagReport) {
  write_file(path("w.json"), R"([{"id": "cb", "kind": "constant-blue"}, {"id": "alt", "kind": "alternating", "arrives_at": 5}])");
  auto r = run({"adversary", "diag", "--candidates", path("w.json"), "--stages", "300", "--report", path("r.json")});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  auto doc = json::parse(read_file(path("r.json")));
  const auto& b = doc["result"]["builds"][0];
  EXPECT_TRUE(b["t_monotone"].get<bool>());
  EXPECT_EQ(b["log"].size(), 300u);
  for (const auto& v : b["verdicts"]) EXPECT_NE(v["verdict"], "undecided-at-bound");
  write_file(path("w.json"), R"([{"kind": "oracle-of-delphi"}])");
  EXPECT_EQ(run({"adversary", "diag", "--candidates", path("w.json")}).code, 2);
}

TEST_F(Cli, HarnessSuitesAndNegativeControl) {
  auto r = run({"harness", "--suite", "lemma-strong-negative-control", "--out", path("h.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("PASS ", 0), 0u);
  auto doc = json::parse(read_file(path("h.json")));
  EXPECT_EQ(doc["result"][0]["suite"], "lemma-strong-negative-control");
  EXPECT_EQ(run({"harness", "--suite", "exhaustive-gg"}).code, 0);
  EXPECT_EQ(run({"harness", "--suite", "no-such-suite"}).code, 2);
}

TEST(Io, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Io, ColoringRoundTrip) {
  auto c = gen_stable_random(20, 3, 7, 6);
  auto back = coloring_from_json(json::parse(to_json(c).dump()));
  ASSERT_EQ(back.n(), 20);
  for (Vertex x = 0; x < 20; ++x)
    for (Vertex y = x + 1; y < 20; ++y) ASSERT_EQ(back.at(x, y), c.at(x, y));
  auto d = gen_random(11, 4, 3);
  EXPECT_EQ(coloring_from_json(to_json(d)).triangle(), d.triangle());
}

TEST(Io, TraceRoundTrip) {
  auto c = gen_random(10, 2, 12);
  Trace t;
  gg_decompose(c, &t);
  t.mark(MarkerKind::Anomaly, "test marker", kRed, false);
  auto back = trace_from_json(json::parse(to_json(t).dump()));
  ASSERT_EQ(back.steps.size(), t.steps.size());
  for (std::size_t i = 0; i < t.steps.size(); ++i) EXPECT_EQ(back.steps[i], t.steps[i]);
  EXPECT_EQ(back.final_state(), t.final_state());
  ASSERT_TRUE(back.marker);
  EXPECT_EQ(back.marker->detail, "test marker");
  EXPECT_FALSE(back.marker->exhaustive);
}

TEST(Io, RejectsOtherSchemaVersion) {
  EXPECT_THROW(decomposition_from_json(json::parse(R"({"v": 2, "r": 2, "paths": [[], []]})")), ParseError);
  EXPECT_THROW(decomposition_from_json(json::parse(R"({"r": 2, "paths": [[]]})")), ParseError);
}

TEST(Binary, ExitCodes) {
  const std::string bin = RADO_CLI_PATH;
  EXPECT_EQ(std::system((bin + " > /dev/null 2>&1").c_str()) >> 8, 2);
  EXPECT_EQ(std::system((bin + " hunt --r 2 --n 3 > /dev/null 2>&1").c_str()) >> 8, 0);
}
