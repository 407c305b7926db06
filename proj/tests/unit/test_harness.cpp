#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "spread/harness.hpp"

using namespace spread;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "spread_harness_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Trace, Parses) {
  EXPECT_EQ(parse_trace("2\n0\n1\n"), (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(parse_trace(""), std::vector<int>{});
  EXPECT_EQ(parse_trace("  3 \r\n\n \t\n1"), (std::vector<int>{3, 1}));
}

TEST(Trace, ErrorsCarryLine) {
  try {
    parse_trace("x");
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_EQ(e.line(), 1);
  }
  try {
    parse_trace("1\n\n2.5\n");
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Trace, FromFile) {
  const auto path = scratch("trace.txt");
  write(path, "1\n2\n");
  EXPECT_EQ(ingest_trace(path.string()), (std::vector<int>{1, 2}));
  EXPECT_THROW(ingest_trace((path.parent_path() / "missing.txt").string()), std::runtime_error);
}

TEST(Config, Rejections) {
  EXPECT_THROW(ExperimentConfig::from_json("{"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"params":{"tau":2,"b":1,"m":2},"trace":[1],"schemes":[]})"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"params":{"tau":2,"b":1,"m":2},"schemes":["offline"]})"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"params":{"tau":2,"b":1,"m":2},"trace":[1],"schemes":["online"]})"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"params":{"tau":2,"b":1,"m":2},"trace":[1],"schemes":["fast"]})"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"params":{"tau":2,"b":1,"m":2},"trace":"nope.txt","schemes":["offline"]})"),
               std::runtime_error);
}

TEST(Config, SeedFromEnvironment) {
  const char* text = R"({"params":{"tau":2,"b":1,"m":2},"trace":[1],"schemes":["offline"]})";
  ::setenv("SPREAD_SEED", "77", 1);
  EXPECT_EQ(ExperimentConfig::from_json(text).seed, 77u);
  ::setenv("SPREAD_SEED", "x", 1);
  EXPECT_THROW(ExperimentConfig::from_json(text), ConfigError);
  ::unsetenv("SPREAD_SEED");
  EXPECT_EQ(ExperimentConfig::from_json(text).seed, 1u);
}

TEST(Experiment, WorkedInstanceRow) {
  const auto cfg = ExperimentConfig::from_json(
      R"({"params":{"tau":2,"b":1,"m":2},"trace":[2],"schemes":["offline","naive_f_k","naive_f_0"],
          "loss":{"mode":"enumerate","max_bursts":2}})");
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.rows.size(), 3u);
  EXPECT_EQ(res.rows[0].rate->to_string(), "2/3");
  EXPECT_EQ(res.rows[0].regret, 0);
  EXPECT_EQ(res.rows[1].rate->to_string(), "1/2");
  EXPECT_EQ(res.rows[1].regret, 1);
  EXPECT_EQ(res.rows[2].rate->to_string(), "1/2");
  EXPECT_EQ(res.csv,
            "trial,scheme,sum_k,sum_n,rate,regret,decode_ok,ms\n"
            "0,offline,2,3,0.6666666667,0,true,0\n"
            "0,naive_f_k,2,4,0.5,1,true,0\n"
            "0,naive_f_0,2,4,0.5,1,true,0\n");
}

TEST(Experiment, EmptyTraceGivesHeaderOnly) {
  const auto out = scratch("empty.csv");
  const auto cfg = ExperimentConfig::from_json(
      R"({"params":{"tau":2,"b":1,"m":2},"trace":[],"schemes":["offline"],"output":")" + out.string() + "\"}");
  const auto res = run_experiment(cfg);
  EXPECT_TRUE(res.rows.empty());
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kCsvHeader);
  EXPECT_FALSE(std::getline(in, line));
}

TEST(Experiment, OfflineNeverLosesToNaive) {
  const auto cfg = ExperimentConfig::from_json(
      R"({"params":{"tau":3,"b":2,"m":3,"t":20},"distribution":{"kind":"iid","probs":[0.2,0.3,0.2,0.3]},
          "schemes":["offline","online","naive_f_k","naive_f_0"],"samples":6,
          "loss":{"mode":"random","prob":0.3,"count":6},"trials":12,"seed":4,"threads":3})");
  const auto res = run_experiment(cfg);
  ASSERT_FALSE(res.rows.empty());
  for (std::size_t q = 0; q < res.rows.size(); q += 4) {
    const auto& off = res.rows[q];
    ASSERT_EQ(off.scheme, Scheme::offline);
    for (std::size_t r = 1; r < 4; ++r) {
      EXPECT_LE(off.sum_n, res.rows[q + r].sum_n);
      EXPECT_EQ(res.rows[q + r].sum_n - off.sum_n, res.rows[q + r].regret);
      EXPECT_TRUE(res.rows[q + r].decode_ok);
    }
  }
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
  std::string base = R"({"params":{"tau":2,"b":1,"m":2,"t":14},"distribution":{"kind":"iid","probs":[0.3,0.3,0.4]},
      "schemes":["offline","online"],"samples":5,"trials":9,"seed":8,"threads":)";
  const auto one = run_experiment(ExperimentConfig::from_json(base + "1}"));
  const auto four = run_experiment(ExperimentConfig::from_json(base + "4}"));
  EXPECT_EQ(one.csv, four.csv);
}

TEST(Experiment, HeadersCounted) {
  const auto cfg = ExperimentConfig::from_json(
      R"({"params":{"tau":2,"b":1,"m":4},"trace":[4],"schemes":["naive_f_k"],"count_headers":true})");
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.rows.size(), 1u);
  // X[4] carries S[4] and X[6] carries parity; one header symbol each.
  EXPECT_EQ(res.rows[0].sum_n, 4 + 4 + 2);
}

TEST(Decode, VerifyFlagsTamperedPacket) {
  CodeParams p;
  p.tau = 2;
  p.b = 1;
  p.t = 8;
  p.m = 2;
  const SpreadCode code(p);
  const SizeSequence k({0, 0, 0, 0, 2, 0, 0, 0, 0}, p);
  const auto s = random_messages(k, code.field(), 3);
  auto x = encode_stream(code, s, std::vector<int>{0, 0, 0, 0, 1, 0, 0, 0, 0});
  EXPECT_TRUE(verify_decoding(code, s, x, LossPattern{{{4, 1}}}).ok);
  x[6].parity[0] ^= 1;
  const auto bad = verify_decoding(code, s, x, LossPattern{{{4, 1}}});
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.detail.find("S[4]"), std::string::npos);
}
