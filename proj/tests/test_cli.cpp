#include "betaexp/cli.hpp"
#include "betaexp/numeric_core.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

using betaexp::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

}  // namespace

TEST(Cli, RootsTablesAreStable) {
  const auto a = call({"roots", "--reproduce-tables"});
  const auto b = call({"roots", "--reproduce-tables"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("1.07445"), std::string::npos);
  EXPECT_NE(a.out.find("1.61575"), std::string::npos);
  EXPECT_NE(a.out.find("P3 = x⁵−x−1"), std::string::npos);
}

TEST(Cli, RootsCsv) {
  const auto r = call({"roots", "--reproduce-tables", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("table,m,value,polynomials\n", 0), 0u);
  EXPECT_NE(r.out.find("omega,1,1.07445,"), std::string::npos);
  EXPECT_NE(r.out.find("lambda,100,1.61803,"), std::string::npos);
}

TEST(Cli, RootsRecordsAreJson) {
  const auto r = call({"roots", "--m", "1,2", "--format", "records"});
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_FALSE(rows.empty());
  for (const auto& j : rows) EXPECT_TRUE(j.contains("record"));
}

TEST(Cli, CountWithOracle) {
  const auto r = call({"count", "--beta", "1.5", "--x", "1", "--k", "10", "--oracle", "--format", "records"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front()["count"], 28);
}

TEST(Cli, CountAcceptsSymbolicBeta) {
  const auto r = call({"count", "--beta", "omega:1", "--x", "1", "--k", "8"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(static_cast<double>(betaexp::cli::resolve_real("lambda:1")), 1.3247179572, 1e-9);
  EXPECT_THROW(betaexp::cli::resolve_real("omega:x"), std::exception);
}

TEST(Cli, GenerateAuditsCleanly) {
  const auto r = call({"generate", "--beta", "1.07", "--x", "1", "--mode", "m", "--m", "1", "--format", "records"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows.front()["record"], "generator_run");
  const auto s3 = call({"generate", "--beta", "1.3", "--x", "0.7", "--mode", "s3", "--m", "1"});
  EXPECT_EQ(s3.code, 0) << s3.err;
}

TEST(Cli, GenerateRejectsBetaAboveThreshold) {
  const auto r = call({"generate", "--beta", "1.2", "--x", "1", "--mode", "m", "--m", "1"});
  EXPECT_EQ(r.code, 2);
  const auto diag = nlohmann::json::parse(r.err);
  EXPECT_EQ(diag["record"], "error");
  EXPECT_EQ(diag["exit_code"], 2);
}

TEST(Cli, BoundsFormats) {
  for (const char* fmt : {"table", "csv", "records"}) {
    const auto r = call({"bounds", "--beta", "1.5", "--format", fmt});
    EXPECT_EQ(r.code, 0) << fmt << r.err;
    EXPECT_FALSE(r.out.empty());
  }
  const auto rec = lines(call({"bounds", "--beta", "1.5", "--format", "records"}).out);
  EXPECT_DOUBLE_EQ(rec.front()["kappa"].get<double>(), 0.125);
}

TEST(Cli, Growth) {
  const auto r = call({"growth", "--beta", "1.3", "--x", "1.2", "--k-min", "8", "--k-max", "14", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("k,log2_count,slope\n", 0), 0u);
}

TEST(Cli, BernoulliInterval) {
  const auto r = call({"bernoulli", "--beta", "1.5", "--interval", "0.4:0.6", "--depth", "24", "--format", "records"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_FALSE(rows.empty());
  EXPECT_NEAR(rows.front()["value"].get<double>(), 0.1055, 1e-3);
  const auto mc = call({"bernoulli", "--beta", "1.5", "--interval", "0.4:0.6", "--method", "monte-carlo",
                        "--samples", "20000", "--seed", "3"});
  EXPECT_EQ(mc.code, 0) << mc.err;
}

TEST(Cli, BernoulliLocalDimension) {
  const auto r = call({"bernoulli", "--beta", "1.5", "--x", "1", "--radii", "8:14"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"count", "--beta", "1.5"}).code, 2);
  EXPECT_EQ(call({"count", "--beta", "2.5", "--x", "1", "--k", "4"}).code, 2);
  EXPECT_EQ(call({"count", "--beta", "1.5", "--x", "7", "--k", "4"}).code, 2);
  EXPECT_EQ(call({"bounds", "--beta", "abc"}).code, 2);
  EXPECT_EQ(call({"roots", "--format", "xml"}).code, 2);
  EXPECT_EQ(call({"bernoulli", "--beta", "1.5", "--interval", "0:1", "--depth", "60"}).code, 2);
}

TEST(Cli, PrecisionFromEnvironment) {
  ::setenv("BETAEXP_PRECISION_BITS", "200", 1);
  const auto bad = call({"count", "--beta", "1.5", "--x", "1", "--k", "4"});
  ::unsetenv("BETAEXP_PRECISION_BITS");
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(call({"count", "--beta", "1.5", "--x", "1", "--k", "4", "--precision-bits", "128"}).code, 0);
}
