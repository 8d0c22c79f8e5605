#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "recipfm");
  std::ostringstream out, err;
  const int code = recipfm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kEps2{"--builtin", "eps-system", "--dim", "2", "--eps", "1"};
const std::vector<std::string> kEps3{"--builtin", "eps-system", "--dim", "3", "--eps", "1"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const json* find_check(const json& doc, const std::string& name) {
  for (const auto& c : doc["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST(Cli, FlatnessPasses) {
  const Invocation r = run(cat({"check"}, cat(kEps3, {"--suite", "flatness"})));
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["schema"], "recip-fm/1");
  EXPECT_EQ(doc["seed"], 42);
  EXPECT_EQ(doc["points"].size(), 20u);
  EXPECT_TRUE(doc["pass"].get<bool>());
}

TEST(Cli, NonConstantGradingFails) {
  const Invocation r = run(cat({"check"}, cat(kEps2, {"--density", "u1*u2", "--suite", "grading-e"})));
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(json::parse(r.out)["pass"].get<bool>());
}

TEST(Cli, CoincidentVelocities) {
  const Invocation r = run({"check", "--dim", "2", "--velocity", "u1", "--velocity", "u1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("exhausted"), std::string::npos);
}

TEST(Cli, ParseErrorReportsOffset) {
  const Invocation r = run(cat({"check"}, cat(kEps2, {"--density", "u1 + foo"})));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("offset 5"), std::string::npos) << r.err;
}

TEST(Cli, BadInputs) {
  EXPECT_EQ(run({"check", "--builtin", "nope", "--dim", "2"}).code, 2);
  EXPECT_EQ(run({"check", "--builtin", "eps-system", "--dim", "2"}).code, 2);
  EXPECT_EQ(run(cat({"check"}, cat(kEps2, {"--suite", "bogus"}))).code, 2);
  EXPECT_EQ(run(cat({"check"}, cat(kEps2, {"--catalog", "nope"}))).code, 2);
  EXPECT_EQ(run(cat({"check"}, cat(kEps2, {"--catalog", "dim2-eps-1-h0"}))).code, 2);
  EXPECT_EQ(run(cat({"check"}, cat(kEps2, {"--param", "x"}))).code, 2);
  EXPECT_EQ(run(cat({"check"}, cat(kEps2, {"--points", "0"}))).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"check", "--config", "/nonexistent.json"}).code, 2);
}

TEST(Cli, Help) {
  const Invocation r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("transform"), std::string::npos);
}

TEST(Cli, TransformCatalogDensity) {
  const Invocation r = run(cat({"transform"}, cat(kEps2, {"--catalog", "dim2-eps1-h0"})));
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_LE(find_check(doc, "curvature")->at("max_abs").get<double>(), 1e-8);
  EXPECT_TRUE(doc["probe"].contains("velocities"));
}

TEST(Cli, TransformNonDensityFails) {
  const Invocation r = run(cat({"transform"}, cat(kEps2, {"--density", "u1*u2"})));
  ASSERT_EQ(r.code, 1) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_GT(find_check(doc, "curvature")->at("max_abs").get<double>(), 1e-3);
}

TEST(Cli, TransformBiflat) {
  const Invocation r = run(cat({"transform"}, cat(kEps3, {"--catalog", "dim3-eps1-flatcoord", "--biflat"})));
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_TRUE(doc["biflat"]["pass"].get<bool>());
  EXPECT_NEAR(doc["biflat"]["h"].get<double>(), 0.0, 1e-10);
  EXPECT_NEAR(doc["biflat"]["k"].get<double>(), -2.0, 1e-8);
  EXPECT_LE(find_check(doc, "dual/curvature")->at("max_abs").get<double>(), 1e-8);
}

TEST(Cli, Orbit) {
  const Invocation r = run(cat({"orbit"}, cat(kEps2, {"--gen0", "1/(u2-u1)", "--composite", "exp(u1)/(u2-u1)", "--points", "5"})));
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_LE(find_check(doc, "christoffel")->at("max_abs").get<double>(), 1e-10);
  EXPECT_NEAR(doc["gradings"]["h1"].get<double>(), 1.0, 1e-8);
  EXPECT_EQ(run(cat({"orbit"}, cat(kEps2, {"--gen0", "1/(u2-u1)"}))).code, 2);
}

TEST(Cli, Darboux) {
  const std::vector<std::string> frame{"--dim", "2", "--beta", "1,2:1/(u1-u2)", "--beta", "2,1:1/(u2-u1)", "--lame",
                                       "1:pow(u1-u2,-1)", "--lame", "2:pow(u1-u2,-1)", "--d", "1"};
  const Invocation r = run(cat(cat({"darboux"}, frame), {"--density", "1/(u2-u1)"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_LE(find_check(doc, "after")->at("max_abs").get<double>(), 1e-9);
  EXPECT_NEAR(doc["d_transformed"].get<double>(), 0.0, 1e-10);
  const Invocation bad = run(cat(cat({"darboux"}, frame), {"--density", "u1+u2"}));
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("precondition"), std::string::npos);
  EXPECT_EQ(run(cat(cat({"check"}, frame), {"--suite", "darboux"})).code, 0);
}

TEST(Cli, DeterministicAndSeeded) {
  const auto args = cat({"transform"}, cat(kEps2, {"--catalog", "dim2-eps1-h1"}));
  const Invocation a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const Invocation c = run(cat(args, {"--seed", "43"}));
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, ConfigFileAndOutput) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto cfg = dir / "recipfm_test_cfg.json";
  const auto out = dir / "recipfm_test_out.json";
  std::ofstream(cfg) << R"({"builtin": "eps-system", "dim": 2, "eps": 1, "density": "u1*u2", "suite": ["grading-e"]})";
  const Invocation r = run({"check", "--config", cfg.string(), "--output", out.string(), "--summary"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  std::ifstream f(out);
  const json doc = json::parse(f);
  EXPECT_EQ(doc["inputs"]["density"]["expr"], "u1*u2");
  // command-line values override the file
  const Invocation s = run({"check", "--config", cfg.string(), "--density", "1/(u2-u1)"});
  EXPECT_EQ(s.code, 0) << s.err;
  std::ofstream(cfg) << R"({"nope": 1})";
  EXPECT_EQ(run({"check", "--config", cfg.string()}).code, 2);
  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}
