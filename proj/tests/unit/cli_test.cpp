// Copyright 2026 The slsctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "slsctl/problem_io.hpp"

namespace slsctl::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kTwoMode = fs::path(SLSCTL_FIXTURE_DIR) / "two_mode.json";

struct CliTest : ::testing::Test {
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("slsctl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int call(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return run(args, out, err);
  }

  fs::path write(const std::string& name, const nlohmann::json& doc) {
    const auto p = dir / name;
    save_json(p, doc);
    return p;
  }

  fs::path dir;
  std::ostringstream out;
  std::ostringstream err;
};

TEST_F(CliTest, ExactWritesSolutionAndCache) {
  const auto sol = dir / "sol.json";
  const auto cache = dir / "h.bin";
  ASSERT_EQ(call({"exact", "--input", kTwoMode.string(), "--out", sol.string(), "--cache", cache.string()}), kOk)
      << err.str();
  EXPECT_TRUE(fs::exists(cache));
  const auto doc = load_json(sol);
  EXPECT_EQ(doc.at("sigma"), nlohmann::json({1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1}));
  EXPECT_NEAR(doc.at("cost").get<double>(), 8.526511065815193, 1e-8);
  EXPECT_FALSE(doc.at("cache_hit").get<bool>());

  const auto problem = load_problem(kTwoMode);
  EXPECT_TRUE(is_dynamics_consistent(problem.system, trajectory_from_json(doc)));

  ASSERT_EQ(call({"exact", "--input", kTwoMode.string(), "--out", sol.string(), "--cache", cache.string()}), kOk);
  EXPECT_TRUE(load_json(sol).at("cache_hit").get<bool>());
}

TEST_F(CliTest, InputErrorsExitOne) {
  EXPECT_EQ(call({"exact", "--input", (dir / "missing.json").string()}), kInputError);
  EXPECT_FALSE(err.str().empty());
  auto doc = load_json(kTwoMode);
  doc["extra"] = 1;
  EXPECT_EQ(call({"exact", "--input", write("bad.json", doc).string()}), kInputError);
  EXPECT_EQ(call({"relaxed", "--input", kTwoMode.string(), "--settings",
                  write("s.json", nlohmann::json{{"gamma3", 1}}).string()}),
            kInputError);
  EXPECT_EQ(call({"frobnicate"}), kInputError);
  EXPECT_EQ(call({"exact"}), kInputError);
  std::ofstream(dir / "garbage.json") << "{not json";
  EXPECT_EQ(call({"exact", "--input", (dir / "garbage.json").string()}), kInputError);
}

TEST_F(CliTest, CapacityErrorExitsTwo) {
  auto doc = load_json(kTwoMode);
  doc["modes"].push_back(doc["modes"][0]);
  doc["modes"][2]["A"][0][0] = 0.3;
  doc["N"] = 40;
  EXPECT_EQ(call({"exact", "--input", write("big.json", doc).string(), "--dedupe-tol", "0"}), kCapacityError);
}

TEST_F(CliTest, RelaxedReportsAndRoundTrips) {
  const auto rep = dir / "rel.json";
  ASSERT_EQ(call({"relaxed", "--input", kTwoMode.string(), "--out", rep.string()}), kOk) << err.str();
  const auto doc = load_json(rep);
  EXPECT_EQ(doc.at("solver"), "relaxed");
  EXPECT_TRUE(doc.contains("block_norms"));
  EXPECT_TRUE(doc.contains("stationarity_residual"));
  const auto problem = load_problem(kTwoMode);
  EXPECT_TRUE(is_dynamics_consistent(problem.system, trajectory_from_json(doc)));
}

TEST_F(CliTest, NonConvergenceIsSoft) {
  const auto rep = dir / "rel.json";
  const auto settings = write("s.json", nlohmann::json{{"solver", {{"max_iters", 2}}}});
  ASSERT_EQ(call({"relaxed", "--input", kTwoMode.string(), "--settings", settings.string(), "--out", rep.string()}),
            kOk);
  EXPECT_FALSE(load_json(rep).at("converged").get<bool>());
}

TEST_F(CliTest, CompareOnZeroStateReportsZeroError) {
  auto doc = load_json(kTwoMode);
  doc["x0"] = {0.0, 0.0};
  const auto rep = dir / "cmp.json";
  ASSERT_EQ(call({"compare", "--input", write("zero.json", doc).string(), "--out", rep.string()}), kOk)
      << err.str();
  const auto cmp = load_json(rep);
  EXPECT_EQ(cmp.at("relative_error").get<double>(), 0.0);
  EXPECT_EQ(cmp.at("exact").at("cost").get<double>(), 0.0);
  EXPECT_EQ(cmp.at("hamming").get<int>(), 0);
}

TEST_F(CliTest, SingleModeRelaxedMatchesExact) {
  auto doc = load_json(kTwoMode);
  doc["modes"].erase(1);
  const auto rep = dir / "cmp.json";
  ASSERT_EQ(call({"compare", "--input", write("q1.json", doc).string(), "--out", rep.string()}), kOk);
  EXPECT_LE(std::abs(load_json(rep).at("relative_error").get<double>()), 1e-10);
}

TEST_F(CliTest, BenchSmokeRun) {
  const auto csv = dir / "b.csv";
  const auto summary = dir / "b.json";
  ASSERT_EQ(call({"bench", "--count", "1", "--seed", "3", "--no-timings", "--out", csv.string(), "--summary",
                  summary.string(), "--thresholds", "1e-5,0"}),
            kOk)
      << err.str();
  std::ifstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "id,J_opt,J_rel,eps,hamming,t_exact_ms,t_relaxed_ms");
  EXPECT_FALSE(row.empty());
  EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
  EXPECT_EQ(load_json(summary).at("threshold_table").size(), 2u);
  EXPECT_EQ(call({"bench", "--count", "1", "--preset", "nine-mode"}), kInputError);
  EXPECT_EQ(call({"bench", "--count", "1", "--thresholds", "1e-5,abc"}), kInputError);
}

TEST(ParseThresholds, Lists) {
  EXPECT_EQ(parse_thresholds("1e-5, 1e-7,0"), (std::vector<double>{1e-5, 1e-7, 0.0}));
  EXPECT_THROW((void)parse_thresholds("1e-5,,2"), std::exception);
  EXPECT_THROW((void)parse_thresholds("-1"), std::exception);
}

}  // namespace
}  // namespace slsctl::cli
