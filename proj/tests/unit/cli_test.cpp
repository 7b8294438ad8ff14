// Copyright 2026 The safeflight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace safeflight::cli {
namespace {

const std::string kScenarios = SAFEFLIGHT_SCENARIO_DIR;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("safeflight_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(CliTest, PlanVerifyTrackExport) {
  const std::string scenario = kScenarios + "/hover.json";
  ASSERT_EQ(invoke({"plan", "--scenario", scenario, "--out", path("plan.json"), "--dump-program",
                    path("program.txt")}).code, kExitOk);
  ASSERT_TRUE(std::filesystem::exists(path("plan.json")));
  EXPECT_EQ(invoke({"verify", "--plan", path("plan.json"), "--scenario", scenario, "--report",
                    path("report.json")}).code, kExitOk);
  EXPECT_TRUE(std::filesystem::exists(path("report.json")));
  EXPECT_EQ(invoke({"track", "--plan", path("plan.json"), "--scenario", scenario, "--out",
                    path("trace.json")}).code, kExitOk);
  const Invocation exported = invoke({"export", "--trace", path("trace.json")});
  EXPECT_EQ(exported.code, kExitOk);
  EXPECT_EQ(exported.out.rfind("t,x,y,z", 0), 0u);
  const Invocation solved = invoke({"solve", "--program", path("program.txt"), "--out", path("x.txt")});
  EXPECT_EQ(solved.code, kExitOk);
}

TEST_F(CliTest, PlanIsDeterministic) {
  const std::string scenario = kScenarios + "/hover.json";
  const Invocation a = invoke({"plan", "--scenario", scenario});
  const Invocation b = invoke({"plan", "--scenario", scenario});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, BadInputsMapToExitCodes) {
  EXPECT_EQ(invoke({"plan", "--scenario", path("missing.json")}).code, kExitParse);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitParse);
  EXPECT_EQ(invoke({}).code, kExitParse);
  {
    std::ofstream f(path("junk.json"));
    f << "{\"version\": 1, \"knots\": 3}";
  }
  const Invocation r = invoke({"plan", "--scenario", path("junk.json")});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, InfeasibleScenarioExitsThree) {
  EXPECT_EQ(invoke({"plan", "--scenario", kScenarios + "/example1.json"}).code, kExitInfeasible);
}

}  // namespace
}  // namespace safeflight::cli
