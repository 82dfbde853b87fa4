#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dfocast::cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dfocast_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, ForecastMatchesGoldenReport) {
  const fs::path golden = DFOCAST_GOLDEN_DIR;
  ASSERT_EQ(run({"generate", "--config", (golden / "generate_config.json").string(), "--out",
                 dir.string()}).code, 0);
  fs::copy_file(golden / "forecast_config.json", dir / "forecast_config.json");
  const auto r = run({"forecast", "--config", (dir / "forecast_config.json").string(), "--out",
                      (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "out" / "report.json"), slurp(golden / "forecast_report.json"));
}

TEST_F(CliTest, MissingInputFileExitsThreeAndNamesPath) {
  write(dir / "c.json", R"({"data": {"path": "absent.csv", "target": "y"}})");
  const auto r = run({"baseline", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("\"exit_code\":3"), std::string::npos) << r.err;
}

TEST_F(CliTest, BaselineOnConstantSeriesIsAllZero) {
  std::string csv = "t,y\n";
  for (int i = 0; i < 50; ++i) csv += std::to_string(i) + ",4.5\n";
  write(dir / "flat.csv", csv);
  write(dir / "c.json", R"({"data": {"path": "flat.csv", "target": "y"}, "horizons": [1, 2]})");
  const auto r = run({"baseline", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string report = slurp(dir / "o" / "report.json");
  for (const char* key : {"maape", "nrmse", "mae", "rmse", "huber"}) {
    std::size_t pos = 0;
    int seen = 0;
    while ((pos = report.find(std::string("\"") + key + "\": ", pos)) != std::string::npos) {
      pos += std::string(key).size() + 4;
      EXPECT_EQ(report.substr(pos, 3), "0.0") << key;
      EXPECT_FALSE(std::isdigit(static_cast<unsigned char>(report[pos + 3]))) << key;
      ++seen;
    }
    EXPECT_EQ(seen, 2) << key;
  }
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  write(dir / "data.csv", "y\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
  write(dir / "unknown.json", R"({"data": {"path": "data.csv", "target": "y"}, "horizonz": [1]})");
  write(dir / "type.json", R"({"data": {"path": "data.csv", "target": "y"}, "horizons": "1"})");
  write(dir / "nested.json", R"({"data": {"path": "data.csv", "target": "y", "sep": ";"}})");
  write(dir / "broken.json", "{");
  for (const char* name : {"unknown.json", "type.json", "nested.json", "broken.json"}) {
    const auto r = run({"baseline", "--config", (dir / name).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2) << name << ": " << r.err;
    EXPECT_EQ(r.err.rfind("{\"error\":", 0), 0u) << r.err;
  }
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, BadCellExitsThree) {
  write(dir / "data.csv", "y\n1\n2\nNaN\n4\n5\n6\n");
  write(dir / "c.json", R"({"data": {"path": "data.csv", "target": "y"}})");
  const auto r = run({"baseline", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, SeedFlagOverridesConfigAndIsRecorded) {
  write(dir / "g.json", R"({"kind": "seasonal", "length": 100, "seed": 1})");
  ASSERT_EQ(run({"generate", "--config", (dir / "g.json").string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"generate", "--config", (dir / "g.json").string(), "--seed", "2", "--out",
                 (dir / "b").string()}).code, 0);
  EXPECT_NE(slurp(dir / "a" / "data.csv"), slurp(dir / "b" / "data.csv"));
  EXPECT_NE(slurp(dir / "b" / "report.json").find("\"seed\": 2"), std::string::npos);
}
