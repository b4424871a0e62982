#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "piezo/commands.hpp"
#include "piezo/config.hpp"

using namespace piezo;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("piezo_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        auto m = read_config_map(std::string(PIEZO_SOURCE_DIR) + "/configs/default.ini");
        m["grid.nx"] = "21";
        m["grid.ny"] = "9";
        m["time.t_end"] = "5";
        m["check.fit_t_lo"] = "1";
        m["check.fit_t_hi"] = "5";
        m["check.probes"] = "20";
        m["check.diss_states"] = "10";
        m["check.diss_times"] = "4";
        config_ = write(m, "small.ini");
        ::unsetenv("PIEZO_OUT_DIR");
    }
    void TearDown() override {
        ::unsetenv("PIEZO_OUT_DIR");
        fs::remove_all(dir_);
    }

    std::string write(const ConfigMap& m, const std::string& name) {
        std::ofstream os(dir_ / name);
        write_config(os, build_config(m));
        return (dir_ / name).string();
    }

    CommandOptions options(const std::string& out_name) {
        CommandOptions o;
        o.config_path = config_;
        o.out_dir = (dir_ / out_name).string();
        return o;
    }

    fs::path dir_;
    std::string config_;
    std::ostringstream out_, err_;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_F(CliTest, ValidateAdmissible) {
    EXPECT_EQ(cmd_validate(options("v"), out_, err_), exit_code::ok);
    EXPECT_NE(out_.str().find("verdict: admissible"), std::string::npos);
}

TEST_F(CliTest, ValidateInadmissibleNamesFirstCondition) {
    auto m = read_config_map(config_);
    m["model.delta"] = "0.99";
    CommandOptions o = options("v");
    o.config_path = write(m, "bad.ini");
    EXPECT_EQ(cmd_validate(o, out_, err_), exit_code::inadmissible);
    EXPECT_NE(out_.str().find("first failing condition: delta_below_sqrt_1_minus_d"), std::string::npos);
}

TEST_F(CliTest, MissingConfigIsConfigError) {
    CommandOptions o;
    o.config_path = (dir_ / "absent.ini").string();
    EXPECT_EQ(cmd_validate(o, out_, err_), exit_code::config_error);
    EXPECT_NE(err_.str().find("config error"), std::string::npos);
}

TEST_F(CliTest, SimulateWritesOutputs) {
    EXPECT_EQ(cmd_simulate(options("sim"), out_, err_), exit_code::ok) << err_.str();
    for (const char* f : {"trace.csv", "report.txt", "plot.gp"}) EXPECT_TRUE(fs::exists(dir_ / "sim" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "sim" / "trace.csv").substr(0, 2), "t,");
}

TEST_F(CliTest, SimulateDumpsOperator) {
    auto o = options("dump");
    o.dump_operator = true;
    EXPECT_EQ(cmd_simulate(o, out_, err_), exit_code::ok) << err_.str();
    EXPECT_TRUE(fs::exists(dir_ / "dump" / "operator.txt"));
}

TEST_F(CliTest, OutDirFromEnvironment) {
    CommandOptions o;
    o.config_path = config_;
    const auto env_dir = dir_ / "from_env";
    ::setenv("PIEZO_OUT_DIR", env_dir.c_str(), 1);
    EXPECT_EQ(resolve_out_dir(o, load_config(config_)), env_dir.string());
    o.out_dir = "explicit";
    EXPECT_EQ(resolve_out_dir(o, load_config(config_)), "explicit");
}

TEST_F(CliTest, CheckPrintsOneLinePerCriterion) {
    const int rc = cmd_check(options("chk"), out_, err_);
    EXPECT_TRUE(rc == exit_code::ok || rc == exit_code::check_failed) << err_.str();
    std::istringstream is(out_.str());
    std::string line;
    int verdicts = 0;
    while (std::getline(is, line))
        if (line.rfind("PASS", 0) == 0 || line.rfind("FAIL", 0) == 0) ++verdicts;
    EXPECT_EQ(verdicts, 6);
    EXPECT_EQ(rc == exit_code::ok, out_.str().find("FAIL") == std::string::npos);
}

TEST_F(CliTest, SweepWritesSummary) {
    auto o = options("sweep");
    o.axis = "model.delta";
    o.values = {"0.4", "0.99"};
    o.threads = 2;
    cmd_sweep(o, out_, err_);
    const auto csv = slurp(dir_ / "sweep" / "sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find("delta_below_sqrt_1_minus_d"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "sweep" / "run_0" / "trace.csv"));
}

TEST_F(CliTest, SweepRejectsUnknownAxis) {
    auto o = options("sweep");
    o.axis = "model.nonsense";
    o.values = {"1"};
    EXPECT_EQ(cmd_sweep(o, out_, err_), exit_code::config_error);
}

TEST_F(CliTest, RefineWritesTable) {
    EXPECT_EQ(cmd_refine(options("ref"), out_, err_), exit_code::ok) << err_.str();
    const auto csv = slurp(dir_ / "ref" / "refinement.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST_F(CliTest, BinaryExitCodes) {
    const std::string bin = PIEZO_CLI_PATH;
    EXPECT_EQ(WEXITSTATUS(std::system((bin + " validate --config " + config_ + " > /dev/null").c_str())), 0);
    EXPECT_EQ(WEXITSTATUS(std::system((bin + " validate --config /nonexistent.ini 2> /dev/null").c_str())), 2);
    EXPECT_EQ(WEXITSTATUS(std::system((bin + " frobnicate 2> /dev/null").c_str())), 2);
}
