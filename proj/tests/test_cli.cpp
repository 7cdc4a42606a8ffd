#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "uphill/cli.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "uphill");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    return uphill::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("uphill_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string out(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveWritesCsvAndJson) {
    const int rc = run_cli({"solve", "--beta", "1.25", "--epsilon", "0.025", "--dx", "0.05", "--mu0", "0.6", "--out",
                            out("run1"), "--check", "all"});
    EXPECT_EQ(rc, 0);
    const std::string csv = slurp(out("run1") + ".csv");
    EXPECT_EQ(csv.rfind("x,m,h,current\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1602);
    const auto rep = uphill::cli::json::parse(slurp(out("run1") + ".json"));
    EXPECT_TRUE(rep["uphill"].get<bool>());
    EXPECT_GT(rep["report"]["j"].get<double>(), 0.0);
    EXPECT_EQ(rep["grid"]["kernel"].get<std::string>(), uphill::PolynomialKernel{}.name);
    EXPECT_EQ(rep["csv_sha256"].get<std::string>(), uphill::cli::sha256_hex(csv));
    for (const auto& [name, c] : rep["checks"].items()) EXPECT_TRUE(c["pass"].get<bool>()) << name;
}

TEST_F(CliTest, UphillFlagMatchesInvariant) {
    const auto m_of = [](const std::string& row) {
        const auto a = row.find(',');
        return std::stod(row.substr(a + 1, row.find(',', a + 1) - a - 1));
    };
    for (const std::string& j : {std::string("0"), std::string("")}) {
        std::vector<std::string> args{"solve", "--mu0", "0.65", "--out", out("b")};
        if (!j.empty()) args.insert(args.end(), {"--j", j});
        ASSERT_EQ(run_cli(args), 0);
        const auto rep = uphill::cli::json::parse(slurp(out("b") + ".json"));
        std::istringstream rows(slurp(out("b") + ".csv"));
        std::string line, first, last;
        std::getline(rows, line);
        std::getline(rows, first);
        while (std::getline(rows, line)) last = line;
        const bool expected = rep["report"]["j"].get<double>() > 0.0 && m_of(last) > m_of(first);
        EXPECT_EQ(rep["uphill"].get<bool>(), expected);
        EXPECT_EQ(expected, j.empty());
    }
}

TEST_F(CliTest, RejectsSubcriticalBeta) {
    testing::internal::CaptureStderr();
    const int rc = run_cli({"solve", "--beta", "0.9", "--mu0", "0.6", "--out", out("x")});
    const std::string err = testing::internal::GetCapturedStderr();
    EXPECT_NE(rc, 0);
    EXPECT_NE(err.find("beta must exceed 1"), std::string::npos) << err;
}

TEST_F(CliTest, Determinism) {
    for (const char* sub : {"a", "b"}) {
        fs::create_directories(dir_ / sub);
        const fs::path prev = fs::current_path();
        fs::current_path(dir_ / sub);
        EXPECT_EQ(run_cli({"solve", "--mu0", "0.6", "--out", "run"}), 0);
        fs::current_path(prev);
    }
    EXPECT_EQ(slurp(dir_ / "a" / "run.csv"), slurp(dir_ / "b" / "run.csv"));
    EXPECT_EQ(slurp(dir_ / "a" / "run.json"), slurp(dir_ / "b" / "run.json"));
}

TEST_F(CliTest, SeedOnly) {
    EXPECT_EQ(run_cli({"solve", "--mu0", "0.6", "--seed-only", "--out", out("seed")}), 0);
    const auto rep = uphill::cli::json::parse(slurp(out("seed") + ".json"));
    EXPECT_EQ(rep["report"]["outer_iterations"].get<int>(), 0);
    EXPECT_GT(rep["report"]["residual"].get<double>(), 1e-4);
    // checks on an unconverged seed fail and set the exit status
    EXPECT_EQ(run_cli({"solve", "--mu0", "0.6", "--seed-only", "--check", "residual", "--out", out("seed2")}), 1);
}

TEST_F(CliTest, Shoot) {
    EXPECT_EQ(run_cli({"shoot", "--beta", "1.25", "--epsilon", "0.025", "--dx", "0.05", "--mu", "0.6", "--out",
                       out("run2"), "--check", "target,uphill"}),
              0);
    const auto rep = uphill::cli::json::parse(slurp(out("run2") + ".json"));
    EXPECT_GT(rep["j"].get<double>(), 0.0);
    EXPECT_TRUE(rep["monotone"].get<bool>());
}

TEST_F(CliTest, InstantonAndMacro) {
    EXPECT_EQ(run_cli({"instanton", "--half-length", "20", "--check", "all", "--out", out("inst")}), 0);
    EXPECT_EQ(run_cli({"macro", "--mu0", "0.6", "--out", out("macro")}), 0);
    const auto rep = uphill::cli::json::parse(slurp(out("macro") + ".json"));
    EXPECT_NEAR(rep["j_M"].get<double>(), 0.031786, 1e-6);
    EXPECT_NEAR(rep["M_half"].get<double>(), 0.6636, 5e-4);
}

TEST_F(CliTest, ConfigFileFlagsWin) {
    {
        std::ofstream cfg(dir_ / "run.cfg");
        cfg << "mu0=0.65\nepsilon=0.05\n";
    }
    EXPECT_EQ(run_cli({"solve", "--config", (dir_ / "run.cfg").string(), "--mu0", "0.6", "--out", out("c")}), 0);
    const auto rep = uphill::cli::json::parse(slurp(out("c") + ".json"));
    EXPECT_EQ(rep["flags"]["mu0"].get<double>(), 0.6);
    EXPECT_EQ(rep["flags"]["epsilon"].get<double>(), 0.05);
}

TEST_F(CliTest, Sweep) {
    EXPECT_EQ(run_cli({"solve", "--sweep", "mu0=0.6,0.65", "--epsilon", "0.05", "--out", out("s")}), 0);
    EXPECT_TRUE(fs::exists(out("s_mu00") + ".csv"));
    EXPECT_TRUE(fs::exists(out("s_mu01") + ".json"));
    EXPECT_NE(run_cli({"solve", "--sweep", "nope=1", "--out", out("s")}), 0);
}

TEST_F(CliTest, BadFlags) {
    EXPECT_NE(run_cli({"solve", "--mu0", "abc"}), 0);
    EXPECT_NE(run_cli({"solve", "--out", out("m")}), 0);  // missing --mu0
    EXPECT_NE(run_cli({"solve", "--mu0", "0.6", "--check", "bogus", "--out", out("m")}), 0);
    EXPECT_NE(run_cli({}), 0);
}
