// Drives the built command-line tool through the shell.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace symphonic;
namespace fs = std::filesystem;

namespace {

const std::string sphere = "--mode join --m1 3 --m2 3 --a 1 --b 1 --c 1 --d 1 --norm1 3 --norm2 3";
const std::string asymmetric = "--mode join --m1 3 --m2 4 --a 1 --b 1.2 --c 1 --d 0.8 --norm1 3 --norm2 4";

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::path(SYMPHONIC_SCRATCH) / info->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(const std::string& args, const std::string& env = "") const {
        const std::string cmd = env + " \"" + std::string(SYMPHONIC_CLI) + "\" " + args + " > \"" +
                                path("stdout.txt") + "\" 2> \"" + path("stderr.txt") + "\"";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string slurp(const std::string& file) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    json report(const std::string& prefix) const { return json::parse(slurp(path(prefix + ".report.json"))); }

    Profile profile(const std::string& prefix) const {
        std::ifstream in(path(prefix + ".profile.csv"));
        return read_profile_csv(in);
    }

    std::vector<std::vector<std::string>> table(const std::string& file) const {
        std::vector<std::vector<std::string>> out;
        std::istringstream in(slurp(file));
        std::string line;
        while (std::getline(in, line)) {
            std::vector<std::string> row;
            std::stringstream cells(line);
            std::string cell;
            while (std::getline(cells, cell, ',')) row.push_back(cell);
            out.push_back(row);
        }
        return out;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SolveSphere) {
    ASSERT_EQ(run("solve " + sphere + " --n 200 --out " + path("run1")), 0);
    EXPECT_LT(symphonic::testing::distance_to_identity(profile("run1")), 5e-3);
    const json r = report("run1");
    EXPECT_TRUE(r["converged"].get<bool>());
    EXPECT_LT(r["residual_sup"].get<double>(), 1e-3);
    EXPECT_EQ(r["n"], 200);
    EXPECT_EQ(r["mode"], "join");
    EXPECT_NE(slurp(path("stdout.txt")).find("converged=1"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("solve --mode join --m1 3 --out " + path("x")), 1);
    EXPECT_NE(slurp(path("stderr.txt")).find("m2"), std::string::npos);
    EXPECT_EQ(run("solve " + sphere + " --n 2 --out " + path("x")), 1);
    EXPECT_EQ(run("solve " + sphere + " --m1 three --out " + path("x")), 1);
    EXPECT_EQ(run("solve " + sphere), 1);  // no --out
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("solve --help"), 0);
    EXPECT_NE(slurp(path("stdout.txt")).find("default 200"), std::string::npos);
}

TEST_F(Cli, NonConvergenceExitsTwo) {
    EXPECT_EQ(run("solve " + asymmetric + " --metric gradient --max-iters 3 --out " + path("slow")), 2);
    EXPECT_FALSE(report("slow")["converged"].get<bool>());
}

TEST_F(Cli, OracleSphere) {
    ASSERT_EQ(run("oracle " + sphere + " --out " + path("o")), 0);
    const json r = report("o");
    EXPECT_LT(r["sup_diff"].get<double>(), 5e-3);
    EXPECT_NEAR(r["s_star"].get<double>(), 1.0, 1e-4);
    EXPECT_TRUE(fs::exists(path("o.oracle.csv")));
    EXPECT_EQ(table(path("o.oracle.csv")).front(), (std::vector<std::string>{"t", "phi", "psi"}));
}

TEST_F(Cli, OracleAsymmetricAtDefaults) {
    ASSERT_EQ(run("oracle " + asymmetric + " --out " + path("o")), 0);
    EXPECT_LT(report("o")["sup_diff"].get<double>(), 2e-2);
}

TEST_F(Cli, OracleFailureCodes) {
    EXPECT_EQ(run("oracle " + sphere + " --slope-lo 100 --slope-hi 200 --out " + path("b")), 2);
    EXPECT_EQ(run("oracle " + asymmetric + " --xcheck-tol 1e-9 --out " + path("x")), 3);
    EXPECT_FALSE(report("x")["xcheck_passed"].get<bool>());
}

TEST_F(Cli, ResidualReproducesSolveStatistics) {
    ASSERT_EQ(run("solve " + asymmetric + " --n 300 --out " + path("run")), 0);
    ASSERT_EQ(run("residual --config " + path("run.report.json") + " " + path("run.profile.csv") + " --out " +
                  path("check")),
              0);
    const json a = report("run"), b = report("check");
    EXPECT_EQ(a["residual_sup"].get<double>(), b["residual_sup"].get<double>());
    EXPECT_EQ(a["j_value"].get<double>(), b["j_value"].get<double>());
}

TEST_F(Cli, ResidualOfHandWrittenProfile) {
    {
        std::ofstream out(path("identity.profile.csv"));
        out << "t,phi,phi_prime,residual\n";
        for (int i = 0; i <= 1000; ++i) {
            const double t = i == 1000 ? half_pi : half_pi * i / 1000.0;
            out << format_double(t) << ',' << format_double(t) << ",1,0\n";
        }
    }
    ASSERT_EQ(run("residual " + sphere + " " + path("identity.profile.csv")), 0);
    const std::string text = slurp(path("stdout.txt"));
    const auto pos = text.find("residual_sup=");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_LT(std::stod(text.substr(pos + 13)), 1e-6);

    {
        std::ofstream out(path("bad.profile.csv"));
        out << "t,phi,phi_prime,residual\n";
        for (int i = 0; i <= 10; ++i) {
            const double t = half_pi * i / 10.0;
            out << format_double(t) << ',' << format_double(i == 0 ? 0.1 : t) << ",1,0\n";
        }
    }
    EXPECT_EQ(run("residual " + sphere + " " + path("bad.profile.csv")), 1);
    EXPECT_EQ(run("residual " + sphere + " " + path("missing.csv")), 1);
}

TEST_F(Cli, SweepAlongB) {
    ASSERT_EQ(run("sweep " + sphere + " --axis b --lo 1 --hi 2 --count 5 --out " + path("s")), 0);
    const auto rows = table(path("s.sweep.csv"));
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"axis_value", "j_value", "residual_sup", "converged", "status"}));
    std::vector<double> j;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(std::stod(rows[i][0]), 1.0 + 0.25 * (i - 1));
        EXPECT_EQ(rows[i][3], "1");
        j.push_back(std::stod(rows[i][1]));
    }
    for (std::size_t i = 1; i < j.size(); ++i) {
        const double ratio = j[i] / j[i - 1];
        EXPECT_LT(ratio, 10.0);
        EXPECT_GT(ratio, 0.1);
    }
}

TEST_F(Cli, SweepWithOracleAndThreads) {
    const std::string args = "sweep " + sphere + " --axis norm1 --values 2.5,3,3.5 --with-oracle --n 100 --out ";
    ASSERT_EQ(run(args + path("one"), "SYMPHONIC_THREADS=1"), 0);
    ASSERT_EQ(run(args + path("many"), "SYMPHONIC_THREADS=3"), 0);
    EXPECT_EQ(slurp(path("one.sweep.csv")), slurp(path("many.sweep.csv")));
    const auto rows = table(path("one.sweep.csv"));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0][4], "s_star");
    EXPECT_NEAR(std::stod(rows[2][4]), 1.0, 1e-4);
}

TEST_F(Cli, SweepUsageErrors) {
    EXPECT_EQ(run("sweep " + sphere + " --axis b --lo 1 --hi 2 --count 1 --out " + path("s")), 1);
    EXPECT_EQ(run("sweep " + sphere + " --axis mode --values 1,2 --out " + path("s")), 1);
    EXPECT_EQ(run("sweep " + sphere + " --axis n --values 10,20 --out " + path("s")), 1);
    EXPECT_EQ(run("sweep " + sphere + " --axis m1 --values 2,2.5 --out " + path("s")), 1);
    EXPECT_EQ(run("sweep " + sphere + " --axis b --out " + path("s")), 1);
    EXPECT_EQ(run("sweep " + sphere + " --axis b --values 1 --out " + path("s")), 1);
}

TEST_F(Cli, SweepRecordsFailedRows) {
    EXPECT_EQ(run("sweep " + sphere + " --axis b --values 1,-1 --out " + path("s")), 2);
    const auto rows = table(path("s.sweep.csv"));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].back(), "ok");
    EXPECT_EQ(rows[2].back(), "invalid");
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
    const std::string args = "solve " + asymmetric + " --init random --seed 7 --n 150 --out ";
    ASSERT_EQ(run(args + path("a")), 0);
    ASSERT_EQ(run(args + path("b")), 0);
    EXPECT_EQ(slurp(path("a.profile.csv")), slurp(path("b.profile.csv")));
    EXPECT_EQ(slurp(path("a.report.json")), slurp(path("b.report.json")));
}

TEST_F(Cli, ConfigFileMergesUnderFlags) {
    {
        std::ofstream out(path("cfg.json"));
        out << R"({"mode": "join", "m1": 3, "m2": 3, "a": 1, "b": 1, "c": 1, "d": 1,
                   "norm1": 3, "norm2": 3, "n": 64, "grad_tol": 1e-9})";
    }
    ASSERT_EQ(run("solve --config " + path("cfg.json") + " --n 80 --out " + path("m")), 0);
    const json r = report("m");
    EXPECT_EQ(r["n"], 80);
    EXPECT_EQ(r["grad_tol"], 1e-9);
    EXPECT_EQ(r["m1"], 3);

    {
        std::ofstream out(path("bad.json"));
        out << R"({"mode": "join", "m1": 3, "m2": 3, "a": 1, "b": 1, "c": 1, "d": 1,
                   "norm1": 3, "norm2": 3, "tolerance": 1})";
    }
    EXPECT_EQ(run("solve --config " + path("bad.json") + " --out " + path("m2")), 1);
    {
        std::ofstream out(path("broken.json"));
        out << "{ not json";
    }
    EXPECT_EQ(run("solve --config " + path("broken.json") + " --out " + path("m3")), 1);
}
