#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <unistd.h>

#include "relbell/cli.hpp"

using namespace relbell;
namespace fs = std::filesystem;

namespace
{

constexpr double pi = std::numbers::pi;

class CliTest : public ::testing::Test
{
  protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("relbell_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(std::string const& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "relbell");
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    report::CsvTable csv(std::string const& name) const
    {
        return report::parse_csv(report::read_file(path(name)));
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

double ideal_F(double theta) { return std::abs(1 + 2 * std::cos(2 * theta) - std::cos(4 * theta)); }

} // namespace

TEST_F(CliTest, ChshIdealCurve)
{
    ASSERT_EQ(run({"chsh", "--alpha", "0", "--width", "0", "--theta-steps", "181", "--out", path("c.csv")}), 0);
    std::string const text = report::read_file(path("c.csv"));
    EXPECT_EQ(text.substr(0, text.find('\n')), "theta_rad,F,E_00,E_0m,E_p0,E_pm,est_error");
    EXPECT_EQ(text.find('\r'), std::string::npos);

    auto const t = report::parse_csv(text);
    ASSERT_EQ(t.rows.size(), 181u);
    EXPECT_EQ(t.rows[60][0], "0.523598775598");
    EXPECT_NEAR(std::stod(t.rows[60][1]), 2.5, 1e-11);
    for (auto const& row : t.rows)
        EXPECT_NEAR(std::stod(row[1]), ideal_F(std::stod(row[0])), 1e-10);

    auto const m = report::Manifest::parse(report::read_file(report::manifest_path(path("c.csv"))));
    EXPECT_EQ(m.get("data_file"), path("c.csv"));
    EXPECT_EQ(m.get("command"), "chsh");
    EXPECT_EQ(m.get("converged"), "true");
    EXPECT_NO_THROW(m.get("wall_clock_seconds"));
    EXPECT_NO_THROW(m.get("max_est_error"));
}

TEST_F(CliTest, UsageErrors)
{
    EXPECT_EQ(run({"chsh", "--theta-steps", "0", "--out", path("x.csv")}), 1);
    EXPECT_EQ(run({"chsh", "--width", "-0.5", "--out", path("x.csv")}), 1);
    EXPECT_EQ(run({"chsh", "--theta-min", "1", "--theta-max", "0.5", "--out", path("x.csv")}), 1);
    EXPECT_EQ(run({"nosuchcommand"}), 1);
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"oracle", "--samples", "10"}), 1);
    EXPECT_EQ(run({"oracle", "--particle", "B", "--alpha", "1", "--samples", "10000", "--out", path("o.csv")}), 1);
    EXPECT_FALSE(fs::exists(path("x.csv")));
    EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, ChshMatchesLibrary)
{
    ASSERT_EQ(run({"chsh", "--alpha", "-2", "--width", "0.6", "--theta-steps", "13", "--out", path("c.csv")}), 0);
    auto const t = csv("c.csv");
    auto const curve = chsh_curve(uniform_grid(0, pi / 2, 13), -2.0, 0.6);
    ASSERT_EQ(t.rows.size(), 13u);
    for (std::size_t i = 0; i < 13; ++i) {
        EXPECT_NEAR(std::stod(t.rows[i][1]), curve.points[i].F, 1e-11);
        EXPECT_NEAR(std::stod(t.rows[i][5]), curve.points[i].E[3], 1e-11);
    }
}

TEST_F(CliTest, NonConvergenceExitCode)
{
    EXPECT_EQ(run({"chsh", "--alpha", "-4", "--width", "1.0", "--theta-steps", "3", "--radial-nodes", "4",
                   "--azimuthal-nodes", "4", "--out", path("c.csv")}),
              2);
    EXPECT_NE(err_.str().find("did not converge"), std::string::npos);
}

TEST_F(CliTest, CsvRoundTrip)
{
    ASSERT_EQ(run({"chsh", "--alpha", "1", "--width", "0.3", "--theta-steps", "9", "--out", path("c.csv")}), 0);
    for (auto const& row : csv("c.csv").rows)
        for (auto const& cell : row)
            EXPECT_EQ(report::fmt_num(std::stod(cell)), cell);
}

TEST_F(CliTest, ManifestReplayIsByteIdentical)
{
    ASSERT_EQ(run({"chsh", "--alpha", "-1", "--width", "0.6", "--theta-steps", "7", "--out", path("c.csv")}), 0);
    std::string const first = report::read_file(path("c.csv"));
    auto const m = report::Manifest::parse(report::read_file(report::manifest_path(path("c.csv"))));
    fs::remove(path("c.csv"));

    auto const args = report::split_command_line(m.get("command_line"));
    std::ostringstream o, e;
    ASSERT_EQ(cli::run(args, o, e), 0);
    EXPECT_EQ(report::read_file(path("c.csv")), first);
}

TEST_F(CliTest, Fig1)
{
    ASSERT_EQ(run({"fig1", "--theta-steps", "4", "--out", path("f1.csv"), "--plot"}), 0);
    auto const t = csv("f1.csv");
    ASSERT_EQ(t.rows.size(), 16u);
    EXPECT_EQ(t.header[2], "F_alpha15");
    double prev = 10;
    for (auto const& row : t.rows) {
        double const w = std::stod(row[0]), th = std::stod(row[1]);
        EXPECT_LT(std::stod(row[4]), 1e-6);  // saturation gap
        if (w == 0) {
            EXPECT_NEAR(std::stod(row[2]), ideal_F(th), 1e-10);
        }
        if (std::abs(th - pi / 6) < 1e-9) {
            EXPECT_LT(std::stod(row[2]), prev);
            prev = std::stod(row[2]);
        }
    }
    std::string const svg = report::read_file(path("f1.csv.svg"));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("polyline"), std::string::npos);
}

TEST_F(CliTest, Fig2OrderedByAlpha)
{
    ASSERT_EQ(run({"fig2", "--theta-steps", "4", "--out", path("f2.csv")}), 0);
    auto const t = csv("f2.csv");
    ASSERT_EQ(t.rows.size(), 24u);
    double prev = 10;
    for (auto const& row : t.rows)
        if (std::abs(std::stod(row[2]) - pi / 6) < 1e-9) {
            EXPECT_LE(std::stod(row[3]), prev) << "alpha=" << row[0];
            prev = std::stod(row[3]);
        }
}

TEST_F(CliTest, Fig3)
{
    ASSERT_EQ(run({"fig3", "--theta-steps", "7", "--out", path("f3.csv")}), 0);
    auto const t = csv("f3.csv");
    EXPECT_EQ(t.header[1], "delta_F");
    bool nonzero = false;
    for (auto const& row : t.rows)
        nonzero = nonzero || std::stod(row[1]) != 0;
    EXPECT_TRUE(nonzero);

    ASSERT_EQ(run({"fig3", "--alpha", "0", "--theta-steps", "7", "--out", path("f3zero.csv")}), 0);
    for (auto const& row : csv("f3zero.csv").rows)
        EXPECT_EQ(std::stod(row[1]), 0.0);

    EXPECT_EQ(run({"fig3", "--alpha", "1e-13", "--theta-steps", "7", "--out", path("guard.csv")}), 2);
    EXPECT_FALSE(fs::exists(path("guard.csv")));
}

TEST_F(CliTest, OracleBellRunDeterministic)
{
    ASSERT_EQ(run({"oracle", "--pairs", "1000000", "--theta", "0.5236", "--seed", "7", "--out", path("b1.csv")}), 0);
    ASSERT_EQ(run({"oracle", "--pairs", "1000000", "--theta", "0.5236", "--seed", "7", "--out", path("b2.csv")}), 0);
    EXPECT_EQ(report::read_file(path("b1.csv")), report::read_file(path("b2.csv")));
    auto const m = report::Manifest::parse(report::read_file(report::manifest_path(path("b1.csv"))));
    EXPECT_NEAR(std::stod(m.get("chsh_hat")), 2.5, 5e-3);
}

TEST_F(CliTest, OracleTransferReport)
{
    ASSERT_EQ(run({"oracle", "--samples", "200000", "--alpha", "-2", "--width", "0.6", "--out", path("o.csv")}), 0);
    auto const t = csv("o.csv");
    ASSERT_EQ(t.rows.size(), 16u);
    for (auto const& row : t.rows)
        EXPECT_LT(std::stod(row[8]), 4.5) << row[0] << row[1] << row[2];
    EXPECT_NE(out_.str().find("max |quad - mc|"), std::string::npos);
}
