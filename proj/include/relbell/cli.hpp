#ifndef RELBELL_CLI_HPP
#define RELBELL_CLI_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relbell/correlator.hpp"
#include "relbell/oracle.hpp"
#include "relbell/report.hpp"

// Command-line front end. run() is the whole program minus main(), so tests
// can drive it in-process.

namespace relbell::cli
{

inline constexpr char const* tool_version = "1.0.0";

enum ExitCode : int
{
    ok = 0,
    usage_error = 1,
    numerics_error = 2,
};

// alpha -> "infinity" is realized at this rapidity; the second one checks saturation.
inline constexpr double saturated_alpha = 15.0;
inline constexpr double saturation_check_alpha = 20.0;
inline constexpr double saturation_tol = 1e-6;
inline constexpr std::array<double, 4> fig1_widths{0.0, 0.3, 0.6, 1.0};
inline constexpr std::array<double, 6> fig2_alphas{2.0, 1.0, 0.0, -1.0, -2.0, -4.0};
inline constexpr double iss_alpha = 2.6e-5;
inline constexpr double iss_width = 1e-3;

namespace detail
{

struct QuadFlags
{
    int radial{64};
    int azimuthal{64};
    double r_max{8.0};
    double tol{1e-13};

    void add_to(CLI::App& app)
    {
        app.add_option("--radial-nodes", radial, "Gauss-Legendre radial nodes (before doubling)")
            ->check(CLI::PositiveNumber);
        app.add_option("--azimuthal-nodes", azimuthal, "Trapezoid azimuthal nodes (before doubling)")
            ->check(CLI::PositiveNumber);
        app.add_option("--r-max", r_max, "Radial cutoff in packet widths")->check(CLI::PositiveNumber);
        app.add_option("--tol", tol, "Target quadrature error")->check(CLI::PositiveNumber);
    }

    [[nodiscard]] QuadratureSpec spec() const { return {radial, azimuthal, r_max, tol}; }

    void record(report::Manifest& m) const
    {
        m.set("radial_nodes", std::to_string(radial));
        m.set("azimuthal_nodes", std::to_string(azimuthal));
        m.set("r_max_in_widths", r_max);
        m.set("target_tol", tol);
    }
};

struct GridFlags
{
    double min{0.0};
    double max{std::numbers::pi / 2};
    int steps{181};

    void add_to(CLI::App& app)
    {
        app.add_option("--theta-min", min, "First analyzer angle (radians)");
        app.add_option("--theta-max", max, "Last analyzer angle (radians)");
        app.add_option("--theta-steps", steps, "Number of grid points")->check(CLI::PositiveNumber);
    }

    [[nodiscard]] std::vector<double> grid() const
    {
        if (steps > 1 && !(max > min))
            throw std::invalid_argument("--theta-max must exceed --theta-min");
        return uniform_grid(min, max, steps);
    }

    void record(report::Manifest& m) const
    {
        m.set("theta_min", min);
        m.set("theta_max", max);
        m.set("theta_steps", std::to_string(steps));
    }
};

struct OutputFlags
{
    std::string out;
    bool plot{false};
    bool degrees{false};
    unsigned jobs{1};

    void add_to(CLI::App& app, std::string default_out)
    {
        out = std::move(default_out);
        app.add_option("--out", out, "CSV output path");
        app.add_flag("--plot", plot, "Also write an SVG plot next to the CSV");
        app.add_flag("--degrees", degrees, "Label plot angles in degrees");
        app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    }

    [[nodiscard]] std::string svg_path() const { return out + ".svg"; }
};

class Clock
{
  public:
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_{std::chrono::steady_clock::now()};
};

inline report::Manifest base_manifest(std::string const& command, std::vector<std::string> const& args,
                                      std::string const& data_file)
{
    report::Manifest m;
    m.set("tool", std::string{"relbell"});
    m.set("version", std::string{tool_version});
    m.set("command", command);
    m.set("command_line", report::join_command_line(args));
    m.set("data_file", data_file);
    return m;
}

inline void emit(report::CsvTable const& table, report::Manifest manifest, OutputFlags const& out,
                 std::vector<report::Series> const& series, std::string const& ylabel,
                 std::string const& title, Clock const& clock)
{
    report::write_file(out.out, table.str());
    if (out.plot) {
        auto shown = series;
        if (out.degrees)
            for (auto& s : shown)
                for (auto& x : s.x)
                    x *= 180 / std::numbers::pi;
        report::write_file(out.svg_path(),
                           report::render_svg(shown, out.degrees ? "theta (deg)" : "theta (rad)",
                                              ylabel, title));
        manifest.set("plot_file", out.svg_path());
    }
    manifest.set("wall_clock_seconds", clock.seconds());
    report::write_file(report::manifest_path(out.out), manifest.str());
}

inline report::Series curve_series(std::string label, CHSHCurve const& c)
{
    report::Series s{std::move(label), {}, {}};
    for (auto const& p : c.points) {
        s.x.push_back(p.theta);
        s.y.push_back(p.F);
    }
    return s;
}

// Transfer pairs for a list of (alpha, W) points, computed on the worker pool.
inline std::vector<TransferPair> transfer_pairs(std::vector<std::pair<double, double>> const& pts,
                                                QuadratureSpec const& spec, unsigned jobs)
{
    return parallel_map(pts.size(), jobs, [&](std::size_t i) {
        return transfer_pair(pts[i].first, pts[i].second, spec);
    });
}

inline std::string fmt_label(char const* name, double v)
{
    return std::string{name} + "=" + report::fmt_num(v);
}

} // namespace detail

/// Runs the CLI. args[0] is the program name.
inline int run(std::vector<std::string> const& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr)
{
    using namespace detail;
    CLI::App app{"Bell-CHSH correlations of photon wave packets seen by a moving detector", "relbell"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string{tool_version});

    // chsh
    auto* chsh = app.add_subcommand("chsh", "F(theta) curve for one (alpha, W)");
    double chsh_alpha = 0, chsh_width = 0;
    GridFlags chsh_grid;
    QuadFlags chsh_quad;
    OutputFlags chsh_out;
    chsh->add_option("--alpha", chsh_alpha, "Rapidity of detector A (alpha = -atanh v)");
    chsh->add_option("--width", chsh_width, "Normalized packet width W = w/|p|")
        ->check(CLI::NonNegativeNumber);
    chsh_grid.add_to(*chsh);
    chsh_quad.add_to(*chsh);
    chsh_out.add_to(*chsh, "chsh.csv");

    // fig1, fig2, fig3
    auto* fig1 = app.add_subcommand("fig1", "F(theta) at saturated alpha for W in {0, 0.3, 0.6, 1}");
    GridFlags fig1_grid;
    QuadFlags fig1_quad;
    OutputFlags fig1_out;
    fig1_grid.add_to(*fig1);
    fig1_quad.add_to(*fig1);
    fig1_out.add_to(*fig1, "fig1.csv");

    auto* fig2 = app.add_subcommand("fig2", "F(theta) at W = 0.6 for alpha in {2, 1, 0, -1, -2, -4}");
    double fig2_width = 0.6;
    GridFlags fig2_grid;
    QuadFlags fig2_quad;
    OutputFlags fig2_out;
    fig2->add_option("--width", fig2_width, "Normalized packet width")->check(CLI::NonNegativeNumber);
    fig2_grid.add_to(*fig2);
    fig2_quad.add_to(*fig2);
    fig2_out.add_to(*fig2, "fig2.csv");

    auto* fig3 = app.add_subcommand("fig3", "Delta F(theta) for the orbiting-detector scenario");
    double fig3_alpha = iss_alpha, fig3_width = iss_width;
    GridFlags fig3_grid;
    QuadFlags fig3_quad;
    OutputFlags fig3_out;
    fig3->add_option("--alpha", fig3_alpha, "Rapidity of detector A");
    fig3->add_option("--width", fig3_width, "Normalized packet width")->check(CLI::NonNegativeNumber);
    fig3_grid.add_to(*fig3);
    fig3_quad.add_to(*fig3);
    fig3_out.add_to(*fig3, "fig3.csv");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Monte-Carlo cross-check, or finite-N Bell runs with --pairs");
    std::int64_t orc_samples = 10'000'000;
    std::uint64_t orc_seed = 1;
    double orc_alpha = 0, orc_width = 0.6, orc_theta = std::numbers::pi / 6;
    std::string orc_particle = "A";
    unsigned orc_shards = 8;
    std::int64_t orc_pairs = 0;
    QuadFlags orc_quad;
    OutputFlags orc_out;
    orc->add_option("--samples", orc_samples, "Monte-Carlo samples")->check(CLI::Range(std::int64_t{10'000}, std::numeric_limits<std::int64_t>::max()));
    orc->add_option("--seed", orc_seed, "Base seed (mt19937_64, SplitMix64 shard seeds)");
    orc->add_option("--alpha", orc_alpha, "Rapidity of detector A");
    orc->add_option("--width", orc_width, "Normalized packet width")->check(CLI::PositiveNumber);
    orc->add_option("--particle", orc_particle, "A or B")->check(CLI::IsMember({"A", "B"}));
    orc->add_option("--shards", orc_shards, "Sample shards (fixes the seed plan)")->check(CLI::PositiveNumber);
    auto* pairs_opt = orc->add_option("--pairs", orc_pairs, "Finite-N Bell run with this many pairs per angle setting")
                          ->check(CLI::PositiveNumber);
    orc->add_option("--theta", orc_theta, "Analyzer angle for --pairs mode (radians)");
    orc_quad.add_to(*orc);
    orc_out.add_to(*orc, "oracle.csv");

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    for (auto& s : storage)
        argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::Success const& e) {
        app.exit(e, out, err);
        return ok;
    } catch (CLI::ParseError const& e) {
        app.exit(e, out, err);
        return usage_error;
    }

    Clock const clock;
    try {
        if (chsh->parsed()) {
            auto const grid = chsh_grid.grid();
            auto const spec = chsh_quad.spec();
            auto const halves = parallel_map(2, chsh_out.jobs, [&](std::size_t i) {
                return i == 0 ? single_photon_transfer(Particle::A, chsh_alpha, chsh_width, spec)
                              : single_photon_transfer(Particle::B, 0.0, chsh_width, spec);
            });
            auto const curve = chsh_curve_from(grid, {halves[0], halves[1]});

            report::CsvTable t{{"theta_rad", "F", "E_00", "E_0m", "E_p0", "E_pm", "est_error"}, {}};
            for (auto const& p : curve.points)
                t.add_row({report::fmt_num(p.theta), report::fmt_num(p.F), report::fmt_num(p.E[0]),
                           report::fmt_num(p.E[1]), report::fmt_num(p.E[2]), report::fmt_num(p.E[3]),
                           report::fmt_num(curve.est_error)});
            auto m = base_manifest("chsh", args, chsh_out.out);
            m.set("alpha", chsh_alpha);
            m.set("width", chsh_width);
            chsh_grid.record(m);
            chsh_quad.record(m);
            m.set("jobs", std::to_string(chsh_out.jobs));
            m.set("max_est_error", curve.est_error);
            m.set("converged", std::string{curve.converged ? "true" : "false"});
            emit(t, m, chsh_out,
                 {curve_series(fmt_label("alpha", chsh_alpha) + ", " + fmt_label("W", chsh_width), curve)},
                 "F(theta)", "CHSH functional", clock);
            if (!curve.converged) {
                err << "relbell: quadrature did not converge (est_error " << curve.est_error
                    << " > tol " << spec.target_tol << ")\n";
                return numerics_error;
            }
            return ok;
        }

        if (fig1->parsed()) {
            auto const grid = fig1_grid.grid();
            auto const spec = fig1_quad.spec();
            std::vector<std::pair<double, double>> pts;
            for (double w : fig1_widths)
                for (double a : {saturated_alpha, saturation_check_alpha, -saturated_alpha})
                    pts.emplace_back(a, w);
            auto const tps = transfer_pairs(pts, spec, fig1_out.jobs);

            report::CsvTable t{{"W", "theta_rad", "F_alpha15", "F_alpha20", "saturation_gap",
                                "F_alpha_minus15", "est_error", "est_error_minus15"},
                               {}};
            std::vector<report::Series> series;
            double max_gap = 0, max_err = 0;
            bool converged = true, minus_converged = true;
            for (std::size_t w = 0; w < fig1_widths.size(); ++w) {
                auto const c15 = chsh_curve_from(grid, tps[3 * w]);
                auto const c20 = chsh_curve_from(grid, tps[3 * w + 1]);
                auto const cm15 = chsh_curve_from(grid, tps[3 * w + 2]);
                double const e = std::max(c15.est_error, c20.est_error);
                max_err = std::max(max_err, e);
                converged = converged && c15.converged && c20.converged;
                minus_converged = minus_converged && cm15.converged;
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    double const gap = std::abs(c15.points[i].F - c20.points[i].F);
                    max_gap = std::max(max_gap, gap);
                    t.add_row({report::fmt_num(fig1_widths[w]), report::fmt_num(grid[i]),
                               report::fmt_num(c15.points[i].F), report::fmt_num(c20.points[i].F),
                               report::fmt_num(gap), report::fmt_num(cm15.points[i].F),
                               report::fmt_num(e), report::fmt_num(cm15.est_error)});
                }
                series.push_back(curve_series(fmt_label("W", fig1_widths[w]), c15));
            }
            auto m = base_manifest("fig1", args, fig1_out.out);
            m.set("alpha", saturated_alpha);
            m.set("alpha_saturation_check", saturation_check_alpha);
            m.set("alpha_negative_limit", -saturated_alpha);
            m.set("widths", std::string{"0,0.3,0.6,1"});
            fig1_grid.record(m);
            fig1_quad.record(m);
            m.set("jobs", std::to_string(fig1_out.jobs));
            m.set("max_est_error", max_err);
            m.set("max_saturation_gap", max_gap);
            m.set("converged", std::string{converged ? "true" : "false"});
            m.set("negative_limit_converged", std::string{minus_converged ? "true" : "false"});
            emit(t, m, fig1_out, series, "F(theta)", "alpha = 15 (saturated)", clock);
            if (!minus_converged)
                err << "relbell: note: the alpha = -15 column did not reach the target tolerance "
                       "(see est_error_minus15)\n";
            if (!converged) {
                err << "relbell: quadrature did not converge for the saturated curves\n";
                return numerics_error;
            }
            if (max_gap >= saturation_tol) {
                err << "relbell: alpha = 15 is not saturated (gap " << max_gap << ")\n";
                return numerics_error;
            }
            return ok;
        }

        if (fig2->parsed()) {
            auto const grid = fig2_grid.grid();
            auto const spec = fig2_quad.spec();
            std::vector<std::pair<double, double>> pts;
            for (double a : fig2_alphas)
                pts.emplace_back(a, fig2_width);
            auto const tps = transfer_pairs(pts, spec, fig2_out.jobs);

            report::CsvTable t{{"alpha", "W", "theta_rad", "F", "est_error"}, {}};
            std::vector<report::Series> series;
            double max_err = 0;
            bool converged = true;
            for (std::size_t k = 0; k < fig2_alphas.size(); ++k) {
                auto const c = chsh_curve_from(grid, tps[k]);
                max_err = std::max(max_err, c.est_error);
                converged = converged && c.converged;
                for (auto const& p : c.points)
                    t.add_row({report::fmt_num(fig2_alphas[k]), report::fmt_num(fig2_width),
                               report::fmt_num(p.theta), report::fmt_num(p.F),
                               report::fmt_num(c.est_error)});
                series.push_back(curve_series(fmt_label("alpha", fig2_alphas[k]), c));
            }
            auto m = base_manifest("fig2", args, fig2_out.out);
            m.set("width", fig2_width);
            m.set("alphas", std::string{"2,1,0,-1,-2,-4"});
            fig2_grid.record(m);
            fig2_quad.record(m);
            m.set("jobs", std::to_string(fig2_out.jobs));
            m.set("max_est_error", max_err);
            m.set("converged", std::string{converged ? "true" : "false"});
            emit(t, m, fig2_out, series, "F(theta)", "W = " + report::fmt_num(fig2_width), clock);
            if (!converged) {
                err << "relbell: quadrature did not converge\n";
                return numerics_error;
            }
            return ok;
        }

        if (fig3->parsed()) {
            auto const grid = fig3_grid.grid();
            auto const spec = fig3_quad.spec();
            DeltaFCurve d;
            try {
                d = delta_F_curve(grid, fig3_alpha, fig3_width, spec);
            } catch (CancellationError const& e) {
                err << "relbell: " << e.what() << "\n";
                return numerics_error;
            }
            report::CsvTable t{{"theta_rad", "delta_F", "F", "F0", "est_error", "est_error0"}, {}};
            report::Series s{"Delta F", {}, {}};
            for (std::size_t i = 0; i < grid.size(); ++i) {
                t.add_row({report::fmt_num(grid[i]), report::fmt_num(d.delta[i]),
                           report::fmt_num(d.moving.points[i].F), report::fmt_num(d.rest.points[i].F),
                           report::fmt_num(d.moving.est_error), report::fmt_num(d.rest.est_error)});
                s.x.push_back(grid[i]);
                s.y.push_back(d.delta[i]);
            }
            auto m = base_manifest("fig3", args, fig3_out.out);
            m.set("alpha", fig3_alpha);
            m.set("width", fig3_width);
            fig3_grid.record(m);
            fig3_quad.record(m);
            m.set("jobs", std::to_string(fig3_out.jobs));
            m.set("max_est_error", std::max(d.moving.est_error, d.rest.est_error));
            m.set("max_abs_delta_F", d.max_abs_delta());
            emit(t, m, fig3_out, {s}, "Delta F(theta)",
                 fmt_label("alpha", fig3_alpha) + ", " + fmt_label("W", fig3_width), clock);
            return ok;
        }

        if (orc->parsed()) {
            if (*pairs_opt) {
                auto const b = oracle::simulate_bell_run(orc_theta, orc_pairs, orc_seed);
                report::CsvTable t{{"setting", "phi_a", "phi_b", "N", "n_pp", "n_pm", "n_mp", "n_mm",
                                    "E_hat", "E_exact"},
                                   {}};
                static char const* const names[] = {"a2b1", "a2b2", "a1b1", "a1b2"};
                for (std::size_t i = 0; i < 4; ++i) {
                    auto const& r = b.runs[i];
                    t.add_row({names[i], report::fmt_num(r.phi_a), report::fmt_num(r.phi_b),
                               std::to_string(r.N), std::to_string(r.n_pp), std::to_string(r.n_pm),
                               std::to_string(r.n_mp), std::to_string(r.n_mm), report::fmt_num(r.E_hat),
                               report::fmt_num(std::cos(2 * (r.phi_a - r.phi_b)))});
                }
                double const exact = std::abs(1 + 2 * std::cos(2 * orc_theta) - std::cos(4 * orc_theta));
                auto m = base_manifest("oracle", args, orc_out.out);
                m.set("mode", std::string{"bell_run"});
                m.set("theta", orc_theta);
                m.set("pairs", std::to_string(orc_pairs));
                m.set("seed", std::to_string(orc_seed));
                m.set("rng", std::string{"mt19937_64 seeded by SplitMix64(seed*4+setting)"});
                m.set("chsh_hat", b.chsh);
                m.set("chsh_exact", exact);
                emit(t, m, orc_out, {}, "", "", clock);
                out << "CHSH_hat = " << report::fmt_num(b.chsh) << " (exact " << report::fmt_num(exact)
                    << ", N = " << orc_pairs << " per setting)\n";
                return ok;
            }

            Particle const particle = orc_particle == "A" ? Particle::A : Particle::B;
            if (particle == Particle::B && orc_alpha != 0)
                throw std::invalid_argument("--alpha must be 0 for particle B (detector at rest)");
            auto const spec = orc_quad.spec();
            auto const quad = single_photon_transfer(particle, orc_alpha, orc_width, spec);
            oracle::McOptions const opt{orc_samples, orc_seed, orc_shards, orc_out.jobs};
            auto const mc = oracle::mc_transfer(particle, orc_alpha, orc_width, opt);

            report::CsvTable t{{"matrix", "P", "Q", "quad_re", "quad_im", "mc_re", "mc_im", "std_error",
                                "z_score"},
                               {}};
            static char const* const mats[] = {"xx", "xy", "yx", "yy"};
            static char const* const pol[] = {"H", "V"};
            double max_z = 0;
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb)
                    for (int p = 0; p < 2; ++p)
                        for (int q = 0; q < 2; ++q) {
                            cdouble const g = quad.get(a, bb)(p, q);
                            auto const& e = mc.at(a, bb, p, q);
                            double const delta = std::abs(g - e.mean);
                            double const z = e.std_error > 0 ? delta / e.std_error
                                                             : (delta == 0 ? 0.0 : std::numeric_limits<double>::infinity());
                            max_z = std::max(max_z, z);
                            t.add_row({mats[a * 2 + bb], pol[p], pol[q], report::fmt_num(g.real()),
                                       report::fmt_num(g.imag()), report::fmt_num(e.mean.real()),
                                       report::fmt_num(e.mean.imag()), report::fmt_num(e.std_error),
                                       report::fmt_num(z)});
                        }
            auto m = base_manifest("oracle", args, orc_out.out);
            m.set("mode", std::string{"transfer"});
            m.set("particle", orc_particle);
            m.set("alpha", orc_alpha);
            m.set("width", orc_width);
            m.set("samples", std::to_string(orc_samples));
            m.set("seed", std::to_string(orc_seed));
            m.set("shards", std::to_string(orc_shards));
            m.set("rng", std::string{"mt19937_64 seeded by SplitMix64"});
            orc_quad.record(m);
            m.set("max_est_error", quad.est_error);
            m.set("max_z_score", max_z);
            emit(t, m, orc_out, {}, "", "", clock);
            out << "max |quad - mc| / std_error = " << report::fmt_num(max_z)
                << (max_z < 3 ? " (all within 3 standard errors)\n" : " (exceeds 3 standard errors)\n");
            return ok;
        }
    } catch (std::invalid_argument const& e) {
        err << "relbell: " << e.what() << "\n";
        return usage_error;
    } catch (std::domain_error const& e) {
        err << "relbell: " << e.what() << "\n";
        return usage_error;
    } catch (std::exception const& e) {
        err << "relbell: " << e.what() << "\n";
        return numerics_error;
    }
    return usage_error;
}

} // namespace relbell::cli

#endif
