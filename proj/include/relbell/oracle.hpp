#ifndef RELBELL_ORACLE_HPP
#define RELBELL_ORACLE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "relbell/kinematics.hpp"
#include "relbell/parallel.hpp"
#include "relbell/polarization.hpp"
#include "relbell/wavepacket.hpp"

// Monte-Carlo route to the transfer-matrix integrals and a finite-N
// simulation of the ideal Bell experiment. Shares only the kinematics and
// polarization primitives with the quadrature route.

namespace relbell::oracle
{

struct McEstimate
{
    std::complex<double> mean;
    double std_error{0};  // standard error of the complex mean, sqrt(var_re + var_im)/sqrt(n)
    std::int64_t n_samples{0};
};

/// SplitMix64 finalizer, used to derive independent per-shard seeds.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits. Platform independent,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& eng) noexcept
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Running mean and scatter (Welford) for a vector of complex samples.
template <std::size_t N>
struct Accumulator
{
    std::int64_t n{0};
    std::array<std::complex<double>, N> mean{};
    std::array<double, N> m2{};  // sum of |x - mean|^2

    void add(std::array<std::complex<double>, N> const& x)
    {
        ++n;
        for (std::size_t i = 0; i < N; ++i) {
            auto const d = x[i] - mean[i];
            mean[i] += d / static_cast<double>(n);
            m2[i] += std::real(std::conj(d) * (x[i] - mean[i]));
        }
    }

    // Chan et al. pairwise merge
    void merge(Accumulator const& o)
    {
        if (o.n == 0)
            return;
        std::int64_t const tot = n + o.n;
        for (std::size_t i = 0; i < N; ++i) {
            auto const d = o.mean[i] - mean[i];
            mean[i] += d * (static_cast<double>(o.n) / tot);
            m2[i] += o.m2[i] + std::norm(d) * (static_cast<double>(n) * o.n / tot);
        }
        n = tot;
    }

    [[nodiscard]] McEstimate estimate(std::size_t i) const
    {
        double const var = n > 1 ? m2[i] / static_cast<double>(n - 1) : 0.0;
        return {mean[i], std::sqrt(var / static_cast<double>(n)), n};
    }
};

struct McOptions
{
    std::int64_t n_samples{10'000'000};
    std::uint64_t seed{1};
    unsigned shards{1};  // fixed shard plan; result depends on it, not on threads
    unsigned jobs{1};
};

/*!
 * Mean of f(q) over the packet's transverse Gaussian, sampled exactly:
 * r = W sqrt(-ln u), u in (0, 1], phi uniform on [0, 2 pi).
 *
 * f maps a source-frame ThreeMomentum (plus r) to std::array<complex, N>.
 */
template <std::size_t N, typename F>
std::array<McEstimate, N> mc_integrate(F&& f, GaussianPacket const& packet, McOptions const& opt)
{
    if (packet.is_plane_wave())
        throw std::domain_error("mc_integrate: plane-wave packet has no transverse support");
    if (opt.n_samples < 2 || opt.shards < 1)
        throw std::invalid_argument("mc_integrate: need >= 2 samples and >= 1 shard");

    auto run_shard = [&](std::size_t s) {
        std::int64_t const count = opt.n_samples / opt.shards +
                                   (static_cast<std::int64_t>(s) < opt.n_samples % opt.shards ? 1 : 0);
        std::mt19937_64 eng{mix_seed(opt.seed ^ mix_seed(s))};
        Accumulator<N> acc;
        for (std::int64_t i = 0; i < count; ++i) {
            double const u = 1.0 - uniform01(eng);
            double const phi = 2 * std::numbers::pi * uniform01(eng);
            double const r = packet.width() * std::sqrt(-std::log(u));
            acc.add(f(packet.momentum_at({r, phi}), r));
        }
        return acc;
    };
    auto const shards = parallel_map(opt.shards, opt.jobs, run_shard);
    Accumulator<N> total;
    for (auto const& a : shards)
        total.merge(a);
    std::array<McEstimate, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = total.estimate(i);
    return out;
}

/// Transfer-matrix estimates, ordered [matrix][P][Q] with matrix in
/// (xx, xy, yx, yy) and P, Q in (H, V).
struct McTransfer
{
    std::array<McEstimate, 16> entries;
    Particle particle{Particle::A};
    double alpha{0};
    double width{0};
    McOptions options{};

    [[nodiscard]] McEstimate const& at(int a, int b, int p, int q) const
    {
        return entries[static_cast<std::size_t>(((a * 2 + b) * 2 + p) * 2 + q)];
    }
};

/*!
 * Same integrands as the quadrature route, written the long way: full 3x3
 * projector matrices in the helicity basis at the boosted momentum, sandwiched
 * between the H/V coefficient triples of the source-frame momentum.
 */
inline McTransfer mc_transfer(Particle particle, double alpha, double width, McOptions const& opt)
{
    if (opt.n_samples < 10'000)
        throw std::invalid_argument("mc_transfer: need at least 1e4 samples");
    if (particle == Particle::B && alpha != 0)
        throw std::invalid_argument("mc_transfer: the detector of photon B is at rest");
    GaussianPacket const packet{width, particle};
    ZBoost const boost{alpha};

    auto integrand = [&](ThreeMomentum const& q, double) {
        auto const c = hv_coefficients(q.direction());
        auto const proj = projector_matrices(boost.apply(q).direction());
        std::array<Matrix3c const*, 4> const m{&proj.xx, &proj.xy, &proj.yx, &proj.yy};
        std::array<ComplexTriple const*, 2> const states{&c.cH, &c.cV};
        std::array<std::complex<double>, 16> out;
        for (int k = 0; k < 4; ++k)
            for (int p = 0; p < 2; ++p)
                for (int s = 0; s < 2; ++s)
                    out[static_cast<std::size_t>((k * 2 + p) * 2 + s)] =
                        states[p]->dot(*m[k] * *states[s]);
        return out;
    };

    McTransfer t;
    t.entries = mc_integrate<16>(integrand, packet, opt);
    t.particle = particle;
    t.alpha = alpha;
    t.width = width;
    t.options = opt;
    return t;
}

// ---------------------------------------------------------------------------
// Finite-N Bell runs in the plane-wave limit
// ---------------------------------------------------------------------------

struct FiniteRun
{
    std::int64_t N{0};
    double phi_a{0};
    double phi_b{0};
    // counts of (s_A, s_B) = (+,+), (+,-), (-,+), (-,-)
    std::int64_t n_pp{0}, n_pm{0}, n_mp{0}, n_mm{0};
    double E_hat{0};
    std::uint64_t seed{0};
};

/// N pairs with Pr(sA, sB) = (1 + sA sB cos 2(phi_a - phi_b))/4.
inline FiniteRun simulate_pair(double phi_a, double phi_b, std::int64_t N, std::uint64_t seed)
{
    if (N < 1)
        throw std::invalid_argument("simulate_pair: need at least one pair");
    FiniteRun run;
    run.N = N;
    run.phi_a = phi_a;
    run.phi_b = phi_b;
    run.seed = seed;
    double const p_same = 0.5 * (1 + std::cos(2 * (phi_a - phi_b)));
    std::mt19937_64 eng{mix_seed(seed)};
    for (std::int64_t i = 0; i < N; ++i) {
        bool const a_plus = uniform01(eng) < 0.5;
        bool const same = uniform01(eng) < p_same;
        bool const b_plus = same ? a_plus : !a_plus;
        if (a_plus)
            ++(b_plus ? run.n_pp : run.n_pm);
        else
            ++(b_plus ? run.n_mp : run.n_mm);
    }
    run.E_hat = static_cast<double>(run.n_pp + run.n_mm - run.n_pm - run.n_mp) / static_cast<double>(N);
    return run;
}

struct BellRun
{
    double theta{0};
    std::array<FiniteRun, 4> runs;  // same angle order as CHSHPoint::E
    double chsh{0};
};

inline BellRun simulate_bell_run(double theta, std::int64_t N, std::uint64_t seed)
{
    std::array<std::pair<double, double>, 4> const angles{
        {{0.0, 0.0}, {0.0, -theta}, {theta, 0.0}, {theta, -theta}}};
    BellRun b;
    b.theta = theta;
    for (std::size_t i = 0; i < 4; ++i)
        b.runs[i] = simulate_pair(angles[i].first, angles[i].second, N, seed * 4 + i);
    b.chsh = std::abs(b.runs[0].E_hat + b.runs[1].E_hat + b.runs[2].E_hat - b.runs[3].E_hat);
    return b;
}

} // namespace relbell::oracle

#endif
