#ifndef RELBELL_CORRELATOR_HPP
#define RELBELL_CORRELATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relbell/kinematics.hpp"
#include "relbell/parallel.hpp"
#include "relbell/polarization.hpp"
#include "relbell/quadrature.hpp"
#include "relbell/wavepacket.hpp"

/*!
 * \file correlator.hpp
 * Reduction of the boosted two-photon state to 2x2 transfer matrices.
 *
 * The detector of photon A sees, for P in {H, V},
 *
 *   |P'> = int d^3k sqrt(q^0/k^0) f(q) sum_s c^P_s(q) |k, eps^s_k>,
 *   q = Lambda^-1 k,
 *
 * with c^P the normalized transverse coefficients of x (P = H) or y (P = V).
 * The measurement operators |a><b| (a, b in {x, y}) act on polarization only,
 * so
 *
 *   <P'| P_ab |Q'> = int d^3k (q^0/k^0) |f(q)|^2 (c^P(q)^dag a(k)) (b(k)^dag c^Q(q)),
 *
 * where a(k) are the components of the lab axis in the helicity basis at k.
 * Changing variables k = Lambda q and using d^3k / k^0 = d^3q / q^0, the
 * factor q^0/k^0 times the Jacobian k^0/q^0 is exactly one:
 *
 *   <P'| P_ab |Q'> = int d^3q |f(q)|^2 (c^P(q)^dag a(Lambda q)) (b(Lambda q)^dag c^Q(q)).
 *
 * The delta in |f|^2 pins q_z = +-1 and leaves a polar integral against the
 * transverse Gaussian weight, which is what integrate_polar evaluates. The
 * Wigner phase vanishes for z boosts, so coefficients move to the boosted
 * helicity basis unchanged.
 */

namespace relbell
{

using Matrix2c = Eigen::Matrix2cd;

/// Gauge field for the helicity basis, chi(direction). The reduction above is
/// only gauge invariant for fields that z boosts leave alone, i.e. chi(phi).
using HelicityGauge = std::function<double(SphericalDirection const&)>;

struct TransferMatrices
{
    // Indexed [P][Q] with P, Q in (H, V).
    Matrix2c xx{Matrix2c::Zero()}, xy{Matrix2c::Zero()}, yx{Matrix2c::Zero()}, yy{Matrix2c::Zero()};

    Particle particle{Particle::A};
    double alpha{0};
    double width{0};
    QuadratureSpec spec{};
    double est_error{0};
    int n_radial{0};
    int n_azimuthal{0};
    bool converged{true};

    [[nodiscard]] Matrix2c const& get(int a, int b) const
    {
        return a == 0 ? (b == 0 ? xx : xy) : (b == 0 ? yx : yy);
    }
};

// Columns [xx | xy | yx | yy], each a 2x2 block over (H, V).
using TransferBlock = Eigen::Matrix<cdouble, 2, 8>;

namespace detail
{

inline double gauge_at(HelicityGauge const& g, SphericalDirection const& d)
{
    return g ? g(d) : 0.0;
}

/// q^0/k^0 times dk_z/dq_z. Unity up to rounding.
inline double measure_ratio(ZBoost const& boost, ThreeMomentum const& q)
{
    return q.energy() / boost.boosted_energy(q) * boost.jacobian(q);
}

/// Transfer integrand at a source-frame momentum q.
inline TransferBlock transfer_integrand(ZBoost const& boost, ThreeMomentum const& q,
                                        HelicityGauge const& gauge = {})
{
    auto const dq = q.direction();
    auto const dk = boost.apply_direction(q);
    auto const c = hv_coefficients(dq, gauge_at(gauge, dq));
    auto const lab = xy_coefficients(dk, gauge_at(gauge, dk));
    ComplexTriple const ax = lab.x_column(), ay = lab.y_column();

    // amp_a[P] = <P|a>
    Eigen::Vector2cd const amp_x{c.cH.dot(ax), c.cV.dot(ax)};
    Eigen::Vector2cd const amp_y{c.cH.dot(ay), c.cV.dot(ay)};

    TransferBlock out;
    out.block<2, 2>(0, 0) = amp_x * amp_x.adjoint();
    out.block<2, 2>(0, 2) = amp_x * amp_y.adjoint();
    out.block<2, 2>(0, 4) = amp_y * amp_x.adjoint();
    out.block<2, 2>(0, 6) = amp_y * amp_y.adjoint();
    return out;
}

inline void check_particle_boost(Particle particle, double alpha)
{
    if (particle == Particle::B && alpha != 0)
        throw std::invalid_argument("single_photon_transfer: the detector of photon B is at rest");
    if (!std::isfinite(alpha))
        throw std::invalid_argument("single_photon_transfer: rapidity must be finite");
}

} // namespace detail

/// Momentum-integrated <P'| |a><b| |Q'> for one photon. W == 0 is the
/// plane-wave limit and is evaluated at the single point r = 0.
inline TransferMatrices single_photon_transfer(Particle particle, double alpha, double width,
                                               QuadratureSpec const& spec = {},
                                               HelicityGauge const& gauge = {})
{
    detail::check_particle_boost(particle, alpha);
    GaussianPacket const packet{width, particle};
    ZBoost const boost{alpha};

    TransferMatrices t;
    t.particle = particle;
    t.alpha = alpha;
    t.width = width;
    t.spec = spec;

    TransferBlock block;
    if (packet.is_plane_wave()) {
        block = detail::transfer_integrand(boost, packet.momentum_at({0, 0}), gauge);
        t.n_radial = t.n_azimuthal = 1;
    } else {
        auto const res = integrate_polar(
            [&](double r, double phi) {
                return detail::transfer_integrand(boost, packet.momentum_at({r, phi}), gauge);
            },
            packet, spec);
        block = res.value;
        t.est_error = res.est_error;
        t.n_radial = res.n_radial;
        t.n_azimuthal = res.n_azimuthal;
        t.converged = res.converged;
    }
    t.xx = block.block<2, 2>(0, 0);
    t.xy = block.block<2, 2>(0, 2);
    t.yx = block.block<2, 2>(0, 4);
    t.yy = block.block<2, 2>(0, 6);
    return t;
}

/// Gram matrix <P'|Q'> of the packet's H and V states. The measure change
/// makes it independent of the boost.
inline Matrix2c state_overlaps(Particle particle, double alpha, double width,
                               QuadratureSpec const& spec = {})
{
    detail::check_particle_boost(particle, alpha);
    GaussianPacket const packet{width, particle};
    auto gram = [&](double r, double phi) -> Matrix2c {
        auto const c = hv_coefficients(packet.momentum_at({r, phi}).direction());
        Matrix2c g;
        g << c.cH.dot(c.cH), c.cH.dot(c.cV), c.cV.dot(c.cH), c.cV.dot(c.cV);
        return g;
    };
    if (packet.is_plane_wave())
        return gram(0, 0);
    return integrate_polar(gram, packet, spec).value;
}

inline cdouble state_overlap_HV(Particle particle, double alpha, double width,
                                QuadratureSpec const& spec = {})
{
    return state_overlaps(particle, alpha, width, spec)(0, 1);
}

struct SigmaMatrix
{
    Matrix2c m;
    double angle{0};
};

inline SigmaMatrix sigma_matrix(TransferMatrices const& t, double angle)
{
    return {(t.xx - t.yy) * std::cos(2 * angle) + (t.xy + t.yx) * std::sin(2 * angle), angle};
}

inline constexpr double correlation_imag_tol = 1e-10;

/// <psi'| sigma_A x sigma_B |psi'> for psi' = (H'H + V'V)/sqrt(2).
inline double correlation(SigmaMatrix const& sa, SigmaMatrix const& sb)
{
    cdouble const e = 0.5 * sa.m.cwiseProduct(sb.m).sum();
    if (std::abs(e.imag()) >= correlation_imag_tol)
        throw std::logic_error("correlation: imaginary part " + std::to_string(e.imag()) +
                               " exceeds tolerance; basis conventions are inconsistent");
    return e.real();
}

struct CHSHPoint
{
    double theta{0};
    double F{0};
    // E(a2,b1), E(a2,b2), E(a1,b1), E(a1,b2) with angles (0,0), (0,-t), (t,0), (t,-t)
    std::array<double, 4> E{};
};

/// F(theta) = |E(0,0) + E(0,-theta) + E(theta,0) - E(theta,-theta)|.
inline CHSHPoint chsh_point(double theta, TransferMatrices const& ta, TransferMatrices const& tb)
{
    auto const a0 = sigma_matrix(ta, 0), a1 = sigma_matrix(ta, theta);
    auto const b0 = sigma_matrix(tb, 0), b1 = sigma_matrix(tb, -theta);
    CHSHPoint p;
    p.theta = theta;
    p.E = {correlation(a0, b0), correlation(a0, b1), correlation(a1, b0), correlation(a1, b1)};
    p.F = std::abs(p.E[0] + p.E[1] + p.E[2] - p.E[3]);
    return p;
}

struct TransferPair
{
    TransferMatrices a;
    TransferMatrices b;

    [[nodiscard]] double est_error() const { return std::max(a.est_error, b.est_error); }
    [[nodiscard]] bool converged() const { return a.converged && b.converged; }
};

inline TransferPair transfer_pair(double alpha, double width, QuadratureSpec const& spec = {})
{
    return {single_photon_transfer(Particle::A, alpha, width, spec),
            single_photon_transfer(Particle::B, 0.0, width, spec)};
}

inline CHSHPoint chsh_F(double theta, double alpha, double width, QuadratureSpec const& spec = {})
{
    auto const tp = transfer_pair(alpha, width, spec);
    return chsh_point(theta, tp.a, tp.b);
}

struct CHSHCurve
{
    std::vector<CHSHPoint> points;
    double alpha{0};
    double width{0};
    QuadratureSpec spec{};
    double est_error{0};
    bool converged{true};
};

namespace detail
{
inline void check_grid(std::vector<double> const& grid)
{
    if (grid.empty())
        throw std::invalid_argument("theta grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("theta grid must be strictly increasing");
}
} // namespace detail

inline CHSHCurve chsh_curve_from(std::vector<double> const& grid, TransferPair const& tp)
{
    detail::check_grid(grid);
    CHSHCurve c;
    c.alpha = tp.a.alpha;
    c.width = tp.a.width;
    c.spec = tp.a.spec;
    c.est_error = tp.est_error();
    c.converged = tp.converged();
    c.points.reserve(grid.size());
    for (double th : grid)
        c.points.push_back(chsh_point(th, tp.a, tp.b));
    return c;
}

inline CHSHCurve chsh_curve(std::vector<double> const& grid, double alpha, double width,
                            QuadratureSpec const& spec = {})
{
    detail::check_grid(grid);
    return chsh_curve_from(grid, transfer_pair(alpha, width, spec));
}

/// n uniform points on [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, int n)
{
    if (n < 1)
        throw std::invalid_argument("uniform_grid: need at least one point");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

inline std::vector<double> default_theta_grid()
{
    return uniform_grid(0.0, std::numbers::pi / 2, 181);
}

class CancellationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct DeltaFCurve
{
    std::vector<double> theta;
    std::vector<double> delta;
    CHSHCurve moving;  // detector A at rapidity alpha
    CHSHCurve rest;    // both detectors at rest

    [[nodiscard]] double max_abs_delta() const
    {
        double m = 0;
        for (double d : delta)
            m = std::max(m, std::abs(d));
        return m;
    }
};

inline constexpr double cancellation_fraction = 0.1;

/*!
 * Delta F(theta) = F(theta; alpha, W) - F(theta; 0, W).
 *
 * Refuses to return a difference whose magnitude is not resolved by the
 * quadrature: both runs must meet spec.target_tol, and their error estimates
 * must stay below 10% of max |Delta F|. For alpha == 0 or W == 0 the two runs
 * are the same computation and Delta F is identically zero.
 */
inline DeltaFCurve delta_F_curve(std::vector<double> const& grid, double alpha, double width,
                                 QuadratureSpec const& spec = {})
{
    DeltaFCurve d;
    d.moving = chsh_curve(grid, alpha, width, spec);
    d.rest = chsh_curve(grid, 0.0, width, spec);
    d.theta = grid;
    d.delta.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        d.delta[i] = d.moving.points[i].F - d.rest.points[i].F;

    if (alpha == 0 || width == 0)
        return d;
    if (!d.moving.converged || !d.rest.converged)
        throw CancellationError("delta_F_curve: quadrature did not reach the target tolerance");
    double const err = std::max(d.moving.est_error, d.rest.est_error);
    if (err >= cancellation_fraction * d.max_abs_delta())
        throw CancellationError("delta_F_curve: quadrature error " + std::to_string(err) +
                                " is not small against max |Delta F| " +
                                std::to_string(d.max_abs_delta()));
    return d;
}

} // namespace relbell

#endif
