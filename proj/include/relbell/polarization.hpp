#ifndef RELBELL_POLARIZATION_HPP
#define RELBELL_POLARIZATION_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "relbell/kinematics.hpp"

// Polarization geometry at a photon momentum k. All coefficient triples are
// components in the helicity basis (eps+, eps-, eps_l) at k, with the
// inner product antilinear in the left slot:
//   x_s = <eps_s, x>,  x = sum_s x_s eps_s.

namespace relbell
{

using cdouble = std::complex<double>;
using ComplexTriple = Eigen::Vector3cd;
using Matrix3c = Eigen::Matrix3cd;

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

/// Rotation taking z to the direction, R = Rz(phi) Ry(theta).
inline Eigen::Matrix3d rotation_matrix(SphericalDirection const& d)
{
    double const ct = std::cos(d.theta), st = std::sin(d.theta);
    double const cp = std::cos(d.phi), sp = std::sin(d.phi);
    Eigen::Matrix3d r;
    r << cp * ct, -sp, cp * st,
         sp * ct,  cp, sp * st,
         -st,     0.0, ct;
    return r;
}

struct HelicityTriad
{
    ComplexTriple eps_plus;
    ComplexTriple eps_minus;
    ComplexTriple eps_long;

    [[nodiscard]] ComplexTriple const& operator[](int i) const
    {
        return i == 0 ? eps_plus : (i == 1 ? eps_minus : eps_long);
    }
};

/*!
 * Helicity triad eps_s = R(k) (1, i s, 0)/sqrt(2), eps_l = k.
 *
 * An optional gauge angle chi rotates the transverse pair about k,
 * R -> R Rz(chi), which multiplies eps_s by exp(-i s chi).
 */
inline HelicityTriad helicity_triad(SphericalDirection const& d, double gauge = 0.0)
{
    Eigen::Matrix3cd const r = rotation_matrix(d).cast<cdouble>();
    cdouble const i{0, 1};
    HelicityTriad t;
    t.eps_plus = r * ComplexTriple{inv_sqrt2, i * inv_sqrt2, 0};
    t.eps_minus = r * ComplexTriple{inv_sqrt2, -i * inv_sqrt2, 0};
    t.eps_long = r.col(2);
    if (gauge != 0) {
        t.eps_plus *= std::polar(1.0, -gauge);
        t.eps_minus *= std::polar(1.0, gauge);
    }
    return t;
}

struct TransverseCoefficients
{
    cdouble x_plus, x_minus, y_plus, y_minus;
    double x_long{0}, y_long{0};

    [[nodiscard]] ComplexTriple x_column() const { return {x_plus, x_minus, x_long}; }
    [[nodiscard]] ComplexTriple y_column() const { return {y_plus, y_minus, y_long}; }
};

/// Components of the lab unit vectors x and y in the helicity basis at d.
inline TransverseCoefficients xy_coefficients(SphericalDirection const& d, double gauge = 0.0)
{
    double const ct = std::cos(d.theta), st = std::sin(d.theta);
    double const cp = std::cos(d.phi), sp = std::sin(d.phi);
    TransverseCoefficients c{
        cdouble{ct * cp, sp} * inv_sqrt2,
        cdouble{ct * cp, -sp} * inv_sqrt2,
        cdouble{ct * sp, -cp} * inv_sqrt2,
        cdouble{ct * sp, cp} * inv_sqrt2,
        st * cp,
        st * sp,
    };
    if (gauge != 0) {
        cdouble const up = std::polar(1.0, gauge), down = std::conj(up);
        c.x_plus *= up;
        c.y_plus *= up;
        c.x_minus *= down;
        c.y_minus *= down;
    }
    return c;
}

/// Components of an arbitrary complex vector in a triad, <eps_a, v>.
inline ComplexTriple components_in(HelicityTriad const& t, ComplexTriple const& v)
{
    return {t.eps_plus.dot(v), t.eps_minus.dot(v), t.eps_long.dot(v)};
}

/// Normalized transverse projections of x and y (the H and V polarization
/// vectors at k), longitudinal entry zero.
struct HVCoefficients
{
    ComplexTriple cH;
    ComplexTriple cV;
};

inline constexpr double degenerate_norm_floor = 1e-30;

inline HVCoefficients hv_from(TransverseCoefficients const& c)
{
    double const nx2 = std::norm(c.x_plus) + std::norm(c.x_minus);
    double const ny2 = std::norm(c.y_plus) + std::norm(c.y_minus);
    if (nx2 < degenerate_norm_floor || ny2 < degenerate_norm_floor)
        throw std::domain_error("hv_coefficients: lab axis is longitudinal at this direction");
    double const nx = std::sqrt(nx2), ny = std::sqrt(ny2);
    return {ComplexTriple{c.x_plus / nx, c.x_minus / nx, 0},
            ComplexTriple{c.y_plus / ny, c.y_minus / ny, 0}};
}

inline HVCoefficients hv_coefficients(SphericalDirection const& d, double gauge = 0.0)
{
    return hv_from(xy_coefficients(d, gauge));
}

/// Matrices of |a><b| (a, b in {x, y}) in the helicity basis at k.
struct ProjectorMatrices
{
    Matrix3c xx, xy, yx, yy;
};

inline ProjectorMatrices projector_matrices(TransverseCoefficients const& c)
{
    ComplexTriple const x = c.x_column(), y = c.y_column();
    return {x * x.adjoint(), x * y.adjoint(), y * x.adjoint(), y * y.adjoint()};
}

inline ProjectorMatrices projector_matrices(SphericalDirection const& d, double gauge = 0.0)
{
    return projector_matrices(xy_coefficients(d, gauge));
}

/// sigma_phi = C cos(2 phi) + S sin(2 phi).
struct SigmaComponents
{
    Matrix3c cos_part;  // Mxx - Myy
    Matrix3c sin_part;  // Mxy + Myx

    [[nodiscard]] Matrix3c at(double angle) const
    {
        return cos_part * std::cos(2 * angle) + sin_part * std::sin(2 * angle);
    }
};

inline SigmaComponents sigma_components(SphericalDirection const& d, double gauge = 0.0)
{
    auto const m = projector_matrices(d, gauge);
    return {m.xx - m.yy, m.xy + m.yx};
}

} // namespace relbell

#endif
