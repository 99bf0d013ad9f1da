#ifndef RELBELL_KINEMATICS_HPP
#define RELBELL_KINEMATICS_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

// Massless kinematics and collinear boosts along z. Units: hbar = c = 1 and
// every momentum is measured in units of the central packet momentum |p|.

namespace relbell
{

struct SphericalDirection
{
    double theta{0};  // polar angle in [0, pi]
    double phi{0};    // azimuth in [0, 2 pi)
};

struct ThreeMomentum
{
    double kx{0};
    double ky{0};
    double kz{0};

    // On-shell photon energy k^0 = |k|.
    [[nodiscard]] double energy() const noexcept { return std::hypot(kx, ky, kz); }

    [[nodiscard]] double transverse() const noexcept { return std::hypot(kx, ky); }

    /// Spherical angles of k/|k|. A zero vector has no direction.
    [[nodiscard]] SphericalDirection direction() const
    {
        if (kx == 0 && ky == 0 && kz == 0)
            throw std::domain_error("ThreeMomentum::direction: zero momentum has no direction");
        double phi = std::atan2(ky, kx);
        if (phi < 0)
            phi += 2 * std::numbers::pi;
        return {std::atan2(transverse(), kz), phi};
    }

    friend bool operator==(ThreeMomentum const&, ThreeMomentum const&) = default;
};

inline ThreeMomentum unit_vector(SphericalDirection const& d) noexcept
{
    double const s = std::sin(d.theta);
    return {s * std::cos(d.phi), s * std::sin(d.phi), std::cos(d.theta)};
}

/*!
 * Pure boost along z parameterized by rapidity.
 *
 * Acts on (k^0, k) through
 *   k^0' = cosh(a) k^0 + sinh(a) k_z,   k_z' = sinh(a) k^0 + cosh(a) k_z,
 * with a = -atanh(v) for a detector moving with velocity v along +z.
 */
class ZBoost
{
  public:
    constexpr ZBoost() = default;
    constexpr explicit ZBoost(double rapidity) noexcept : alpha_{rapidity} {}

    [[nodiscard]] constexpr double rapidity() const noexcept { return alpha_; }
    // Velocity of the detector, v = -tanh(alpha).
    [[nodiscard]] double velocity() const noexcept { return -std::tanh(alpha_); }

    [[nodiscard]] constexpr ZBoost compose(ZBoost other) const noexcept
    {
        return ZBoost{alpha_ + other.alpha_};
    }
    [[nodiscard]] constexpr ZBoost inverse() const noexcept { return ZBoost{-alpha_}; }

    [[nodiscard]] ThreeMomentum apply(ThreeMomentum const& k) const noexcept
    {
        if (alpha_ == 0)
            return k;
        return {k.kx, k.ky, std::sinh(alpha_) * k.energy() + std::cosh(alpha_) * k.kz};
    }

    /*!
     * Direction of the boosted momentum from the aberration formula
     * tan(theta'/2) = exp(-alpha) tan(theta/2).
     *
     * Same result as apply(k).direction() but without the cancellation between
     * sinh and cosh terms that apply() suffers for large |alpha|.
     */
    [[nodiscard]] SphericalDirection apply_direction(ThreeMomentum const& k) const
    {
        SphericalDirection d = k.direction();
        if (alpha_ == 0)
            return d;
        double const kt = k.transverse(), e = k.energy();
        // half angle from whichever light-cone component is well conditioned
        double const half = k.kz >= 0 ? std::atan2(kt, e + k.kz) : std::atan2(e - k.kz, kt);
        d.theta = 2 * std::atan(std::exp(-alpha_) * std::tan(half));
        return d;
    }

    // Time component of the boosted four-momentum.
    [[nodiscard]] double boosted_energy(ThreeMomentum const& k) const noexcept
    {
        return std::cosh(alpha_) * k.energy() + std::sinh(alpha_) * k.kz;
    }

    /// Jacobian d(k_z')/d(k_z) at fixed transverse momentum. Equals k'^0/k^0,
    /// which is what makes d^3k/k^0 boost invariant.
    [[nodiscard]] double jacobian(ThreeMomentum const& k) const noexcept
    {
        return std::sinh(alpha_) * k.kz / k.energy() + std::cosh(alpha_);
    }

  private:
    double alpha_{0};
};

inline ThreeMomentum apply_boost(ZBoost const& b, ThreeMomentum const& k) noexcept
{
    return b.apply(k);
}

/// alpha = -atanh(v); v > 0 means the detector recedes along +z.
inline double rapidity_from_velocity(double v)
{
    if (!(std::abs(v) < 1))
        throw std::domain_error("rapidity_from_velocity: |v| must be < 1");
    return -std::atanh(v);
}

/*!
 * Wigner phase of a helicity state under the boost.
 *
 * Only collinear z boosts are representable, and for those the little-group
 * rotation is trivial. Kept as a function so that callers do not bake the
 * zero in.
 */
inline double wigner_phase(ZBoost const& /*b*/, ThreeMomentum const& k)
{
    if (k.energy() == 0)
        throw std::domain_error("wigner_phase: zero momentum");
    return 0.0;
}

} // namespace relbell

#endif
