#ifndef RELBELL_WAVEPACKET_HPP
#define RELBELL_WAVEPACKET_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relbell/kinematics.hpp"

namespace relbell
{

enum class Particle
{
    A,  // travels along +z, seen by the moving detector
    B,  // travels along -z, detector at rest
};

inline char const* to_string(Particle p) noexcept { return p == Particle::A ? "A" : "B"; }

struct SupportPoint
{
    double r{0};
    double phi{0};
};

/*!
 * Transverse Gaussian packet with the longitudinal delta already integrated
 * out: |f|^2 d^3k -> weight(r) r dr dphi on the plane k_z = +-1.
 *
 * W is the width in units of the central momentum. W == 0 is the plane-wave
 * limit; it is accepted here but has no density, so consumers must take the
 * r = 0 branch themselves.
 */
class GaussianPacket
{
  public:
    GaussianPacket(double width, Particle particle) : width_{width}, particle_{particle}
    {
        if (!(width >= 0) || !std::isfinite(width))
            throw std::invalid_argument("GaussianPacket: width must be finite and >= 0");
    }

    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] Particle particle() const noexcept { return particle_; }
    [[nodiscard]] bool is_plane_wave() const noexcept { return width_ == 0; }

    // Density pi^-1 W^-2 exp(-(r/W)^2), normalized against r dr dphi.
    [[nodiscard]] double weight(double r) const
    {
        if (is_plane_wave())
            throw std::domain_error("GaussianPacket::weight: plane-wave packet has no density");
        double const u = r / width_;
        return std::exp(-u * u) / (std::numbers::pi * width_ * width_);
    }

    [[nodiscard]] double z_sign() const noexcept { return particle_ == Particle::A ? 1.0 : -1.0; }

    [[nodiscard]] ThreeMomentum momentum_at(SupportPoint const& pt) const noexcept
    {
        return {pt.r * std::cos(pt.phi), pt.r * std::sin(pt.phi), z_sign()};
    }

  private:
    double width_;
    Particle particle_;
};

inline ThreeMomentum momentum_at(GaussianPacket const& packet, SupportPoint const& pt) noexcept
{
    return packet.momentum_at(pt);
}

} // namespace relbell

#endif
