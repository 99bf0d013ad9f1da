#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "relbell/quadrature.hpp"
#include "relbell/wavepacket.hpp"

using namespace relbell;

namespace
{
constexpr double pi = std::numbers::pi;

// Composite Simpson rule, independent of the Gauss-Legendre path.
template <typename F>
double simpson(F f, double a, double b, int n)
{
    double const h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}
} // namespace

TEST(GaussianPacket, Weight)
{
    GaussianPacket const p{1.0, Particle::A};
    EXPECT_NEAR(p.weight(0), 1 / pi, 1e-16);
    for (double w : {0.1, 0.6, 2.0}) {
        GaussianPacket const q{w, Particle::B};
        EXPECT_NEAR(q.weight(w), std::exp(-1.0) / (pi * w * w), 1e-15 / (w * w));
        double prev = q.weight(0);
        for (int i = 1; i < 100; ++i) {
            double const cur = q.weight(0.05 * w * i);
            EXPECT_GT(cur, 0);
            EXPECT_LT(cur, prev);
            prev = cur;
        }
    }
}

TEST(GaussianPacket, RejectsBadWidth)
{
    EXPECT_THROW((GaussianPacket{-0.1, Particle::A}), std::invalid_argument);
    EXPECT_THROW((GaussianPacket{std::nan(""), Particle::A}), std::invalid_argument);
    GaussianPacket const plane{0.0, Particle::A};
    EXPECT_TRUE(plane.is_plane_wave());
    EXPECT_THROW((void)plane.weight(0.0), std::domain_error);
}

TEST(GaussianPacket, TruncatedNormalization)
{
    for (double w : {1e-3, 0.6, 1.5}) {
        GaussianPacket const p{w, Particle::A};
        double const simp = simpson([&](double r) { return p.weight(r) * 2 * pi * r; }, 0, 8 * w, 40000);
        EXPECT_NEAR(simp, 1 - std::exp(-64.0), 1e-12);
        auto const quad = integrate_polar([](double, double) { return 1.0; }, p, QuadratureSpec{});
        EXPECT_NEAR(quad.value, 1 - std::exp(-64.0), 1e-14);
    }
}

TEST(GaussianPacket, MeanRadius)
{
    for (double w : {1e-3, 0.3, 0.6, 1.0}) {
        GaussianPacket const p{w, Particle::A};
        auto const res = integrate_polar([](double r, double) { return r; }, p, QuadratureSpec{});
        EXPECT_NEAR(res.value, w * std::sqrt(pi) / 2, 1e-12 * std::max(w, 1.0));
    }
}

TEST(GaussianPacket, MomentumAt)
{
    GaussianPacket const a{0.5, Particle::A}, b{0.5, Particle::B};
    EXPECT_EQ(momentum_at(a, {0, 0}), (ThreeMomentum{0, 0, 1}));
    EXPECT_EQ(momentum_at(b, {0, 0}), (ThreeMomentum{0, 0, -1}));
    auto const k = momentum_at(a, {0.6, pi / 2});
    EXPECT_NEAR(k.kx, 0, 1e-16);
    EXPECT_NEAR(k.ky, 0.6, 1e-16);
    EXPECT_EQ(k.kz, 1);
    EXPECT_NEAR(k.energy(), std::sqrt(1.36), 1e-15);
}
