#ifndef RELBELL_QUADRATURE_HPP
#define RELBELL_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "relbell/wavepacket.hpp"

namespace relbell
{

struct QuadratureSpec
{
    int n_radial{64};
    int n_azimuthal{64};
    double r_max_in_widths{8.0};
    double target_tol{1e-13};
};

template <typename V>
struct IntegralResult
{
    V value;
    double est_error{0};  // |I(finest) - I(previous)|, max over components
    int n_radial{0};
    int n_azimuthal{0};
    bool converged{true};
};

struct GaussLegendreRule
{
    std::vector<double> nodes;    // ascending on (-1, 1)
    std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // P_n(x) and P_n'(x) by the three-term recurrence
    auto legendre = [n](double x) {
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double const p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1)};
    };
    int const half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            auto const [p, dp] = legendre(x);
            double const dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double const dp = legendre(x).second;
        double const w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    return rule;
}

namespace detail
{

inline double max_abs(double v) { return std::abs(v); }
inline double max_abs(std::complex<double> v) { return std::abs(v); }
template <typename Derived>
double max_abs(Eigen::DenseBase<Derived> const& v)
{
    return v.derived().cwiseAbs().maxCoeff();
}

inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(std::complex<double> v)
{
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}
template <typename Derived>
bool all_finite(Eigen::DenseBase<Derived> const& v)
{
    return v.derived().allFinite();
}

} // namespace detail

template <typename V>
struct KahanSum
{
    V sum{};
    V carry{};
    bool empty{true};

    void add(V const& x)
    {
        if (empty) {
            sum = x;
            carry = V(x * 0.0);
            empty = false;
            return;
        }
        V const y = V(x - carry);
        V const t = V(sum + y);
        carry = V((t - sum) - y);
        sum = t;
    }
};

/*!
 * Fixed-node polar rule for integral f(r, phi) weight(r) r dr dphi.
 *
 * Radial nodes are Gauss-Legendre on (0, r_max] with r_max in units of the
 * packet width; azimuthal nodes are the periodic trapezoid rule. Terms are
 * accumulated in node order, so the result is independent of how the
 * integrand is evaluated.
 */
template <typename F>
auto integrate_polar_fixed(F&& f, GaussianPacket const& packet, int n_radial,
                           int n_azimuthal, double r_max_in_widths = 8.0)
{
    using V = std::decay_t<decltype(f(0.0, 0.0))>;
    if (packet.is_plane_wave())
        throw std::domain_error("integrate_polar: plane-wave packet has no transverse support");
    if (n_radial < 1 || n_azimuthal < 1)
        throw std::invalid_argument("integrate_polar: node counts must be positive");

    auto const rule = gauss_legendre(n_radial);
    double const r_max = r_max_in_widths * packet.width();
    double const dphi = 2 * std::numbers::pi / n_azimuthal;

    // Kahan-compensated sums: inner over each ring, outer over rings.
    KahanSum<V> total;
    for (int i = 0; i < n_radial; ++i) {
        double const r = 0.5 * r_max * (rule.nodes[i] + 1);
        double const wr = 0.5 * r_max * rule.weights[i] * packet.weight(r) * r * dphi;
        KahanSum<V> ring;
        for (int j = 0; j < n_azimuthal; ++j) {
            double const phi = j * dphi;
            V const val = f(r, phi);
            if (!detail::all_finite(val)) {
                std::ostringstream msg;
                msg << "integrate_polar: non-finite integrand at r=" << r << " phi=" << phi;
                throw std::runtime_error(msg.str());
            }
            ring.add(val);
        }
        total.add(V(ring.sum * wr));
    }
    return total.sum;
}

/// Node-doubling driver: starts at the requested counts, doubles both counts at
/// most twice, stops once successive estimates differ by <= target_tol.
template <typename F>
auto integrate_polar(F&& f, GaussianPacket const& packet, QuadratureSpec const& spec)
{
    using V = std::decay_t<decltype(f(0.0, 0.0))>;
    int nr = spec.n_radial, na = spec.n_azimuthal;
    V prev = integrate_polar_fixed(f, packet, nr, na, spec.r_max_in_widths);
    IntegralResult<V> res;
    for (int doubling = 0; doubling < 2; ++doubling) {
        nr *= 2;
        na *= 2;
        V cur = integrate_polar_fixed(f, packet, nr, na, spec.r_max_in_widths);
        res.est_error = detail::max_abs(cur - prev);
        res.value = cur;
        prev = cur;
        if (res.est_error <= spec.target_tol)
            break;
    }
    res.n_radial = nr;
    res.n_azimuthal = na;
    res.converged = res.est_error <= spec.target_tol;
    return res;
}

} // namespace relbell

#endif
