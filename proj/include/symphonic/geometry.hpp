#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "symphonic/config.hpp"
#include "symphonic/errors.hpp"

namespace symphonic {

inline constexpr double half_pi = std::numbers::pi / 2.0;

/// Inputs within this distance outside [0, pi/2] are clamped, beyond it rejected.
inline constexpr double angle_tolerance = 1e-12;

inline double clamp_angle(double x, const char* what = "angle") {
    if (!(x >= -angle_tolerance && x <= half_pi + angle_tolerance))
        throw DomainError(std::string(what) + " outside [0, pi/2]: " + std::to_string(x));
    if (x < 0.0) return 0.0;
    if (x > half_pi) return half_pi;
    return x;
}

struct SinCos {
    double sin;
    double cos;
};

/// sin/cos evaluated through the nearer of 0 and pi/2, so that sincos(pi/2 - t)
/// is the swapped pair of sincos(t) whenever pi/2 - t is exact, and both
/// endpoints give exact zeros.
inline SinCos sincos(double t) {
    if (!(t > half_pi / 2 && t < 3 * half_pi / 2)) return {std::sin(t), std::cos(t)};
    const double u = half_pi - t;
    return {std::cos(u), std::sin(u)};
}

namespace detail {

// Unchecked forms; valid for any real argument. The ODE integrator may step
// phi slightly outside the box before it is flagged.

inline double h_sq(double t, const ProblemConfig& cfg) {
    if (cfg.a == cfg.b) return cfg.a * cfg.a;  // sin^2 + cos^2 need not round to 1
    const auto [s, c] = sincos(t);
    return cfg.b * cfg.b * s * s + cfg.a * cfg.a * c * c;
}

inline double k_sq(double phi, const ProblemConfig& cfg) {
    if (cfg.c == cfg.d) return cfg.c * cfg.c;
    const auto [s, c] = sincos(phi);
    return cfg.d * cfg.d * s * s + cfg.c * cfg.c * c * c;
}

/// d(k^2)/dphi = (d^2 - c^2) sin 2phi
inline double k_sq_prime(double phi, const ProblemConfig& cfg) {
    const auto [s, c] = sincos(phi);
    return 2.0 * (cfg.d * cfg.d - cfg.c * cfg.c) * s * c;
}

inline double k_sq_second(double phi, const ProblemConfig& cfg) {
    const auto [s, c] = sincos(phi);
    return 2.0 * (cfg.d * cfg.d - cfg.c * cfg.c) * (c - s) * (c + s);
}

/// k k' = (d^2 - c^2) sin(phi) cos(phi); exactly zero when c == d.
inline double k_k_prime(double phi, const ProblemConfig& cfg) {
    const auto [s, c] = sincos(phi);
    return (cfg.d * cfg.d - cfg.c * cfg.c) * s * c;
}

}  // namespace detail

/// Arc-length factor of the t direction on the domain ellipsoid.
inline double h_of_t(double t, const ProblemConfig& cfg) {
    return std::sqrt(detail::h_sq(clamp_angle(t, "t"), cfg));
}

inline double h_prime(double t, const ProblemConfig& cfg) {
    t = clamp_angle(t, "t");
    const auto [s, c] = sincos(t);
    return (cfg.b * cfg.b - cfg.a * cfg.a) * s * c / std::sqrt(detail::h_sq(t, cfg));
}

inline double k_of_phi(double phi, const ProblemConfig& cfg) {
    return std::sqrt(detail::k_sq(clamp_angle(phi, "phi"), cfg));
}

inline double k_prime(double phi, const ProblemConfig& cfg) {
    phi = clamp_angle(phi, "phi");
    return detail::k_k_prime(phi, cfg) / std::sqrt(detail::k_sq(phi, cfg));
}

/// cos^m1 t sin^m2 t, the t-dependent factor of the volume density.
inline double weight(double t, const ProblemConfig& cfg) {
    const auto [s, c] = sincos(clamp_angle(t, "t"));
    return std::pow(c, cfg.m1) * std::pow(s, cfg.m2);
}

inline double eigenvalue(const EigenmapSpec& spec) {
    if (spec.k < 1 || spec.p < 1) throw InvalidConfig("eigenmap needs k >= 1 and p >= 1");
    return static_cast<double>(spec.k) * static_cast<double>(spec.k + spec.p - 1);
}

/// Pointwise |d u|^2 of the join (or Hopf map) with profile value phi and slope
/// dphi at t. e1, e2 are the constant Dirichlet densities of the factor maps.
///
/// The two tangential terms are singular at t = 0 and t = pi/2 unless their
/// numerators vanish there; a nonzero numerator at an endpoint throws.
inline double join_energy_density(double t, double phi, double dphi, const ProblemConfig& cfg,
                                  double e1, double e2) {
    t = clamp_angle(t, "t");
    phi = clamp_angle(phi, "phi");
    const auto [st, ct] = sincos(t);
    const auto [sp, cp] = sincos(phi);

    auto ratio = [](double num, double den) {
        if (den == 0.0) {
            if (num != 0.0) throw SingularityError("energy density singular at endpoint");
            return 0.0;
        }
        return num / den;
    };

    const double first = ratio(cfg.c * cfg.c * cp * cp * e1, cfg.a * cfg.a * ct * ct);
    const double second =
        cfg.mode == Mode::Join ? ratio(cfg.d * cfg.d * sp * sp * e2, cfg.b * cfg.b * st * st)
                               : ratio(cfg.c * cfg.c * cp * cp * e2, cfg.b * cfg.b * st * st);
    const double radial = detail::k_sq(phi, cfg) * dphi * dphi / detail::h_sq(t, cfg);
    return first + second + radial;
}

}  // namespace symphonic
