#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "symphonic/config.hpp"
#include "symphonic/errors.hpp"
#include "symphonic/functional.hpp"
#include "symphonic/geometry.hpp"
#include "symphonic/grid.hpp"

// Strong form of the reduction equation, normalized so that it equals
//   E * h^2 / (4 w k^2),   E = d/dt (dL/dphi') - dL/dphi
// for the integrand L = (k^4 phi'^4 / h^4 + V) w of evaluate_J:
//
//   (k^2/h^2) (phi'^3)'  -  (k^2/h^2) (m1 tan t - m2 cot t + 4 h'/h) phi'^3
//     + 3 k k' phi'^4 / h^2  +  (h^2/k^2) G(t, phi)  =  0,      G = -V_phi / 4.
//
// For join, G = sin cos (a1 cos^2 phi / cos^4 t - a2 sin^2 phi / sin^4 t); for
// Hopf, G = sin cos cos^2 phi (a1 / cos^4 t + a2 / sin^4 t).

namespace symphonic {

/// x^(1/3) with the sign of x.
inline double signed_cuberoot(double x) { return std::cbrt(x); }

/// Shooting state: psi = k^2(phi) phi'^3 is the transported quantity.
struct FirstOrderState {
    double t = 0.0;
    double phi = 0.0;
    double psi = 0.0;

    static FirstOrderState from_slope(double t, double phi, double slope, const ProblemConfig& cfg) {
        return {t, phi, detail::k_sq(phi, cfg) * slope * slope * slope};
    }

    double slope(const ProblemConfig& cfg) const {
        return signed_cuberoot(psi / detail::k_sq(phi, cfg));
    }
};

/// Forcing G = -V_phi / 4 at interior t.
inline double forcing(double t, double phi, const CoefficientSet& coeffs) {
    return -0.25 * potential_terms(t, phi, coeffs).dphi;
}

inline void require_interior(double t) {
    if (!(t > 0.0 && t < half_pi)) throw SingularityError("ODE coefficients are singular at t = 0 and t = pi/2");
}

/// m1 tan t - m2 cot t + 4 h'/h, the transport bracket.
inline double transport_bracket(double t, const ProblemConfig& cfg) {
    require_interior(t);
    const auto [s, c] = sincos(t);
    const double h2 = detail::h_sq(t, cfg);
    const double hp_over_h = (cfg.b * cfg.b - cfg.a * cfg.a) * s * c / h2;
    return cfg.m1 * s / c - cfg.m2 * c / s + 4.0 * hp_over_h;
}

/// A in  psi' + A psi + B = 0.
inline double coefficient_A(double t, const ProblemConfig& cfg) {
    return -transport_bracket(t, cfg);
}

/// B in  psi' + A psi + B = 0:  k k' phi'^4 + h^4 G / k^2,  phi' = cbrt(psi / k^2).
/// The first term vanishes identically when c == d.
inline double coefficient_B(double t, double phi, double psi, const CoefficientSet& coeffs) {
    require_interior(t);
    const ProblemConfig& cfg = coeffs.cfg;
    const double k2 = detail::k_sq(phi, cfg);
    const double h2 = detail::h_sq(t, cfg);
    const double kkp = detail::k_k_prime(phi, cfg);
    double transport = 0.0;
    if (kkp != 0.0) {
        const double slope = signed_cuberoot(psi / k2);
        const double s2 = slope * slope;
        transport = kkp * s2 * s2;
    }
    return transport + h2 * h2 * forcing(t, phi, coeffs) / k2;
}

/// The strong form split into its pieces, for diagnostics.
struct StrongFormTerms {
    double flux = 0.0;         // (k^2/h^2) (phi'^3)'
    double transport = 0.0;    // -(k^2/h^2) (m1 tan - m2 cot) phi'^3
    double h_transport = 0.0;  // -(k^2/h^2) 4 h'/h phi'^3        (ellipsoidal domain only)
    double k_transport = 0.0;  // 3 k k' phi'^4 / h^2             (ellipsoidal target only)
    double potential = 0.0;    // (h^2/k^2) G

    double total() const { return flux + transport + h_transport + k_transport + potential; }
};

/// Strong form at t from phi, phi' and (phi'^3)'.
inline StrongFormTerms strong_form_terms(double t, double phi, double slope, double flux_derivative,
                                         const CoefficientSet& coeffs) {
    require_interior(t);
    const ProblemConfig& cfg = coeffs.cfg;
    const auto [s, c] = sincos(t);
    const double k2 = detail::k_sq(phi, cfg);
    const double h2 = detail::h_sq(t, cfg);
    const double ratio = k2 / h2;
    const double cube = slope * slope * slope;
    const double hp_over_h = (cfg.b * cfg.b - cfg.a * cfg.a) * s * c / h2;

    StrongFormTerms out;
    out.flux = ratio * flux_derivative;
    out.transport = -ratio * (cfg.m1 * s / c - cfg.m2 * c / s) * cube;
    out.h_transport = -ratio * 4.0 * hp_over_h * cube;
    out.k_transport = 3.0 * detail::k_k_prime(phi, cfg) * cube * slope / h2;
    out.potential = forcing(t, phi, coeffs) * h2 / k2;
    return out;
}

/// Direct second-order assembly from phi, phi', phi''.
inline double strong_form(double t, double phi, double d1, double d2, const CoefficientSet& coeffs) {
    return strong_form_terms(t, phi, d1, 3.0 * d1 * d1 * d2, coeffs).total();
}

/// (psi' + A psi + B) / h^2 with psi' = (k^2)' phi'^4 + 3 k^2 phi'^2 phi''.
/// Algebraically identical to strong_form.
inline double first_order_form(double t, double phi, double d1, double d2,
                               const CoefficientSet& coeffs) {
    const ProblemConfig& cfg = coeffs.cfg;
    const double k2 = detail::k_sq(phi, cfg);
    const double psi = k2 * d1 * d1 * d1;
    const double dpsi = detail::k_sq_prime(phi, cfg) * d1 * d1 * d1 * d1 + 3.0 * k2 * d1 * d1 * d2;
    const double lhs = dpsi + coefficient_A(t, cfg) * psi + coefficient_B(t, phi, psi, coeffs);
    return lhs / detail::h_sq(t, cfg);
}

inline constexpr double default_residual_margin = 0.05;

/// Strong-form residual at each interior node (index i-1 holds node i).
/// phi' is the centered node difference; (phi'^3)' is the difference of the
/// adjacent cell slopes cubed over half the two-cell span.
inline std::vector<double> residual(const Profile& p, const CoefficientSet& coeffs) {
    const std::size_t n = p.cells();
    if (n < 8) throw InvalidConfig("residual needs at least 8 cells");
    std::vector<double> out(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        const double span = p.grid.nodes[i + 1] - p.grid.nodes[i - 1];
        const double left = p.slope(i - 1), right = p.slope(i);
        const double slope = (p.values[i + 1] - p.values[i - 1]) / span;
        const double flux = (right * right * right - left * left * left) / (0.5 * span);
        out[i - 1] = strong_form_terms(p.grid.nodes[i], p.values[i], slope, flux, coeffs).total();
    }
    return out;
}

inline std::vector<double> residual(const Profile& p, const ProblemConfig& cfg) {
    return residual(p, make_coefficients(cfg));
}

/// sup |residual| over interior nodes with t in [margin, pi/2 - margin].
inline double residual_sup(const Profile& p, const std::vector<double>& res,
                           double margin = default_residual_margin) {
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < p.grid.nodes.size(); ++i) {
        const double t = p.grid.nodes[i];
        if (t >= margin && t <= half_pi - margin) sup = std::max(sup, std::abs(res[i - 1]));
    }
    return sup;
}

inline double residual_sup(const Profile& p, const CoefficientSet& coeffs,
                           double margin = default_residual_margin) {
    return residual_sup(p, residual(p, coeffs), margin);
}

/// Nodal slope: centered in the interior, one-sided at the ends.
inline std::vector<double> nodal_slopes(const Profile& p) {
    const std::size_t n = p.cells();
    std::vector<double> out(n + 1);
    out[0] = p.slope(0);
    out[n] = p.slope(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        out[i] = (p.values[i + 1] - p.values[i - 1]) / (p.grid.nodes[i + 1] - p.grid.nodes[i - 1]);
    return out;
}

}  // namespace symphonic
