#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symphonic/config.hpp"
#include "symphonic/errors.hpp"
#include "symphonic/geometry.hpp"
#include "symphonic/grid.hpp"

namespace symphonic {

/// Potential strengths of the reduced functional plus the config they came from.
struct CoefficientSet {
    double a1 = 0.0;
    double a2 = 0.0;
    ProblemConfig cfg;
};

/// join: a1 = (c/a)^4 norm1, a2 = (d/b)^4 norm2.  hopf: a2 = (c/b)^4 norm2.
inline CoefficientSet make_coefficients(const ProblemConfig& cfg) {
    cfg.validate();
    const double ca = cfg.c / cfg.a;
    const double second = cfg.mode == Mode::Join ? cfg.d / cfg.b : cfg.c / cfg.b;
    return {ca * ca * ca * ca * cfg.norm1, second * second * second * second * cfg.norm2, cfg};
}

/// V and its first two phi-derivatives at an interior t.
struct PotentialTerms {
    double value;
    double dphi;
    double dphi2;
};

inline PotentialTerms potential_terms(double t, double phi, const CoefficientSet& coeffs) {
    if (!(t > 0.0 && t < half_pi)) throw SingularityError("potential is singular at the endpoints");
    const auto [st, ct] = sincos(t);
    const auto [sp, cp] = sincos(phi);
    const double ct2 = ct * ct, st2 = st * st;
    const double w1 = coeffs.a1 / (ct2 * ct2);
    const double w2 = coeffs.a2 / (st2 * st2);
    const double s2 = sp * sp, c2 = cp * cp;
    if (coeffs.cfg.mode == Mode::Join) {
        // V = w1 cos^4 phi + w2 sin^4 phi
        return {w1 * c2 * c2 + w2 * s2 * s2,
                4.0 * sp * cp * (w2 * s2 - w1 * c2),
                w1 * (12.0 * c2 * s2 - 4.0 * c2 * c2) + w2 * (12.0 * s2 * c2 - 4.0 * s2 * s2)};
    }
    // V = (w1 + w2) cos^4 phi
    const double w = w1 + w2;
    return {w * c2 * c2, -4.0 * w * c2 * cp * sp, w * (12.0 * c2 * s2 - 4.0 * c2 * c2)};
}

inline double potential(double t, double phi, const CoefficientSet& coeffs) {
    return potential_terms(t, phi, coeffs).value;
}

/// Per-cell quadrature for J. Both rules integrate the P1 interpolant; the
/// Gauss rule is exact enough that phi(t) = t stays a discrete critical point
/// of the sphere problem to rounding, the midpoint rule only to O(h^2).
enum class QuadratureRule { Midpoint, Gauss3 };

inline std::string_view to_string(QuadratureRule rule) {
    return rule == QuadratureRule::Midpoint ? "midpoint" : "gauss3";
}

inline QuadratureRule parse_quadrature(std::string_view text) {
    if (text == "midpoint") return QuadratureRule::Midpoint;
    if (text == "gauss3") return QuadratureRule::Gauss3;
    throw InvalidConfig("unknown quadrature '" + std::string(text) + "' (expected gauss3 or midpoint)");
}

inline constexpr QuadratureRule default_quadrature = QuadratureRule::Gauss3;

namespace detail {

struct QuadPoint {
    double xi;      // position in the cell, 0..1
    double weight;  // fraction of the cell width
};

inline std::span<const QuadPoint> quadrature_points(QuadratureRule rule) {
    static constexpr std::array<QuadPoint, 1> midpoint{{{0.5, 1.0}}};
    // Gauss-Legendre, 3 points, mapped to [0, 1]
    static constexpr double off = 0.38729833462074168852;  // sqrt(3/5) / 2
    static constexpr std::array<QuadPoint, 3> gauss{
        {{0.5 - off, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + off, 5.0 / 18.0}}};
    if (rule == QuadratureRule::Midpoint) return midpoint;
    return gauss;
}

/// Contribution of one cell to J, its gradient in (phi_left, phi_right) and,
/// on request, the 2x2 Hessian block.
struct CellTerms {
    double value = 0.0;
    std::array<double, 2> grad{};
    std::array<double, 3> hess{};  // (left,left), (left,right), (right,right)
};

inline CellTerms cell_terms(const Profile& p, std::size_t cell, const CoefficientSet& coeffs,
                            QuadratureRule rule, bool second_order) {
    const ProblemConfig& cfg = coeffs.cfg;
    const double width = p.grid.width(cell);
    const double t0 = p.grid.nodes[cell];
    const double left = p.values[cell], right = p.values[cell + 1];
    const double s = p.slope(cell);
    const double r = 1.0 / width;
    const double s2 = s * s, s3 = s2 * s, s4 = s2 * s2;

    CellTerms out;
    for (const QuadPoint& q : quadrature_points(rule)) {
        const double tq = q.xi == 0.5 ? p.grid.midpoint(cell) : t0 + q.xi * width;
        const double phiq = q.xi == 0.5 ? 0.5 * (left + right) : (1.0 - q.xi) * left + q.xi * right;
        const double scale = q.weight * width * weight(tq, cfg);
        const double h2 = h_sq(tq, cfg);
        const double inv_h4 = 1.0 / (h2 * h2);
        const double k2 = k_sq(phiq, cfg);
        const double k2p = k_sq_prime(phiq, cfg);
        const PotentialTerms v = potential_terms(tq, phiq, coeffs);

        // integrand in (phi, slope): k^4 s^4 / h^4 + V; d(k^4)/dphi = 2 k^2 (k^2)'
        const double f_phi = scale * (2.0 * k2 * k2p * s4 * inv_h4 + v.dphi);
        const double f_s = scale * 4.0 * k2 * k2 * s3 * inv_h4;
        out.value += scale * (k2 * k2 * s4 * inv_h4 + v.value);

        // d/dphi_left = (1 - xi, -r), d/dphi_right = (xi, r) in (phi, slope)
        const double ul = 1.0 - q.xi, ur = q.xi;
        out.grad[0] += ul * f_phi - r * f_s;
        out.grad[1] += ur * f_phi + r * f_s;

        if (second_order) {
            const double k4pp = 2.0 * k2p * k2p + 2.0 * k2 * k_sq_second(phiq, cfg);
            const double f_pp = scale * (k4pp * s4 * inv_h4 + v.dphi2);
            const double f_ps = scale * 8.0 * k2 * k2p * s3 * inv_h4;
            const double f_ss = scale * 12.0 * k2 * k2 * s2 * inv_h4;
            auto form = [&](double ua, double sa, double ub, double sb) {
                return ua * ub * f_pp + (ua * sb + sa * ub) * f_ps + sa * sb * f_ss;
            };
            out.hess[0] += form(ul, -r, ul, -r);
            out.hess[1] += form(ul, -r, ur, r);
            out.hess[2] += form(ur, r, ur, r);
        }
    }
    return out;
}

}  // namespace detail

/// Value of J on the piecewise-linear profile, summed cell by cell.
inline double evaluate_J(const Profile& p, const CoefficientSet& coeffs,
                         QuadratureRule rule = default_quadrature) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.cells(); ++i)
        sum += detail::cell_terms(p, i, coeffs, rule, false).value;
    return sum;
}

/// Exact gradient of the discrete J with respect to the interior values phi_1..phi_{n-1}.
inline std::vector<double> grad_J(const Profile& p, const CoefficientSet& coeffs,
                                  QuadratureRule rule = default_quadrature) {
    const std::size_t n = p.cells();
    std::vector<double> full(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = detail::cell_terms(p, i, coeffs, rule, false);
        full[i] += c.grad[0];
        full[i + 1] += c.grad[1];
    }
    return {full.begin() + 1, full.end() - 1};
}

/// Symmetric tridiagonal matrix; off[i] couples rows i and i+1.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;
};

/// Exact Hessian of the discrete J over the interior values.
inline Tridiagonal hessian_J(const Profile& p, const CoefficientSet& coeffs,
                             QuadratureRule rule = default_quadrature) {
    const std::size_t n = p.cells();
    std::vector<double> diag(n + 1, 0.0), off(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = detail::cell_terms(p, i, coeffs, rule, true);
        diag[i] += c.hess[0];
        off[i] += c.hess[1];
        diag[i + 1] += c.hess[2];
    }
    Tridiagonal h;
    h.diag.assign(diag.begin() + 1, diag.end() - 1);
    h.off.assign(off.begin() + 1, off.end() - 1);
    return h;
}

/// Midpoint-rule value of the quartic norm integral  int (phi'^4 + phi^4) v dt.
template <std::invocable<double> Weight>
double x_norm(const Profile& p, Weight&& v) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.cells(); ++i) {
        const double s = p.slope(i);
        const double m = 0.5 * (p.values[i] + p.values[i + 1]);
        sum += (s * s * s * s + m * m * m * m) * v(p.grid.midpoint(i)) * p.grid.width(i);
    }
    return sum;
}

/// Empirical Hardy-type ratio: the larger of
///   int phi^4 sin^(m2-4) cos^m1   and   int phi^4 sin^m2 cos^(m1-4)
/// over  int (phi'^4 + phi^4) sin^m2 cos^m1, all by the midpoint rule.
/// Returns 0 for the zero profile.
inline double hardy_ratio(const Profile& p, const ProblemConfig& cfg) {
    double near_zero = 0.0, near_end = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < p.cells(); ++i) {
        const auto [st, ct] = sincos(p.grid.midpoint(i));
        const double s = p.slope(i);
        const double m = 0.5 * (p.values[i] + p.values[i + 1]);
        const double m4 = m * m * m * m;
        const double width = p.grid.width(i);
        const double base = std::pow(st, cfg.m2) * std::pow(ct, cfg.m1);
        near_zero += m4 * std::pow(st, cfg.m2 - 4) * std::pow(ct, cfg.m1) * width;
        near_end += m4 * std::pow(st, cfg.m2) * std::pow(ct, cfg.m1 - 4) * width;
        denom += (s * s * s * s + m4) * base * width;
    }
    if (denom == 0.0) return 0.0;
    return std::max(near_zero, near_end) / denom;
}

}  // namespace symphonic
