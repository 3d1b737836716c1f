#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "symphonic/config.hpp"
#include "symphonic/errors.hpp"
#include "symphonic/euler_lagrange.hpp"
#include "symphonic/functional.hpp"
#include "symphonic/geometry.hpp"
#include "symphonic/grid.hpp"

namespace symphonic {

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
template <std::size_t N, class Rhs>
std::array<double, N> rk4_step(Rhs&& f, double t, const std::array<double, N>& y, double dt) {
    auto axpy = [](const std::array<double, N>& base, double s, const std::array<double, N>& k) {
        std::array<double, N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + s * k[i];
        return out;
    };
    const auto k1 = f(t, y);
    const auto k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const auto k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const auto k4 = f(t + dt, axpy(y, dt, k3));
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

struct ShootingOptions {
    double eps = 1e-3;
    int rk_steps = 20000;
    double slope_lo = 1e-3;
    double slope_hi = 1e3;
    double bisect_tol = 1e-10;
    double target_tol = 1e-6;

    void validate() const {
        if (!(eps > 0 && eps < half_pi / 2)) throw InvalidConfig("eps must lie in (0, pi/4)");
        if (rk_steps < 1) throw InvalidConfig("rk_steps must be >= 1");
        if (!(slope_lo > 0) || !(slope_lo < slope_hi))
            throw InvalidConfig("need 0 < slope_lo < slope_hi");
        if (!(bisect_tol > 0) || !(target_tol > 0))
            throw InvalidConfig("bisect_tol and target_tol must be > 0");
    }
};

struct Trajectory {
    std::vector<FirstOrderState> states;
    double hit = 0.0;  // phi at pi/2 - eps, or the last finite phi if blown up
    bool blown_up = false;
};

/// Right-hand side of the first-order system in (phi, psi).
inline std::array<double, 2> first_order_rhs(double t, const std::array<double, 2>& y,
                                             const CoefficientSet& coeffs) {
    const double phi = y[0], psi = y[1];
    const double slope = signed_cuberoot(psi / detail::k_sq(phi, coeffs.cfg));
    const double dpsi = -coefficient_A(t, coeffs.cfg) * psi - coefficient_B(t, phi, psi, coeffs);
    return {slope, dpsi};
}

/// Integrates from t = eps with phi = s eps, psi = k^2(phi) s^3 to pi/2 - eps in
/// rk_steps equal steps. Leaving [-0.1, pi/2 + 0.1] or a non-finite state stops
/// the run with blown_up set.
inline Trajectory integrate(double slope, const CoefficientSet& coeffs, const ShootingOptions& opts) {
    opts.validate();
    if (!(slope > 0)) throw InvalidConfig("initial slope must be > 0");
    constexpr double escape = 0.1;

    const double t0 = opts.eps;
    const double t1 = half_pi - opts.eps;
    const double dt = (t1 - t0) / opts.rk_steps;

    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(opts.rk_steps) + 1);
    std::array<double, 2> y{slope * t0, 0.0};
    y[1] = detail::k_sq(y[0], coeffs.cfg) * slope * slope * slope;
    traj.states.push_back({t0, y[0], y[1]});

    auto rhs = [&](double t, const std::array<double, 2>& s) { return first_order_rhs(t, s, coeffs); };
    for (int step = 0; step < opts.rk_steps; ++step) {
        const double t = t0 + step * dt;
        const double t_next = step + 1 == opts.rk_steps ? t1 : t0 + (step + 1) * dt;
        const auto next = rk4_step(rhs, t, y, t_next - t);
        if (!std::isfinite(next[0]) || !std::isfinite(next[1])) {
            traj.blown_up = true;
            break;
        }
        y = next;
        traj.states.push_back({t_next, y[0], y[1]});
        if (y[0] < -escape || y[0] > half_pi + escape) {
            traj.blown_up = true;
            break;
        }
    }
    traj.hit = traj.states.back().phi;
    return traj;
}

struct ShootResult {
    double slope = 0.0;
    Trajectory trajectory;
    double miss = 0.0;          // hit - (pi/2 - eps)
    bool non_monotone = false;  // the 16-point scan saw hit - target change sign more than once
    int evaluations = 0;
};

/// Bisects on the initial slope until phi(pi/2 - eps) = pi/2 - eps within
/// target_tol, or the bracket is narrower than bisect_tol. Throws BracketFailure
/// if the bracket does not straddle the target after three 4x widenings.
inline ShootResult shoot(const CoefficientSet& coeffs, const ShootingOptions& opts) {
    opts.validate();
    const double target = half_pi - opts.eps;
    ShootResult result;
    auto miss = [&](double s) {
        ++result.evaluations;
        return integrate(s, coeffs, opts).hit - target;
    };

    double lo = opts.slope_lo, hi = opts.slope_hi;
    double f_lo = miss(lo), f_hi = miss(hi);
    for (int widen = 0; widen < 3 && !(f_lo < 0 && f_hi > 0); ++widen) {
        lo /= 4.0;
        hi *= 4.0;
        f_lo = miss(lo);
        f_hi = miss(hi);
    }
    if (!(f_lo < 0 && f_hi > 0))
        throw BracketFailure("no slope bracket found: hit - target = " + std::to_string(f_lo) +
                             " at " + std::to_string(lo) + ", " + std::to_string(f_hi) + " at " +
                             std::to_string(hi));

    {
        // undershooting runs hover around phi = 0 at the O(eps) level, so raw hit
        // values are noisy there; what bisection relies on is a single sign change
        int changes = 0;
        bool prev_above = false;
        for (int i = 0; i < 16; ++i) {
            const double s = lo * std::pow(hi / lo, i / 15.0);
            const bool above = miss(s) > 0;
            if (i > 0 && above != prev_above) ++changes;
            prev_above = above;
        }
        result.non_monotone = changes > 1;
    }

    double best_s = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    double best_f = std::min(std::abs(f_lo), std::abs(f_hi));
    while (hi - lo > opts.bisect_tol && best_f >= opts.target_tol) {
        const double mid = hi > 2.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double f = miss(mid);
        if (std::abs(f) < best_f) {
            best_f = std::abs(f);
            best_s = mid;
        }
        if (f < 0) lo = mid;
        else hi = mid;
    }

    result.slope = best_s;
    result.trajectory = integrate(best_s, coeffs, opts);
    result.miss = result.trajectory.hit - target;
    return result;
}

/// phi along the trajectory at t, by linear interpolation (t must lie in its range).
inline double interpolate(const Trajectory& traj, double t) {
    const auto& s = traj.states;
    auto it = std::lower_bound(s.begin(), s.end(), t,
                               [](const FirstOrderState& st, double x) { return st.t < x; });
    if (it == s.begin()) return it->phi;
    if (it == s.end()) return s.back().phi;
    const auto& right = *it;
    const auto& left = *(it - 1);
    const double w = (t - left.t) / (right.t - left.t);
    return left.phi + w * (right.phi - left.phi);
}

/// sup |phi_profile - phi_trajectory| over profile nodes inside [eps, pi/2 - eps].
/// A blown-up trajectory compares as infinitely far.
inline double compare(const Profile& profile, const Trajectory& traj) {
    if (traj.states.empty() || traj.blown_up) return std::numeric_limits<double>::infinity();
    const double t_lo = traj.states.front().t, t_hi = traj.states.back().t;
    double sup = 0.0;
    for (std::size_t i = 0; i < profile.grid.nodes.size(); ++i) {
        const double t = profile.grid.nodes[i];
        if (t < t_lo || t > t_hi) continue;
        sup = std::max(sup, std::abs(profile.values[i] - interpolate(traj, t)));
    }
    return sup;
}

}  // namespace symphonic
