#pragma once

// Shared generators for the property tests. Everything is seeded so failures
// reproduce; the seed of a failing case is printed by the callers.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "symphonic/symphonic.hpp"

namespace symphonic::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    /// Axes in [0.5, 2], dimensions 1..6, norms in [0, 6].
    ProblemConfig config(Mode mode) {
        ProblemConfig cfg;
        cfg.mode = mode;
        cfg.m1 = integer(1, 6);
        cfg.m2 = integer(1, 6);
        cfg.a = uniform(0.5, 2.0);
        cfg.b = uniform(0.5, 2.0);
        cfg.c = uniform(0.5, 2.0);
        cfg.d = uniform(0.5, 2.0);
        cfg.norm1 = uniform(0.0, 6.0);
        cfg.norm2 = uniform(0.0, 6.0);
        return cfg;
    }

    Grid grid(std::size_t n) {
        return coin() ? make_grid(n) : make_grid(n, Grading::graded(uniform(1.0, 2.5)));
    }

    /// Feasible profile: t plus a few random harmonics, clamped into the box.
    Profile profile(const Grid& grid, double amplitude = 0.3) {
        const double c1 = uniform(-1, 1), c2 = uniform(-1, 1), c3 = uniform(-1, 1);
        return project(sample_profile(grid, [&](double t) {
            return t + amplitude * (c1 * std::sin(2 * t) + c2 * std::sin(4 * t) + c3 * std::sin(6 * t));
        }));
    }

    std::vector<double> direction(std::size_t m) {
        std::vector<double> v(m);
        for (double& x : v) x = uniform(-1, 1);
        return v;
    }

private:
    std::mt19937_64 rng_;
};

/// Smooth test profile with analytic first and second derivatives.
struct Analytic {
    const char* name;
    double (*f)(double);
    double (*d1)(double);
    double (*d2)(double);
};

// polynomial and trigonometric families, all increasing on [0, pi/2]
inline const Analytic analytic_profiles[] = {
    {"identity", [](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; }},
    {"quadratic", [](double t) { return t + 0.2 * t * t; }, [](double t) { return 1 + 0.4 * t; },
     [](double) { return 0.4; }},
    {"cubic", [](double t) { return 0.8 * t + 0.05 * t * t * t; }, [](double t) { return 0.8 + 0.15 * t * t; },
     [](double t) { return 0.3 * t; }},
    {"quartic", [](double t) { return t - 0.02 * t * t * t * t; }, [](double t) { return 1 - 0.08 * t * t * t; },
     [](double t) { return -0.24 * t * t; }},
    {"sine", [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
     [](double t) { return -std::sin(t); }},
    {"shifted sine", [](double t) { return t + 0.1 * std::sin(2 * t); },
     [](double t) { return 1 + 0.2 * std::cos(2 * t); }, [](double t) { return -0.4 * std::sin(2 * t); }},
    {"double angle", [](double t) { return t - 0.15 * std::sin(4 * t); },
     [](double t) { return 1 - 0.6 * std::cos(4 * t); }, [](double t) { return 2.4 * std::sin(4 * t); }},
    {"tangent", [](double t) { return 0.9 * std::tan(t / 2); },
     [](double t) { return 0.45 / (std::cos(t / 2) * std::cos(t / 2)); },
     [](double t) { return 0.45 * std::tan(t / 2) / (std::cos(t / 2) * std::cos(t / 2)); }},
    {"exponential", [](double t) { return 0.5 * (std::exp(t / 2) - 1); },
     [](double t) { return 0.25 * std::exp(t / 2); }, [](double t) { return 0.125 * std::exp(t / 2); }},
    {"arctangent", [](double t) { return std::atan(2 * t); }, [](double t) { return 2 / (1 + 4 * t * t); },
     [](double t) { return -16 * t / ((1 + 4 * t * t) * (1 + 4 * t * t)); }},
};

inline double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::abs(a[i] - b[i]));
    return sup;
}

inline double sup_abs(const std::vector<double>& a) {
    double sup = 0.0;
    for (double x : a) sup = std::max(sup, std::abs(x));
    return sup;
}

/// sup |phi_i - t_i|
inline double distance_to_identity(const Profile& p) { return sup_abs_diff(p.values, p.grid.nodes); }

/// Central-difference gradient of J over the interior values.
inline std::vector<double> fd_gradient(const Profile& p, const CoefficientSet& coeffs, double step,
                                       QuadratureRule rule = default_quadrature) {
    std::vector<double> g(p.cells() - 1);
    Profile q = p;
    for (std::size_t i = 1; i < p.cells(); ++i) {
        const double x = p.values[i];
        q.values[i] = x + step;
        const double up = evaluate_J(q, coeffs, rule);
        q.values[i] = x - step;
        const double down = evaluate_J(q, coeffs, rule);
        q.values[i] = x;
        g[i - 1] = (up - down) / (2 * step);
    }
    return g;
}

inline ProblemConfig asymmetric_instance() {
    ProblemConfig cfg;
    cfg.m1 = 3;
    cfg.m2 = 4;
    cfg.a = 1.0;
    cfg.b = 1.2;
    cfg.c = 1.0;
    cfg.d = 0.8;
    cfg.norm1 = 3.0;
    cfg.norm2 = 4.0;
    return cfg;
}

}  // namespace symphonic::testing
