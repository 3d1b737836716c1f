// Solves an asymmetric ellipsoid join twice, by minimization and by shooting
// on the first-order form, and prints both profiles at a few sample points.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "symphonic/symphonic.hpp"

int main() {
    using namespace symphonic;
    const ProblemConfig cfg{3, 4, 1.0, 1.2, 1.0, 0.8, 3.0, 4.0};
    const SolveReport r = minimize(cfg, make_grid(800), InitKind::Linear);
    ShootingOptions opts;
    opts.rk_steps = 40000;
    const ShootResult s = shoot(make_coefficients(cfg), opts);

    std::printf("minimizer: J = %.10f after %d iterations\n", r.j_value, r.iterations);
    std::printf("shooting:  s* = %.6f after %d integrations\n", s.slope, s.evaluations);
    std::printf("%8s %14s %14s\n", "t", "minimizer", "shooting");
    for (int k = 1; k < 10; ++k) {
        const double t = half_pi * k / 10.0;
        // the minimizer is piecewise linear between nodes
        const auto& nodes = r.profile.grid.nodes;
        const std::size_t i = std::upper_bound(nodes.begin(), nodes.end(), t) - nodes.begin() - 1;
        const double u = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
        const double phi = (1 - u) * r.profile.values[i] + u * r.profile.values[i + 1];
        std::printf("%8.4f %14.8f %14.8f\n", t, phi, interpolate(s.trajectory, t));
    }
    const double diff = compare(r.profile, s.trajectory);
    std::printf("sup difference = %.3g\n", diff);
    return diff < 1e-2 ? 0 : 1;
}
