#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "symphonic/errors.hpp"
#include "symphonic/geometry.hpp"

namespace symphonic {

enum class GradingKind { Uniform, Graded, Explicit };

/// Node distribution on [0, pi/2]. Explicit marks grids read back from files.
struct Grading {
    GradingKind kind = GradingKind::Uniform;
    double strength = 1.0;

    static Grading uniform() { return {}; }
    static Grading graded(double strength) { return {GradingKind::Graded, strength}; }

    friend bool operator==(const Grading&, const Grading&) = default;
};

inline std::string_view to_string(GradingKind kind) {
    switch (kind) {
        case GradingKind::Uniform: return "uniform";
        case GradingKind::Graded: return "graded";
        case GradingKind::Explicit: return "explicit";
    }
    return "uniform";
}

inline GradingKind parse_grading(std::string_view text) {
    if (text == "uniform") return GradingKind::Uniform;
    if (text == "graded") return GradingKind::Graded;
    throw InvalidConfig("unknown grading '" + std::string(text) + "' (expected uniform or graded)");
}

struct Grid {
    std::vector<double> nodes;
    Grading grading;

    std::size_t cells() const { return nodes.empty() ? 0 : nodes.size() - 1; }
    double midpoint(std::size_t cell) const { return 0.5 * (nodes[cell] + nodes[cell + 1]); }
    double width(std::size_t cell) const { return nodes[cell + 1] - nodes[cell]; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// n cells on [0, pi/2]. Graded(gamma) maps u = i/n through
/// u^gamma / (u^gamma + (1-u)^gamma), clustering nodes at both ends.
inline Grid make_grid(std::size_t n, Grading grading = Grading::uniform()) {
    if (n < 4) throw InvalidConfig("grid needs at least 4 cells, got " + std::to_string(n));
    if (grading.kind == GradingKind::Explicit)
        throw InvalidConfig("explicit grids come from data, not make_grid");
    if (grading.kind == GradingKind::Graded && !(grading.strength >= 1.0))
        throw InvalidConfig("grading strength must be >= 1");

    Grid grid;
    grid.grading = grading;
    grid.nodes.resize(n + 1);
    const bool uniform = grading.kind == GradingKind::Uniform || grading.strength == 1.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n);
        if (uniform) {
            grid.nodes[i] = half_pi * static_cast<double>(i) / static_cast<double>(n);
        } else {
            const double p = std::pow(u, grading.strength);
            const double q = std::pow(1.0 - u, grading.strength);
            grid.nodes[i] = half_pi * (p / (p + q));
        }
    }
    grid.nodes.front() = 0.0;
    grid.nodes.back() = half_pi;
    return grid;
}

inline Grid reflect(const Grid& grid) {
    Grid out;
    out.grading = grid.grading;
    out.nodes.resize(grid.nodes.size());
    const std::size_t n = grid.cells();
    for (std::size_t i = 0; i <= n; ++i) out.nodes[i] = half_pi - grid.nodes[n - i];
    out.nodes.front() = 0.0;
    out.nodes.back() = half_pi;
    return out;
}

/// Nodal values of a piecewise-linear candidate phi.
struct Profile {
    Grid grid;
    std::vector<double> values;

    std::size_t cells() const { return grid.cells(); }
    double slope(std::size_t cell) const {
        return (values[cell + 1] - values[cell]) / grid.width(cell);
    }
};

template <class F>
Profile sample_profile(const Grid& grid, F&& f) {
    Profile p{grid, std::vector<double>(grid.nodes.size())};
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) p.values[i] = f(grid.nodes[i]);
    return p;
}

/// phi(t) = t, the default initial profile.
inline Profile linear_profile(const Grid& grid) {
    return Profile{grid, grid.nodes};
}

/// t -> pi/2 - t, phi -> pi/2 - phi.
inline Profile reflect(const Profile& p) {
    Profile out{reflect(p.grid), std::vector<double>(p.values.size())};
    const std::size_t n = p.cells();
    for (std::size_t i = 0; i <= n; ++i) out.values[i] = half_pi - p.values[n - i];
    return out;
}

inline void check_grid(const Grid& grid) {
    if (grid.nodes.size() < 5) throw InvalidProfile("grid needs at least 4 cells");
    if (grid.nodes.front() != 0.0 || grid.nodes.back() != half_pi)
        throw InvalidProfile("grid endpoints must be exactly 0 and pi/2");
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i)
        if (!(grid.nodes[i + 1] > grid.nodes[i]))
            throw InvalidProfile("grid nodes must be strictly increasing");
}

/// Pinned endpoints (exactly 0 and pi/2) and 0 <= phi <= pi/2 everywhere.
inline bool is_feasible(const Profile& p) {
    if (p.values.size() != p.grid.nodes.size() || p.values.size() < 2) return false;
    if (p.values.front() != 0.0 || p.values.back() != half_pi) return false;
    return std::all_of(p.values.begin(), p.values.end(),
                       [](double v) { return v >= 0.0 && v <= half_pi; });
}

inline void check_feasible(const Profile& p) {
    check_grid(p.grid);
    if (p.values.size() != p.grid.nodes.size())
        throw InvalidProfile("profile has " + std::to_string(p.values.size()) + " values for " +
                             std::to_string(p.grid.nodes.size()) + " nodes");
    if (!is_feasible(p))
        throw InvalidProfile("profile must be pinned to 0 and pi/2 and stay within [0, pi/2]");
}

}  // namespace symphonic
