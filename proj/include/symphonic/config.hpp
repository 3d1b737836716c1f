#pragma once

#include <string>
#include <string_view>

#include "symphonic/errors.hpp"

namespace symphonic {

enum class Mode { Join, Hopf };

inline std::string_view to_string(Mode mode) {
    return mode == Mode::Join ? "join" : "hopf";
}

inline Mode parse_mode(std::string_view text) {
    if (text == "join") return Mode::Join;
    if (text == "hopf") return Mode::Hopf;
    throw InvalidConfig("unknown mode '" + std::string(text) + "' (expected join or hopf)");
}

/// Full parameter tuple of the reduced problem.
///
/// (m1, a) describe the cos-t factor of the domain ellipsoid, (m2, b) the sin-t
/// factor. c, d are the axes of the target. norm1/norm2 are the constant
/// pointwise squared norms of the pullback metrics of the input maps; the
/// identity of S^m contributes m. r1/r2 are carried for the record only and
/// enter no formula.
struct ProblemConfig {
    int m1 = 1;
    int m2 = 1;
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
    double d = 1.0;
    double norm1 = 0.0;
    double norm2 = 0.0;
    double r1 = 1.0;
    double r2 = 1.0;
    Mode mode = Mode::Join;

    void validate() const {
        if (m1 < 1 || m2 < 1) throw InvalidConfig("m1 and m2 must be >= 1");
        // written as !(x > 0) so NaN is rejected too
        if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0))
            throw InvalidConfig("ellipsoid axes a, b, c, d must be > 0");
        if (!(r1 > 0) || !(r2 > 0)) throw InvalidConfig("radii r1, r2 must be > 0");
        if (!(norm1 >= 0) || !(norm2 >= 0))
            throw InvalidConfig("pullback norms norm1, norm2 must be >= 0");
    }

    /// Identity maps on S^m1 and S^m2 between unit spheres; phi(t) = t solves it.
    static ProblemConfig sphere_identity(int m1, int m2, Mode mode = Mode::Join) {
        ProblemConfig cfg;
        cfg.m1 = m1;
        cfg.m2 = m2;
        cfg.norm1 = m1;
        cfg.norm2 = m2;
        cfg.mode = mode;
        return cfg;
    }

    friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

/// Mirror partner under t -> pi/2 - t, phi -> pi/2 - phi.
inline ProblemConfig swapped(const ProblemConfig& cfg) {
    ProblemConfig out = cfg;
    out.m1 = cfg.m2;
    out.m2 = cfg.m1;
    out.a = cfg.b;
    out.b = cfg.a;
    out.c = cfg.d;
    out.d = cfg.c;
    out.norm1 = cfg.norm2;
    out.norm2 = cfg.norm1;
    out.r1 = cfg.r2;
    out.r2 = cfg.r1;
    return out;
}

/// Degree-k harmonic homogeneous polynomial map on S^p.
struct EigenmapSpec {
    int k = 1;
    int p = 1;
};

}  // namespace symphonic
