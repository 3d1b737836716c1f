#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "symphonic/config.hpp"
#include "symphonic/errors.hpp"
#include "symphonic/euler_lagrange.hpp"
#include "symphonic/functional.hpp"
#include "symphonic/grid.hpp"
#include "symphonic/shooting.hpp"
#include "symphonic/solver.hpp"

namespace symphonic {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// profile CSV:  t,phi,phi_prime,residual   (17 significant digits, lossless)

inline constexpr std::string_view profile_csv_header = "t,phi,phi_prime,residual";
inline constexpr double endpoint_tolerance = 1e-9;

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Writes nodal t, phi, the nodal slope and the strong-form residual (nan at
/// the two endpoints, where it is undefined).
inline void write_profile_csv(std::ostream& out, const Profile& p, const std::vector<double>& res) {
    if (res.size() + 2 != p.values.size())
        throw InvalidProfile("residual array does not match the profile");
    const std::vector<double> slopes = nodal_slopes(p);
    out << profile_csv_header << '\n';
    const std::size_t n = p.cells();
    for (std::size_t i = 0; i <= n; ++i) {
        const double r = i == 0 || i == n ? std::numeric_limits<double>::quiet_NaN() : res[i - 1];
        out << format_double(p.grid.nodes[i]) << ',' << format_double(p.values[i]) << ','
            << format_double(slopes[i]) << ',' << format_double(r) << '\n';
    }
}

namespace detail {

inline double parse_real(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw FormatError("bad number '" + std::string(text) + "' for " + std::string(what));
    return value;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

}  // namespace detail

/// Reads t and phi back from a profile CSV. The other two columns are only
/// informative and are recomputed by whoever needs them. Endpoints within 1e-9
/// of their pinned values are snapped exactly; anything else is rejected.
inline Profile read_profile_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != profile_csv_header)
        throw FormatError("expected header '" + std::string(profile_csv_header) + "'");

    Profile p;
    p.grid.grading = {GradingKind::Explicit, 1.0};
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const std::string_view text = detail::trim(line);
        if (text.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (std::size_t pos; (pos = text.find(',', start)) != std::string_view::npos; start = pos + 1)
            fields.push_back(text.substr(start, pos - start));
        fields.push_back(text.substr(start));
        if (fields.size() != 4)
            throw FormatError("row " + std::to_string(row) + ": expected 4 columns, got " +
                              std::to_string(fields.size()));
        const double t = detail::parse_real(detail::trim(fields[0]), "t");
        const double phi = detail::parse_real(detail::trim(fields[1]), "phi");
        if (!p.grid.nodes.empty() && !(t > p.grid.nodes.back()))
            throw FormatError("row " + std::to_string(row) + ": t is not strictly increasing");
        p.grid.nodes.push_back(t);
        p.values.push_back(phi);
    }
    if (p.values.size() < 5) throw FormatError("profile needs at least 5 rows (4 cells)");

    auto pin = [](double& x, double target, const char* what) {
        if (std::abs(x - target) > endpoint_tolerance)
            throw FormatError(std::string(what) + " = " + format_double(x) + " is not pinned to " +
                              format_double(target));
        x = target;
    };
    pin(p.grid.nodes.front(), 0.0, "first t");
    pin(p.grid.nodes.back(), half_pi, "last t");
    pin(p.values.front(), 0.0, "phi(0)");
    pin(p.values.back(), half_pi, "phi(pi/2)");
    if (!(p.grid.nodes[1] > 0.0) || !(p.grid.nodes[p.cells() - 1] < half_pi))
        throw FormatError("t is not strictly increasing after pinning the endpoints");
    for (double v : p.values)
        if (v < 0.0 || v > half_pi) throw FormatError("phi leaves [0, pi/2]");
    return p;
}

// ---------------------------------------------------------------------------
// run settings and their flat JSON form

/// Everything a CLI run depends on. Field names in JSON match these exactly.
struct RunSpec {
    ProblemConfig cfg;
    std::size_t n = 200;
    GradingKind grading = GradingKind::Uniform;
    double grading_strength = 2.0;  // used when grading is graded
    SolverOptions solver;
    InitKind init = InitKind::Linear;
    double delta = default_residual_margin;
    ShootingOptions shooting;
    double xcheck_tol = 2e-2;

    Grid grid() const {
        return make_grid(n, grading == GradingKind::Graded ? Grading::graded(grading_strength)
                                                           : Grading::uniform());
    }

    void validate() const {
        cfg.validate();
        if (n < 4) throw InvalidConfig("n must be >= 4, got " + std::to_string(n));
        if (grading == GradingKind::Graded && !(grading_strength >= 1.0))
            throw InvalidConfig("grading_strength must be >= 1");
        solver.validate();
        shooting.validate();
        if (!(delta > 0 && delta < half_pi / 2)) throw InvalidConfig("delta must lie in (0, pi/4)");
        if (!(xcheck_tol > 0)) throw InvalidConfig("xcheck_tol must be > 0");
    }
};

enum class KeyKind { Int, Count, Seed, Real, Text };

struct KeyInfo {
    std::string_view name;
    KeyKind kind;
    std::string_view group;  // problem, grid, solver, residual, shooting
    std::string_view help;
};

inline constexpr KeyInfo run_keys[] = {
    {"mode", KeyKind::Text, "problem", "join or hopf"},
    {"m1", KeyKind::Int, "problem", "dimension of the cos t sphere factor"},
    {"m2", KeyKind::Int, "problem", "dimension of the sin t sphere factor"},
    {"a", KeyKind::Real, "problem", "domain axis on the cos t factor"},
    {"b", KeyKind::Real, "problem", "domain axis on the sin t factor"},
    {"c", KeyKind::Real, "problem", "target axis (cos phi)"},
    {"d", KeyKind::Real, "problem", "target axis (sin phi)"},
    {"norm1", KeyKind::Real, "problem", "squared pullback norm of the first map"},
    {"norm2", KeyKind::Real, "problem", "squared pullback norm of the second map"},
    {"r1", KeyKind::Real, "problem", "radius of the first sphere (recorded only)"},
    {"r2", KeyKind::Real, "problem", "radius of the second sphere (recorded only)"},
    {"n", KeyKind::Count, "grid", "number of cells"},
    {"grading", KeyKind::Text, "grid", "uniform or graded"},
    {"grading_strength", KeyKind::Real, "grid", "end clustering exponent for graded grids"},
    {"max_iters", KeyKind::Int, "solver", "iteration cap"},
    {"grad_tol", KeyKind::Real, "solver", "projected-gradient sup-norm tolerance"},
    {"step0", KeyKind::Real, "solver", "initial line-search step"},
    {"backtrack", KeyKind::Real, "solver", "step shrink factor"},
    {"armijo", KeyKind::Real, "solver", "sufficient-decrease constant"},
    {"seed", KeyKind::Seed, "solver", "seed for random init"},
    {"metric", KeyKind::Text, "solver", "newton or gradient"},
    {"step_tol", KeyKind::Real, "solver", "Newton step tolerance"},
    {"init", KeyKind::Text, "solver", "linear or random"},
    {"quadrature", KeyKind::Text, "residual", "per-cell rule for J: gauss3 or midpoint"},
    {"delta", KeyKind::Real, "residual", "residual statistic covers [delta, pi/2 - delta]"},
    {"eps", KeyKind::Real, "shooting", "integration runs over [eps, pi/2 - eps]"},
    {"rk_steps", KeyKind::Int, "shooting", "RK4 steps"},
    {"slope_lo", KeyKind::Real, "shooting", "lower initial-slope bracket"},
    {"slope_hi", KeyKind::Real, "shooting", "upper initial-slope bracket"},
    {"bisect_tol", KeyKind::Real, "shooting", "bracket width stop"},
    {"target_tol", KeyKind::Real, "shooting", "boundary miss stop"},
    {"xcheck_tol", KeyKind::Real, "shooting", "oracle passes if sup|phi_min - phi_shoot| is below this"},
};

/// Keys without a default; a run needs each of them from a flag or the config file.
inline constexpr std::string_view required_keys[] = {"mode", "m1", "m2", "a", "b", "c", "d", "norm1", "norm2"};

/// Result fields written into reports. A report can be fed back as --config,
/// so these are accepted and ignored by the loader.
inline constexpr std::string_view report_keys[] = {
    "command", "a1", "a2", "j_value", "iterations", "converged", "projected_grad_norm",
    "residual_sup", "s_star", "shoot_miss", "shoot_evaluations", "non_monotone", "sup_diff",
    "xcheck_passed", "cells"};

inline const KeyInfo* find_key(std::string_view name) {
    for (const KeyInfo& k : run_keys)
        if (k.name == name) return &k;
    return nullptr;
}

inline bool is_report_key(std::string_view name) {
    return std::find(std::begin(report_keys), std::end(report_keys), name) != std::end(report_keys);
}

namespace detail {

inline long long json_int(const json& v, std::string_view key) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
    }
    throw InvalidConfig(std::string(key) + " must be an integer");
}

inline double json_real(const json& v, std::string_view key) {
    if (!v.is_number()) throw InvalidConfig(std::string(key) + " must be a number");
    return v.get<double>();
}

inline std::string json_text(const json& v, std::string_view key) {
    if (!v.is_string()) throw InvalidConfig(std::string(key) + " must be a string");
    return v.get<std::string>();
}

inline int narrow_int(long long x, std::string_view key) {
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw InvalidConfig(std::string(key) + " is out of range");
    return static_cast<int>(x);
}

}  // namespace detail

/// Sets one field from its JSON value.
inline void apply_setting(RunSpec& spec, std::string_view key, const json& v) {
    using namespace detail;
    auto real = [&] { return json_real(v, key); };
    auto integer = [&] { return narrow_int(json_int(v, key), key); };

    if (key == "mode") spec.cfg.mode = parse_mode(json_text(v, key));
    else if (key == "m1") spec.cfg.m1 = integer();
    else if (key == "m2") spec.cfg.m2 = integer();
    else if (key == "a") spec.cfg.a = real();
    else if (key == "b") spec.cfg.b = real();
    else if (key == "c") spec.cfg.c = real();
    else if (key == "d") spec.cfg.d = real();
    else if (key == "norm1") spec.cfg.norm1 = real();
    else if (key == "norm2") spec.cfg.norm2 = real();
    else if (key == "r1") spec.cfg.r1 = real();
    else if (key == "r2") spec.cfg.r2 = real();
    else if (key == "n") {
        const long long n = json_int(v, key);
        if (n < 4) throw InvalidConfig("n must be >= 4, got " + std::to_string(n));
        spec.n = static_cast<std::size_t>(n);
    } else if (key == "grading") spec.grading = parse_grading(json_text(v, key));
    else if (key == "grading_strength") spec.grading_strength = real();
    else if (key == "max_iters") spec.solver.max_iters = integer();
    else if (key == "grad_tol") spec.solver.grad_tol = real();
    else if (key == "step0") spec.solver.step0 = real();
    else if (key == "backtrack") spec.solver.backtrack = real();
    else if (key == "armijo") spec.solver.armijo = real();
    else if (key == "seed") {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw InvalidConfig("seed must be a non-negative integer");
        spec.solver.seed = v.get<std::uint64_t>();
    } else if (key == "metric") spec.solver.metric = parse_metric(json_text(v, key));
    else if (key == "step_tol") spec.solver.step_tol = real();
    else if (key == "init") spec.init = parse_init(json_text(v, key));
    else if (key == "quadrature") spec.solver.quadrature = parse_quadrature(json_text(v, key));
    else if (key == "delta") spec.delta = real();
    else if (key == "eps") spec.shooting.eps = real();
    else if (key == "rk_steps") spec.shooting.rk_steps = integer();
    else if (key == "slope_lo") spec.shooting.slope_lo = real();
    else if (key == "slope_hi") spec.shooting.slope_hi = real();
    else if (key == "bisect_tol") spec.shooting.bisect_tol = real();
    else if (key == "target_tol") spec.shooting.target_tol = real();
    else if (key == "xcheck_tol") spec.xcheck_tol = real();
    else throw InvalidConfig("unknown config key '" + std::string(key) + "'");
}

/// Converts a command-line string to the JSON value a key expects.
inline json parse_setting(std::string_view key, std::string_view text) {
    const KeyInfo* info = find_key(key);
    if (!info) throw InvalidConfig("unknown config key '" + std::string(key) + "'");
    auto fail = [&]() -> json {
        throw InvalidConfig("bad value '" + std::string(text) + "' for --" + std::string(key));
    };
    const char* end = text.data() + text.size();
    switch (info->kind) {
        case KeyKind::Int:
        case KeyKind::Count: {
            long long x = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), end, x);
            if (ec != std::errc() || ptr != end) return fail();
            return x;
        }
        case KeyKind::Seed: {
            std::uint64_t x = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), end, x);
            if (ec != std::errc() || ptr != end) return fail();
            return x;
        }
        case KeyKind::Real: {
            double x = 0.0;
            const auto [ptr, ec] = std::from_chars(text.data(), end, x);
            if (ec != std::errc() || ptr != end || !std::isfinite(x)) return fail();
            return x;
        }
        case KeyKind::Text: return std::string(text);
    }
    return fail();
}

/// Builds a validated RunSpec from a flat object. Unknown keys are errors,
/// result keys from a previous report are skipped, and with require_problem
/// every problem key must be present.
inline RunSpec run_spec_from_json(const json& obj, bool require_problem = true) {
    if (!obj.is_object()) throw InvalidConfig("config must be a flat JSON object");
    RunSpec spec;
    for (const auto& [key, value] : obj.items()) {
        if (is_report_key(key)) continue;
        if (value.is_object() || value.is_array())
            throw InvalidConfig("config key '" + key + "' must be a scalar");
        apply_setting(spec, key, value);
    }
    if (require_problem)
        for (std::string_view key : required_keys)
            if (!obj.contains(std::string(key)))
                throw InvalidConfig("missing required setting '" + std::string(key) + "'");
    spec.validate();
    return spec;
}

inline json read_json_file(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
}

/// Every effective setting, named as in run_keys.
inline json to_json(const RunSpec& spec) {
    const ProblemConfig& c = spec.cfg;
    const SolverOptions& s = spec.solver;
    const ShootingOptions& o = spec.shooting;
    return {
        {"mode", to_string(c.mode)}, {"m1", c.m1}, {"m2", c.m2}, {"a", c.a}, {"b", c.b},
        {"c", c.c}, {"d", c.d}, {"norm1", c.norm1}, {"norm2", c.norm2}, {"r1", c.r1}, {"r2", c.r2},
        {"n", spec.n}, {"grading", to_string(spec.grading)},
        {"grading_strength", spec.grading_strength},
        {"max_iters", s.max_iters}, {"grad_tol", s.grad_tol}, {"step0", s.step0},
        {"backtrack", s.backtrack}, {"armijo", s.armijo}, {"seed", s.seed},
        {"metric", to_string(s.metric)}, {"step_tol", s.step_tol}, {"init", to_string(spec.init)},
        {"quadrature", to_string(s.quadrature)}, {"delta", spec.delta},
        {"eps", o.eps}, {"rk_steps", o.rk_steps}, {"slope_lo", o.slope_lo},
        {"slope_hi", o.slope_hi}, {"bisect_tol", o.bisect_tol}, {"target_tol", o.target_tol},
        {"xcheck_tol", spec.xcheck_tol},
    };
}

/// JSON has no NaN; undefined statistics are written as null.
inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

/// Config echo plus the solve statistics.
inline json solve_report_json(const RunSpec& spec, const SolveReport& report) {
    const CoefficientSet coeffs = make_coefficients(spec.cfg);
    json out = to_json(spec);
    out["a1"] = coeffs.a1;
    out["a2"] = coeffs.a2;
    out["j_value"] = report.j_value;
    out["iterations"] = report.iterations;
    out["converged"] = report.converged;
    out["projected_grad_norm"] = report.projected_grad_norm;
    out["residual_sup"] = number_or_null(report.residual_sup);
    return out;
}

/// Trajectory states as t,phi,psi rows.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,phi,psi\n";
    for (const FirstOrderState& s : traj.states)
        out << format_double(s.t) << ',' << format_double(s.phi) << ',' << format_double(s.psi) << '\n';
}

}  // namespace symphonic
