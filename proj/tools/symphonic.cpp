// Command-line front end: solve | oracle | residual | sweep.
//
// Exit codes: 0 ok, 1 usage or invalid input, 2 numerical failure
// (non-convergence, no shooting bracket), 3 oracle cross-check failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "symphonic/io.hpp"
#include "symphonic/symphonic.hpp"

using namespace symphonic;

namespace {

enum Exit { ok = 0, usage = 1, numerical = 2, xcheck = 3 };

std::string dashed(std::string_view key) {
    std::string s(key);
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

bool is_required(std::string_view key) {
    return std::find(std::begin(required_keys), std::end(required_keys), key) != std::end(required_keys);
}

/// Flags for a set of run_keys groups, collected as raw strings and merged
/// over the optional --config file after parsing.
struct SpecFlags {
    std::map<std::string, std::string> raw;
    std::vector<std::pair<std::string, CLI::Option*>> options;
    std::string config;

    void attach(CLI::App* app, std::initializer_list<std::string_view> groups) {
        static const json defaults = to_json(RunSpec{});
        app->add_option("--config", config, "flat JSON file with any of the settings below; flags win")
            ->check(CLI::ExistingFile);
        for (const KeyInfo& key : run_keys) {
            if (std::find(groups.begin(), groups.end(), key.group) == groups.end()) continue;
            std::string help(key.help);
            help += is_required(key.name) ? " (required)" : " (default " + defaults.at(std::string(key.name)).dump() + ")";
            const std::string name(key.name);
            CLI::Option* opt = app->add_option("--" + dashed(key.name), raw[name], help);
            opt->group(std::string(key.group));
            opt->type_name(key.kind == KeyKind::Real   ? "FLOAT"
                           : key.kind == KeyKind::Text ? "TEXT"
                                                       : "INT");
            options.emplace_back(name, opt);
        }
    }

    json merged() const {
        json obj = json::object();
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) throw InvalidConfig("cannot read config file " + config);
            obj = read_json_file(in);
            if (!obj.is_object()) throw InvalidConfig("config must be a flat JSON object");
        }
        for (const auto& [name, opt] : options)
            if (opt->count() > 0) obj[name] = parse_setting(name, raw.at(name));
        return obj;
    }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Residual per interior node, or all-NaN when the grid is too coarse for the stencil.
std::vector<double> residual_or_nan(const Profile& p, const CoefficientSet& coeffs) {
    if (p.cells() < 8) return std::vector<double>(p.cells() - 1, std::numeric_limits<double>::quiet_NaN());
    return residual(p, coeffs);
}

struct Solved {
    SolveReport report;
    std::vector<double> res;
};

Solved run_solve(const RunSpec& spec) {
    Solved s;
    s.report = minimize(spec.cfg, spec.grid(), spec.init, spec.solver);
    s.res = residual_or_nan(s.report.profile, make_coefficients(spec.cfg));
    s.report.residual_sup = s.report.profile.cells() < 8
                                ? std::numeric_limits<double>::quiet_NaN()
                                : residual_sup(s.report.profile, s.res, spec.delta);
    return s;
}

std::string profile_csv(const Solved& s) {
    std::ostringstream out;
    write_profile_csv(out, s.report.profile, s.res);
    return out.str();
}

void print_summary(const char* what, const SolveReport& r) {
    std::printf("%s: converged=%d iterations=%d j_value=%.17g residual_sup=%.17g projected_grad_norm=%.3g\n",
                what, r.converged ? 1 : 0, r.iterations, r.j_value, r.residual_sup, r.projected_grad_norm);
}

int cmd_solve(const RunSpec& spec, const std::string& out) {
    const Solved s = run_solve(spec);
    json report = solve_report_json(spec, s.report);
    report["command"] = "solve";
    write_file(out + ".profile.csv", profile_csv(s));
    write_file(out + ".report.json", dump(report));
    print_summary("solve", s.report);
    return s.report.converged ? ok : numerical;
}

int cmd_oracle(const RunSpec& spec, const std::string& out) {
    const Solved s = run_solve(spec);
    const CoefficientSet coeffs = make_coefficients(spec.cfg);
    ShootResult shot;
    try {
        shot = shoot(coeffs, spec.shooting);
    } catch (const BracketFailure& e) {
        std::fprintf(stderr, "symphonic: shooting failed: %s\n", e.what());
        return numerical;
    }
    const double diff = compare(s.report.profile, shot.trajectory);
    const bool passed = diff < spec.xcheck_tol;

    json report = solve_report_json(spec, s.report);
    report["command"] = "oracle";
    report["s_star"] = shot.slope;
    report["shoot_miss"] = shot.miss;
    report["shoot_evaluations"] = shot.evaluations;
    report["non_monotone"] = shot.non_monotone;
    report["sup_diff"] = number_or_null(diff);
    report["xcheck_passed"] = passed;

    std::ostringstream traj;
    write_trajectory_csv(traj, shot.trajectory);
    write_file(out + ".profile.csv", profile_csv(s));
    write_file(out + ".oracle.csv", traj.str());
    write_file(out + ".report.json", dump(report));

    print_summary("oracle", s.report);
    std::printf("oracle: s_star=%.17g miss=%.3g sup_diff=%.17g xcheck_tol=%g %s\n", shot.slope, shot.miss,
                diff, spec.xcheck_tol, passed ? "PASS" : "FAIL");
    if (shot.non_monotone) std::fprintf(stderr, "symphonic: warning: hit(s) changes sign more than once on the bracket\n");
    if (!s.report.converged) return numerical;
    return passed ? ok : xcheck;
}

int cmd_residual(RunSpec spec, const std::string& profile_path, const std::string& out) {
    std::ifstream in(profile_path);
    if (!in) throw FormatError("cannot read profile " + profile_path);
    const Profile p = read_profile_csv(in);
    if (p.cells() < 8) throw FormatError("residual needs a profile with at least 8 cells");
    const CoefficientSet coeffs = make_coefficients(spec.cfg);
    const std::vector<double> res = residual(p, coeffs);
    const double sup = residual_sup(p, res, spec.delta);
    const double j = evaluate_J(p, coeffs, spec.solver.quadrature);

    std::printf("residual: cells=%zu j_value=%.17g residual_sup=%.17g delta=%g\n", p.cells(), j, sup, spec.delta);
    if (!out.empty()) {
        spec.n = p.cells();
        json report = to_json(spec);
        report["command"] = "residual";
        report["j_value"] = j;
        report["residual_sup"] = number_or_null(sup);
        write_file(out + ".report.json", dump(report));
    }
    return ok;
}

struct SweepFlags {
    std::string axis;
    std::vector<double> values;
    std::optional<double> lo, hi;
    std::optional<int> count;
    bool with_oracle = false;
};

struct SweepRow {
    double axis_value = 0.0;
    double j_value = std::numeric_limits<double>::quiet_NaN();
    double residual_sup = std::numeric_limits<double>::quiet_NaN();
    double s_star = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::string status = "invalid";
};

unsigned sweep_threads(std::size_t rows) {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SYMPHONIC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) cap = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(cap, rows));
}

int cmd_sweep(const json& base, const SweepFlags& f, const std::string& out) {
    static constexpr std::string_view axes[] = {"m1", "m2", "a", "b", "c", "d", "norm1", "norm2", "r1", "r2"};
    if (std::find(std::begin(axes), std::end(axes), f.axis) == std::end(axes))
        throw InvalidConfig("sweep axis must be a numeric problem field (m1, m2, a, b, c, d, norm1, norm2, r1, r2), got '" +
                            f.axis + "'");
    const bool integral = f.axis == "m1" || f.axis == "m2";

    std::vector<double> values = f.values;
    const bool range = f.lo || f.hi || f.count;
    if (range == !values.empty()) throw InvalidConfig("give either --values or all of --lo, --hi, --count");
    if (range) {
        if (!f.lo || !f.hi || !f.count) throw InvalidConfig("a range sweep needs --lo, --hi and --count");
        if (*f.count < 2) throw InvalidConfig("--count must be >= 2");
        for (int i = 0; i < *f.count; ++i)
            values.push_back(i + 1 == *f.count ? *f.hi : *f.lo + (*f.hi - *f.lo) * i / (*f.count - 1));
    }
    if (values.size() < 2) throw InvalidConfig("a sweep needs at least 2 values");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidConfig("sweep values must be finite");
        if (integral && v != std::floor(v)) throw InvalidConfig(f.axis + " values must be integers");
    }

    // every row shares the base settings; only the axis value is swapped in,
    // so a bad base is a usage error rather than a column of failed rows
    {
        json probe = base;
        probe[f.axis] = integral ? json(static_cast<long long>(values[0])) : json(values[0]);
        run_spec_from_json(probe);
    }

    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
            SweepRow& row = rows[i];
            row.axis_value = values[i];
            try {
                json obj = base;
                obj[f.axis] = integral ? json(static_cast<long long>(values[i])) : json(values[i]);
                const RunSpec spec = run_spec_from_json(obj);
                const Solved s = run_solve(spec);
                row.j_value = s.report.j_value;
                row.residual_sup = s.report.residual_sup;
                row.converged = s.report.converged;
                row.status = row.converged ? "ok" : "not_converged";
                if (f.with_oracle) {
                    try {
                        row.s_star = shoot(make_coefficients(spec.cfg), spec.shooting).slope;
                    } catch (const BracketFailure&) {
                        row.status = "bracket_failure";
                    }
                }
            } catch (const std::invalid_argument&) {
                row.status = "invalid";
            } catch (const std::domain_error&) {
                row.status = "invalid";
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned threads = sweep_threads(rows.size());
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "axis_value,j_value,residual_sup,converged" << (f.with_oracle ? ",s_star" : "") << ",status\n";
    std::size_t good = 0;
    for (const SweepRow& r : rows) {
        csv << format_double(r.axis_value) << ',' << format_double(r.j_value) << ','
            << format_double(r.residual_sup) << ',' << (r.converged ? 1 : 0);
        if (f.with_oracle) csv << ',' << format_double(r.s_star);
        csv << ',' << r.status << '\n';
        good += r.status == "ok";
    }
    write_file(out + ".sweep.csv", csv.str());
    std::printf("sweep %s: %zu rows, %zu ok -> %s.sweep.csv\n", f.axis.c_str(), rows.size(), good, out.c_str());
    return good == rows.size() ? ok : numerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduction-profile solver for symphonic joins and Hopf constructions between ellipsoids"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "minimize the discrete energy; write <out>.profile.csv and <out>.report.json");
    auto* oracle = app.add_subcommand("oracle", "solve, then cross-check against RK4 shooting; also writes <out>.oracle.csv");
    auto* resid = app.add_subcommand("residual", "evaluate residual and J of an existing profile CSV");
    auto* sweep = app.add_subcommand("sweep", "solve along one problem field; write <out>.sweep.csv");

    SpecFlags solve_flags, oracle_flags, resid_flags, sweep_flags;
    solve_flags.attach(solve, {"problem", "grid", "solver", "residual"});
    oracle_flags.attach(oracle, {"problem", "grid", "solver", "residual", "shooting"});
    resid_flags.attach(resid, {"problem", "residual"});
    sweep_flags.attach(sweep, {"problem", "grid", "solver", "residual", "shooting"});

    std::string solve_out, oracle_out, resid_out, sweep_out, profile_path;
    solve->add_option("--out", solve_out, "output prefix")->required();
    oracle->add_option("--out", oracle_out, "output prefix")->required();
    resid->add_option("profile", profile_path, "profile CSV (t,phi,phi_prime,residual)")->required();
    resid->add_option("--out", resid_out, "optional prefix for <out>.report.json");

    SweepFlags sf;
    double lo = 0, hi = 0;
    int count = 0;
    sweep->add_option("--out", sweep_out, "output prefix")->required();
    sweep->add_option("--axis", sf.axis, "problem field to vary")->required();
    sweep->add_option("--values", sf.values, "explicit comma-separated values")->delimiter(',');
    auto* lo_opt = sweep->add_option("--lo", lo, "range start");
    auto* hi_opt = sweep->add_option("--hi", hi, "range end (inclusive)");
    auto* count_opt = sweep->add_option("--count", count, "number of range points (>= 2)");
    sweep->add_flag("--with-oracle", sf.with_oracle, "also shoot each row and record s_star");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        if (active == solve) return cmd_solve(run_spec_from_json(solve_flags.merged()), solve_out);
        if (active == oracle) return cmd_oracle(run_spec_from_json(oracle_flags.merged()), oracle_out);
        if (active == resid) return cmd_residual(run_spec_from_json(resid_flags.merged()), profile_path, resid_out);
        if (lo_opt->count()) sf.lo = lo;
        if (hi_opt->count()) sf.hi = hi;
        if (count_opt->count()) sf.count = count;
        return cmd_sweep(sweep_flags.merged(), sf, sweep_out);
    } catch (const InvalidConfig& e) {
        std::fprintf(stderr, "symphonic: error: %s\n\n%s", e.what(), active->help().c_str());
        return usage;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "symphonic: error: %s\n", e.what());
        return usage;
    } catch (const InvalidProfile& e) {
        std::fprintf(stderr, "symphonic: error: %s\n", e.what());
        return usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "symphonic: error: %s\n", e.what());
        return usage;
    }
}
