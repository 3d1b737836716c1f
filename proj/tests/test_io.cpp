#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace symphonic;

namespace {

std::string csv_of(const Profile& p) {
    const CoefficientSet co = make_coefficients(ProblemConfig::sphere_identity(2, 3));
    std::ostringstream out;
    write_profile_csv(out, p, residual(p, co));
    return out.str();
}

Profile parse(const std::string& text) {
    std::istringstream in(text);
    return read_profile_csv(in);
}

std::string rows(std::initializer_list<std::pair<double, double>> values) {
    std::string s = "t,phi,phi_prime,residual\n";
    for (auto [t, phi] : values) s += format_double(t) + "," + format_double(phi) + ",0,nan\n";
    return s;
}

json sphere_config() {
    return {{"mode", "join"}, {"m1", 3}, {"m2", 3}, {"a", 1}, {"b", 1},
            {"c", 1}, {"d", 1}, {"norm1", 3}, {"norm2", 3}};
}

}  // namespace

TEST(ProfileCsv, RoundTripIsBitExact) {
    symphonic::testing::Gen gen(10);
    for (int trial = 0; trial < 5; ++trial) {
        const Profile p = gen.profile(gen.grid(50));
        const Profile q = parse(csv_of(p));
        EXPECT_EQ(q.grid.nodes, p.grid.nodes);
        EXPECT_EQ(q.values, p.values);
        EXPECT_EQ(q.grid.grading.kind, GradingKind::Explicit);
    }
}

TEST(ProfileCsv, Layout) {
    const std::string text = csv_of(linear_profile(make_grid(8)));
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,phi,phi_prime,residual");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,1,nan");
    int count = 1;
    std::string last;
    while (std::getline(in, line)) {
        ++count;
        last = line;
    }
    EXPECT_EQ(count, 9);
    EXPECT_EQ(last, "1.5707963267948966,1.5707963267948966,1,nan");
}

TEST(ProfileCsv, EndpointsWithinToleranceAreSnapped) {
    const Profile p = parse(rows({{1e-10, -5e-10}, {0.4, 0.4}, {0.8, 0.8}, {1.2, 1.2}, {half_pi + 5e-10, half_pi}}));
    EXPECT_EQ(p.grid.nodes.front(), 0.0);
    EXPECT_EQ(p.values.front(), 0.0);
    EXPECT_EQ(p.grid.nodes.back(), half_pi);
    EXPECT_TRUE(is_feasible(p));
}

TEST(ProfileCsv, MalformedInputIsRejected) {
    EXPECT_THROW(parse("t,phi\n0,0\n"), FormatError);
    EXPECT_THROW(parse(""), FormatError);
    // not monotone
    EXPECT_THROW(parse(rows({{0, 0}, {0.8, 0.4}, {0.4, 0.8}, {1.2, 1.2}, {half_pi, half_pi}})), FormatError);
    // phi(0) = 0.1
    EXPECT_THROW(parse(rows({{0, 0.1}, {0.4, 0.4}, {0.8, 0.8}, {1.2, 1.2}, {half_pi, half_pi}})), FormatError);
    // last node short of pi/2
    EXPECT_THROW(parse(rows({{0, 0}, {0.4, 0.4}, {0.8, 0.8}, {1.2, 1.2}, {1.5, half_pi}})), FormatError);
    // leaves the box
    EXPECT_THROW(parse(rows({{0, 0}, {0.4, -0.2}, {0.8, 0.8}, {1.2, 1.2}, {half_pi, half_pi}})), FormatError);
    // too short
    EXPECT_THROW(parse(rows({{0, 0}, {0.8, 0.8}, {half_pi, half_pi}})), FormatError);
    EXPECT_THROW(parse("t,phi,phi_prime,residual\n0,0,1\n"), FormatError);
    EXPECT_THROW(parse("t,phi,phi_prime,residual\n0,zero,1,nan\n"), FormatError);
}

TEST(RunSpecJson, EchoRoundTrip) {
    json cfg = sphere_config();
    cfg["n"] = 321;
    cfg["metric"] = "gradient";
    cfg["seed"] = 42;
    cfg["quadrature"] = "midpoint";
    cfg["rk_steps"] = 1000;
    const RunSpec spec = run_spec_from_json(cfg);
    const json echo = to_json(spec);
    for (const KeyInfo& key : run_keys) EXPECT_TRUE(echo.contains(std::string(key.name))) << key.name;
    EXPECT_EQ(echo.size(), std::size(run_keys));
    const RunSpec again = run_spec_from_json(echo);
    EXPECT_EQ(to_json(again), echo);
    EXPECT_EQ(again.n, 321u);
    EXPECT_EQ(again.solver.metric, Metric::Gradient);
    EXPECT_EQ(again.solver.seed, 42u);
    EXPECT_EQ(again.solver.quadrature, QuadratureRule::Midpoint);
    EXPECT_EQ(again.cfg, ProblemConfig::sphere_identity(3, 3));
}

TEST(RunSpecJson, DefaultsAreEchoed) {
    const RunSpec spec = run_spec_from_json(sphere_config());
    const json echo = to_json(spec);
    EXPECT_EQ(echo["n"], 200);
    EXPECT_EQ(echo["grad_tol"], 1e-8);
    EXPECT_EQ(echo["max_iters"], 50000);
    EXPECT_EQ(echo["delta"], 0.05);
    EXPECT_EQ(echo["eps"], 1e-3);
    EXPECT_EQ(echo["rk_steps"], 20000);
    EXPECT_EQ(echo["xcheck_tol"], 2e-2);
    EXPECT_EQ(echo["init"], "linear");
    EXPECT_EQ(echo["r1"], 1.0);
}

TEST(RunSpecJson, Rejections) {
    json cfg = sphere_config();
    cfg["colour"] = "blue";
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    cfg = sphere_config();
    cfg.erase("norm2");
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    cfg = sphere_config();
    cfg["m1"] = 2.5;
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    cfg = sphere_config();
    cfg["n"] = 2;
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    cfg = sphere_config();
    cfg["seed"] = -1;
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    cfg = sphere_config();
    cfg["a"] = "one";
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    cfg = sphere_config();
    cfg["mode"] = "torus";
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    cfg = sphere_config();
    cfg["b"] = json::array({1, 2});
    EXPECT_THROW(run_spec_from_json(cfg), InvalidConfig);

    EXPECT_THROW(run_spec_from_json(json::array()), InvalidConfig);
}

TEST(RunSpecJson, ReportsCanBeReadBack) {
    json cfg = sphere_config();
    cfg["j_value"] = 0.5;
    cfg["converged"] = true;
    cfg["command"] = "solve";
    cfg["residual_sup"] = nullptr;
    EXPECT_NO_THROW(run_spec_from_json(cfg));
}

TEST(RunSpecJson, IntegralFloatsAreAccepted) {
    json cfg = sphere_config();
    cfg["m1"] = 3.0;
    EXPECT_EQ(run_spec_from_json(cfg).cfg.m1, 3);
}

TEST(Settings, CommandLineStrings) {
    EXPECT_EQ(parse_setting("m1", "4"), json(4));
    EXPECT_EQ(parse_setting("a", "1.25"), json(1.25));
    EXPECT_EQ(parse_setting("mode", "hopf"), json("hopf"));
    EXPECT_EQ(parse_setting("seed", "18446744073709551615"), json(18446744073709551615ull));
    EXPECT_THROW(parse_setting("m1", "4.5"), InvalidConfig);
    EXPECT_THROW(parse_setting("a", "1.2x"), InvalidConfig);
    EXPECT_THROW(parse_setting("a", "inf"), InvalidConfig);
    EXPECT_THROW(parse_setting("seed", "-3"), InvalidConfig);
    EXPECT_THROW(parse_setting("bogus", "1"), InvalidConfig);
}

TEST(Reports, SolveReportFields) {
    const RunSpec spec = run_spec_from_json(sphere_config());
    SolveReport r = minimize(spec.cfg, spec.grid(), spec.init, spec.solver);
    r.residual_sup = residual_sup(r.profile, make_coefficients(spec.cfg), spec.delta);
    const json j = solve_report_json(spec, r);
    EXPECT_EQ(j["j_value"].get<double>(), r.j_value);
    EXPECT_EQ(j["residual_sup"].get<double>(), r.residual_sup);
    EXPECT_EQ(j["a1"].get<double>(), 3.0);
    EXPECT_TRUE(j["converged"].get<bool>());
    // numbers survive a text round trip exactly
    const json back = json::parse(j.dump(2));
    EXPECT_EQ(back["j_value"].get<double>(), r.j_value);
    r.residual_sup = std::nan("");
    EXPECT_TRUE(solve_report_json(spec, r)["residual_sup"].is_null());
}
