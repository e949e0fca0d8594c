#include "doctest.h"

#include "llrk/bench.hpp"
#include "oracles.hpp"

using namespace llrk;

TEST_CASE("parse_config: empty document yields all defaults") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg == RunConfig{});
    CHECK(cfg.example == 1);
    CHECK(cfg.scheme == "llrk4");
    CHECK(cfg.pade.p == 6);
    CHECK(cfg.pade.q == 6);
    CHECK(cfg.refine == 16);
}

TEST_CASE("parse_config: representative document") {
    const RunConfig cfg = parse_config(
        "# an experiment\n"
        "scheme = llrk4\n"
        "h = 0.25\n"
        "example = 1\n"
        "pade = 2,3\n"
        "param.mu = 14.5\n"
        "seed = 7\n");
    CHECK(cfg.scheme == "llrk4");
    CHECK(cfg.h == 0.25);
    CHECK(cfg.example == 1);
    CHECK(cfg.pade.p == 2);
    CHECK(cfg.pade.q == 3);
    CHECK(cfg.parameters.at("param.mu") == 14.5);
    CHECK(cfg.seed == 7);
    CHECK(bare_parameters(cfg).at("mu") == 14.5);
}

TEST_CASE("parse_config: unknown keys are errors naming the key") {
    try {
        parse_config("stepsize = 0.1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("stepsize") != std::string::npos);
        CHECK(what.find("line 1") != std::string::npos);
    }
}

TEST_CASE("parse_config: malformed input diagnostics") {
    CHECK_THROWS_AS(parse_config("example\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("example = eight\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("example = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("h = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("pade = 6\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("pade = 0,0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("h = 1\nh = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("refine = 0\n"), ConfigError);
}

TEST_CASE("config round-trips through serialization") {
    RunConfig cfg;
    cfg.example = 6;
    cfg.scheme = "llrk:dp5";
    cfg.h = 0.01;
    cfg.steps = 0;
    cfg.pade = {2, 4};
    cfg.out = "run.csv";
    cfg.seed = 99;
    cfg.refine = 32;
    cfg.parameters["param.epsilon"] = 500.0;
    const RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back == cfg);
}

TEST_CASE("fmt_double: stable 17-digit decimal form") {
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(fmt_double(-0.0) == "-0");
}

TEST_CASE("csv document layout") {
    Csv csv;
    csv.comments = {"note"};
    csv.columns = {"a", "b"};
    csv.rows = {{"1", "2"}, {"3", "4"}};
    CHECK(csv.to_string() == "# note\na,b\n1,2\n3,4\n");
}

TEST_CASE("reference_solution: scalar linear decay matches the closed form") {
    OdeSystem sys;
    sys.dim = 1;
    sys.field = [](double, std::span<const double> x, std::span<double> f) { f[0] = -x[0]; };
    sys.jacobian = [](double, std::span<const double>, DenseMatrix& j) { j(0, 0) = -1.0; };
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 10);
    const Trajectory ref = reference_solution(sys, grid, Vector{1.0}, 16);
    for (std::size_t n = 0; n < ref.states.size(); ++n)
        CHECK(std::abs(ref.states[n][0] - std::exp(-grid.nodes[n])) <= 1e-12);
}

TEST_CASE("reference_solution: example 4 against the matrix-exponential closed form") {
    const ExampleSpec spec = example_defaults(4);
    const OdeSystem sys = make_example(spec);
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 11);
    const Trajectory ref = reference_solution(sys, grid, spec.initial_state, 16);
    const DenseMatrix h100 = hilbert(12) * (-100.0);
    for (std::size_t n = 0; n < ref.states.size(); ++n) {
        const DenseMatrix flow = oracles::taylor_expm(h100 * grid.nodes[n]);
        const Vector moved = flow * Vector(12, 2.0);
        for (std::size_t i = 0; i < 12; ++i)
            CHECK(std::abs(ref.states[n][i] - (moved[i] - 1.0)) <= 1e-9);
    }
}

TEST_CASE("reference_solution: refine = 1 is rejected") {
    OdeSystem sys;
    sys.dim = 1;
    sys.field = [](double, std::span<const double> x, std::span<double> f) { f[0] = -x[0]; };
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 4);
    CHECK_THROWS_AS(reference_solution(sys, grid, Vector{1.0}, 1), Error);
}

TEST_CASE("reference_solution: an unreachable self-check hits the cap") {
    OdeSystem sys;
    sys.dim = 1;
    sys.field = [](double, std::span<const double> x, std::span<double> f) { f[0] = -x[0]; };
    const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 2);
    CHECK_THROWS_AS(reference_solution(sys, grid, Vector{1.0}, 2, /*tol*/ 1e-18, /*cap*/ 4),
                    ReferenceUnconverged);
}

TEST_CASE("reference_solution: doubling refine does not move accepted values") {
    const ExampleSpec spec = example_defaults(6);
    const OdeSystem sys = make_example(spec);
    const TimeGrid grid = TimeGrid::uniform(0.0, 2.0, 20);
    const Trajectory a = reference_solution(sys, grid, spec.initial_state, 16);
    const Trajectory b = reference_solution(sys, grid, spec.initial_state, 32);
    for (std::size_t n = 0; n < a.states.size(); ++n)
        for (std::size_t i = 0; i < a.states[n].size(); ++i) {
            const double z = b.states[n][i];
            if (std::abs(z) < 1e-12) continue;
            CHECK(std::abs(a.states[n][i] - z) / std::abs(z) <= 1e-10);
        }
}

TEST_CASE("table2 default step counts") {
    CHECK(table2_default_ns(2) == 334);
    CHECK(table2_default_ns(3) == 287);
    CHECK(table2_default_ns(4) == 66);
    CHECK(table2_default_ns(5) == 49);
    CHECK(table2_default_ns(6) == 47);
    CHECK(table2_default_ns(7) == 2285);
    CHECK_THROWS_AS(table2_default_ns(1), UnknownExample);
}

TEST_CASE("stability_region: (1,1) stays inside the unit disk on a coarse grid") {
    const StabilityScan scan = stability_region({1, 1}, -100.0, 0.0, -100.0, 100.0, 41, 41);
    CHECK(scan.rows.size() == 41 * 41);
    CHECK(scan.max_abs <= 1.0 + 1e-12);
}

TEST_CASE("stability_region: (2,0) reports a violation on the imaginary axis") {
    const StabilityScan scan = stability_region({2, 0}, -10.0, 0.0, -10.0, 10.0, 21, 21);
    CHECK(scan.max_abs > 1.0);
}

TEST_CASE("portrait: example 6 settles into a bounded loop") {
    PortraitOptions opt;
    opt.example = 6;
    opt.scheme = "llrk4";
    opt.h = 0.01;
    const PortraitData data = portrait(opt);
    REQUIRE(data.series.size() == 2);
    CHECK(data.series[1].name == "eq0_unstable"); // (1,3) annotation
    const auto& pts = data.series[0].points;
    REQUIRE(pts.size() == 2001);
    double cx = 0.0, cy = 0.0;
    const std::size_t tail = 500;
    for (std::size_t k = pts.size() - tail; k < pts.size(); ++k) {
        cx += pts[k][1];
        cy += pts[k][2];
    }
    cx /= tail;
    cy /= tail;
    double rmax = 0.0;
    for (std::size_t k = pts.size() - tail; k < pts.size(); ++k)
        rmax = std::max(rmax, std::hypot(pts[k][1] - cx, pts[k][2] - cy));
    CHECK(rmax < 5.0);
}

TEST_CASE("portrait: example 1 boundary fan fully classified") {
    PortraitOptions opt;
    opt.example = 1;
    opt.scheme = "llrk4";
    opt.h = 0.25;
    const PortraitData data = portrait(opt);
    std::size_t trajectories = 0, equilibria = 0, intercepts = 0;
    for (const PortraitSeries& s : data.series) {
        if (s.name.rfind("traj", 0) == 0) {
            ++trajectories;
            CHECK(s.attractor.has_value());
        } else if (s.name.rfind("eq", 0) == 0) {
            ++equilibria;
        } else if (s.name == "intercept") {
            ++intercepts;
            CHECK(s.points[0][1] == 0.0);
            CHECK(s.points[0][2] == doctest::Approx(0.5827878).epsilon(2e-4));
        }
    }
    CHECK(trajectories == 12);
    CHECK(equilibria == 3);
    CHECK(intercepts == 1);
}

TEST_CASE("portrait: single start at an attractor stays constant") {
    const OdeSystem sys = make_example(1);
    const EquilibriumSet attractors = example1_attractors(sys);
    PortraitOptions opt;
    opt.example = 1;
    opt.h = 0.5;
    opt.starts = {attractors.points[0]};
    const PortraitData data = portrait(opt);
    const auto& pts = data.series[0].points;
    REQUIRE(pts.size() >= 2);
    CHECK(pts[0][1] == doctest::Approx(pts[1][1]).epsilon(1e-12));
    CHECK(pts[0][2] == doctest::Approx(pts[1][2]).epsilon(1e-12));
}

TEST_CASE("empirical_order: llrk4 shows fourth-order decay on the Brusselator") {
    const OrderScan scan = empirical_order(6, "llrk4", {0.1, 0.05, 0.025}, {6, 6}, 16);
    CHECK(scan.slope >= 3.5);
    CHECK(scan.slope <= 4.5);
}

TEST_CASE("table1 csv layout on a tiny slice") {
    Table1Options opt;
    opt.schemes = {"llrk4"};
    opt.hpow_min = 2;
    opt.hpow_max = 4;
    opt.bisect_tol = 1e-6;
    const std::vector<Table1Row> rows = compute_table1(opt);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].h == 0.25);
    CHECK(rows[0].xi == doctest::Approx(0.5827878).epsilon(2e-4));
    CHECK(rows[0].r.has_value());       // two finer intercepts available
    CHECK_FALSE(rows[1].r.has_value()); // only one finer intercept
    const Csv csv = table1_csv(rows);
    CHECK(csv.columns == std::vector<std::string>{"scheme", "h", "xi_h", "iterations", "r_h"});
    CHECK(csv.rows.size() == 3);
}

TEST_CASE("parallel table rows match serial execution bit for bit") {
    Table2Options serial;
    serial.examples = {4, 5};
    serial.threads = 1;
    Table2Options parallel = serial;
    parallel.threads = 2;
    const auto a = compute_table2(serial);
    const auto b = compute_table2(parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].example == b[i].example);
        CHECK(a[i].scheme == b[i].scheme);
        CHECK(a[i].re == b[i].re); // bitwise
    }
}
