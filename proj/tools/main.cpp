// llrk-bench: command-line harness for the LL2/LLRK4 integrators, the
// dynamical-systems probes and the benchmark tables.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"

#include "llrk/bench.hpp"

using namespace llrk;
using nlohmann::json;

namespace {

struct OutputSink {
    std::string csv_path;  // empty = stdout
    std::string json_path; // empty = none

    int write(const Csv& csv, const json& summary) const {
        const std::string text = csv.to_string();
        if (csv_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(csv_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot open '" << csv_path << "' for writing\n";
                return 1;
            }
            out << text;
        }
        if (!json_path.empty()) {
            json doc;
            doc["columns"] = csv.columns;
            doc["rows"] = csv.rows;
            doc["summary"] = summary;
            std::ofstream out(json_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot open '" << json_path << "' for writing\n";
                return 1;
            }
            out << doc.dump(2) << "\n";
        }
        return 0;
    }
};

Vector parse_list(const std::string& text) {
    Vector out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error("cannot parse list item '" + item + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw Error("empty list");
    return out;
}

PadeOrder parse_pade(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error("pade expects 'p,q'");
    PadeOrder order;
    try {
        order.p = std::stoi(text.substr(0, comma));
        order.q = std::stoi(text.substr(comma + 1));
    } catch (const std::exception&) {
        throw Error("pade expects 'p,q'");
    }
    if (!order.valid()) throw Error("pade: need p,q >= 0 and p+q >= 1");
    return order;
}

std::string pade_str(PadeOrder o) {
    return std::to_string(o.p) + "," + std::to_string(o.q);
}

/// Deterministic unit vector: all-ones direction for seed 0, otherwise
/// built from the seeded generator bits.
Vector probe_direction(std::size_t dim, unsigned long long seed) {
    Vector v(dim, 1.0);
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        for (double& x : v) x = 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

int cmd_solve(const RunConfig& cfg, bool with_reference, const OutputSink& sink) {
    ExampleSpec spec = example_defaults(cfg.example);
    for (const auto& [key, value] : bare_parameters(cfg)) spec.parameters[key] = value;
    const OdeSystem sys = make_example(spec);

    std::size_t steps;
    if (cfg.h > 0.0)
        steps = std::max<std::size_t>(1, std::size_t((spec.t_end - spec.t0) / cfg.h + 0.5));
    else if (cfg.steps > 0)
        steps = std::size_t(cfg.steps);
    else
        steps = std::size_t(table2_default_ns(cfg.example == 1 ? 6 : cfg.example));
    const TimeGrid grid = TimeGrid::uniform(spec.t0, spec.t_end, steps);

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj =
        integrate(sys, make_stepper(cfg.scheme, cfg.pade), grid, spec.initial_state);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json summary;
    summary["example"] = cfg.example;
    summary["scheme"] = cfg.scheme;
    summary["steps"] = steps;
    summary["max_kappa"] = traj.max_kappa;

    Csv csv;
    csv.comments = {"trajectory of example " + std::to_string(cfg.example) + ", scheme " +
                    cfg.scheme + ", pade " + pade_str(cfg.pade)};
    if (with_reference) {
        const Trajectory ref = reference_solution(sys, grid, spec.initial_state,
                                                  std::max<long>(cfg.refine, 2));
        const double re = relative_error(ref, traj);
        csv.comments.push_back("re_vs_reference = " + fmt_double(re));
        summary["re"] = fmt_double(re);
    }
    csv.columns = {"t"};
    for (std::size_t i = 0; i < sys.dim; ++i) csv.columns.push_back("x" + std::to_string(i + 1));
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        std::vector<std::string> row{fmt_double(traj.grid.nodes[n])};
        for (double v : traj.states[n]) row.push_back(fmt_double(v));
        csv.rows.push_back(std::move(row));
    }
    std::cerr << "solve: " << steps << " steps in " << wall << " s\n";
    return sink.write(csv, summary);
}

int cmd_table1(const Table1Options& opt, const OutputSink& sink) {
    const std::vector<Table1Row> rows = compute_table1(opt);
    json summary;
    for (const Table1Row& row : rows) {
        json r;
        r["scheme"] = row.scheme;
        r["h"] = fmt_double(row.h);
        r["xi_h"] = fmt_double(row.xi);
        if (row.r) r["r_h"] = fmt_double(*row.r);
        summary["rows"].push_back(r);
    }
    return sink.write(table1_csv(rows), summary);
}

int cmd_table2(const Table2Options& opt, const OutputSink& sink) {
    const std::vector<Table2Row> rows = compute_table2(opt);
    json summary;
    for (const Table2Row& row : rows)
        summary[std::to_string(row.example) + "/" + row.scheme] = fmt_double(row.re);
    return sink.write(table2_csv(rows), summary);
}

int cmd_stability(PadeOrder order, double re_min, double re_max, double im_min, double im_max,
                  std::size_t n_re, std::size_t n_im, const OutputSink& sink) {
    const StabilityScan scan = stability_region(order, re_min, re_max, im_min, im_max, n_re, n_im);
    const double at_remin = stability_magnitude({re_min, 0.0}, order);

    json summary;
    summary["pade"] = pade_str(order);
    summary["max_abs_r"] = fmt_double(scan.max_abs);
    summary["abs_r_at_re_min"] = fmt_double(at_remin);
    summary["a_stable_pair"] = order.a_stable();
    summary["l_stable_pair"] = order.l_stable();

    int exit_code = 0;
    if (re_max <= 0.0 && order.a_stable() && scan.max_abs > 1.0 + 1e-12) {
        std::cerr << "stability: A-stable pair exceeded |R| <= 1 + 1e-12 (max "
                  << fmt_double(scan.max_abs) << ")\n";
        exit_code = 2;
    }
    if (order.l_stable() && re_min <= -1e6 && at_remin > 1e-6) {
        std::cerr << "stability: L-stable pair has |R(re_min)| = " << fmt_double(at_remin)
                  << " > 1e-6\n";
        exit_code = 2;
    }
    std::cerr << "stability: max |R| = " << fmt_double(scan.max_abs) << " over [" << re_min << ","
              << re_max << "] x [" << im_min << "," << im_max << "]\n";
    const int write_rc = sink.write(stability_csv(scan, order), summary);
    return write_rc != 0 ? write_rc : exit_code;
}

int cmd_order(int example, const std::string& scheme, const Vector& hs, PadeOrder order,
              long refine, double slope_min, double slope_max, const OutputSink& sink) {
    const OrderScan scan = empirical_order(example, scheme, hs, order, refine);
    Csv csv;
    csv.comments = {"global-error decay of " + scheme + " on example " + std::to_string(example),
                    "least-squares slope = " + fmt_double(scan.slope)};
    csv.columns = {"h", "err"};
    for (std::size_t i = 0; i < scan.hs.size(); ++i)
        csv.rows.push_back({fmt_double(scan.hs[i]), fmt_double(scan.errors[i])});

    json summary;
    summary["scheme"] = scheme;
    summary["example"] = example;
    summary["slope"] = fmt_double(scan.slope);

    std::cerr << "order: slope " << fmt_double(scan.slope) << "\n";
    const int write_rc = sink.write(csv, summary);
    if (write_rc != 0) return write_rc;
    if (scan.slope < slope_min || scan.slope > slope_max) {
        std::cerr << "order: slope outside [" << slope_min << ", " << slope_max << "]\n";
        return 2;
    }
    return 0;
}

int cmd_portrait(const PortraitOptions& opt, const OutputSink& sink) {
    const PortraitData data = portrait(opt);
    json summary;
    std::size_t undecided = 0;
    for (const PortraitSeries& s : data.series)
        if (s.name.rfind("traj", 0) == 0 && opt.example == 1 && !s.attractor) ++undecided;
    summary["series"] = data.series.size();
    summary["undecided"] = undecided;
    return sink.write(portrait_csv(data), summary);
}

int cmd_probe(int example, const std::map<std::string, double>& parameters,
              const std::vector<std::string>& schemes, const Vector& h_list,
              const Vector& eps_list, PadeOrder order, unsigned long long seed,
              const OutputSink& sink) {
    ExampleSpec spec = example_defaults(example);
    for (const auto& [key, value] : parameters) spec.parameters[key] = value;
    const OdeSystem sys = make_example(spec);

    EquilibriumSet set;
    if (example == 1) {
        std::vector<Vector> seeds;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) seeds.push_back({i / 4.0, j / 4.0});
        set = find_equilibria(sys, seeds, 1e-12);
    } else {
        for (Vector& p : exact_equilibria(example)) {
            set.stability.push_back(detail::classify_jacobian(eval_jacobian(sys, 0.0, p)));
            set.points.push_back(std::move(p));
        }
    }
    if (set.size() == 0) {
        std::cerr << "probe: no equilibria known for example " << example << "\n";
        return 1;
    }

    Csv csv;
    csv.comments = {"structural probes at the equilibria of example " + std::to_string(example)};
    csv.columns = {"check", "scheme", "point", "h", "eps", "value", "threshold", "pass"};
    bool all_pass = true;
    const Vector v = probe_direction(sys.dim, seed);

    for (const std::string& scheme : schemes) {
        const Stepper stepper = make_stepper(scheme, order);
        for (std::size_t k = 0; k < set.size(); ++k) {
            const std::string point = "eq" + std::to_string(k) + "_" + to_string(set.stability[k]);
            for (double h : h_list) {
                const StepResult r = stepper(sys, 0.0, set.points[k], h);
                double drift = 0.0;
                for (std::size_t i = 0; i < sys.dim; ++i)
                    drift = std::max(drift, std::abs(r.y_next[i] - set.points[k][i]));
                const bool ok = drift <= 1e-12;
                all_pass = all_pass && ok;
                csv.rows.push_back({"equilibrium_drift", scheme, point, fmt_double(h), "",
                                    fmt_double(drift), "1e-12", ok ? "1" : "0"});
            }
            const Vector ratios =
                linearization_probe(sys, stepper, set.points[k], 0.5, v, eps_list, order);
            for (std::size_t i = 0; i < ratios.size(); ++i)
                csv.rows.push_back({"linearization_ratio", scheme, point, "0.5",
                                    fmt_double(eps_list[i]), fmt_double(ratios[i]), "", "1"});
            const double lo = *std::min_element(ratios.begin(), ratios.end());
            const double hi = *std::max_element(ratios.begin(), ratios.end());
            // quadratic terms vanish identically on linear systems
            const double spread = lo > 1e-10 ? hi / lo : 1.0;
            const bool ok = spread <= 4.0;
            all_pass = all_pass && ok;
            csv.rows.push_back({"linearization_spread", scheme, point, "0.5", "",
                                fmt_double(spread), "4", ok ? "1" : "0"});
        }
    }

    json summary;
    summary["all_pass"] = all_pass;
    const int write_rc = sink.write(csv, summary);
    if (write_rc != 0) return write_rc;
    if (!all_pass) {
        std::cerr << "probe: at least one structural check failed\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"A-stable explicit exponential integrators (LL2 / LLRK4): solver, probes and "
                 "benchmark tables"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help"); // keep --h free for the step size

    // a config file provides defaults; explicit flags override
    RunConfig cfg;
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config '" << config_path << "'\n";
            return 1;
        }
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        try {
            cfg = parse_config(text);
        } catch (const ConfigError& e) {
            std::cerr << "error: " << config_path << ": " << e.what() << "\n";
            return 1;
        }
    }

    std::string scheme = cfg.scheme;
    int example = cfg.example;
    double h = cfg.h;
    long steps = cfg.steps;
    std::string pade_text = pade_str(cfg.pade);
    std::string out_path = cfg.out;
    std::string json_path;
    unsigned long long seed = cfg.seed;
    long refine = cfg.refine;
    int threads = 1;
    std::string ignored_config;

    const auto add_common = [&](CLI::App* cmd, bool wants_scheme = true) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--config", ignored_config, "declarative config file (parsed first)");
        cmd->add_option("--out,-o", out_path, "CSV output path (default stdout)");
        cmd->add_option("--json", json_path, "write a JSON summary mirroring the CSV");
        cmd->add_option("--pade", pade_text, "Pade order 'p,q' (default 6,6)");
        if (wants_scheme)
            cmd->add_option("--scheme,-s", scheme, "scheme: ll2, llrk4, llrk:<tableau>, rk4, dp5");
    };

    // solve
    bool with_reference = false;
    CLI::App* solve = app.add_subcommand("solve", "integrate one example on a uniform grid");
    add_common(solve);
    solve->add_option("--example,-e", example, "example id 1..7");
    solve->add_option("--h", h, "uniform step size");
    solve->add_option("--steps", steps, "number of uniform steps");
    solve->add_flag("--reference", with_reference, "also compute a reference and report RE");
    solve->add_option("--refine", refine, "starting refinement of the reference engine");

    // table1
    Table1Options t1;
    std::string t1_schemes = "ll2,dp5,llrk4";
    CLI::App* table1 = app.add_subcommand("table1", "separatrix intercepts xi_h of example 1");
    add_common(table1, false);
    table1->add_option("--schemes", t1_schemes, "comma-separated scheme list");
    table1->add_option("--hpow-min", t1.hpow_min, "coarsest step 2^-k");
    table1->add_option("--hpow-max", t1.hpow_max, "finest step 2^-k");
    table1->add_option("--tol", t1.bisect_tol, "bisection tolerance on xi");
    table1->add_option("--threads", threads, "worker threads for independent rows");

    // table2
    Table2Options t2;
    std::string t2_examples = "2,3,4,5,6,7";
    std::string t2_schemes = "ll2,llrk4";
    CLI::App* table2 = app.add_subcommand("table2", "accuracy table on uniform grids");
    add_common(table2, false);
    table2->add_option("--examples", t2_examples, "comma-separated example ids (2..7)");
    table2->add_option("--schemes", t2_schemes, "comma-separated scheme list");
    table2->add_option("--steps", steps, "override the step count for every example");
    table2->add_option("--refine", refine, "starting refinement of the reference engine");
    table2->add_option("--refine-cap", t2.refine_cap, "refinement cap of the reference engine");
    table2->add_option("--threads", threads, "worker threads for independent examples");

    // stability
    double re_min = -100.0, re_max = 0.0, im_min = -100.0, im_max = 100.0;
    std::size_t n_re = 201, n_im = 201;
    CLI::App* stability = app.add_subcommand("stability", "sample |R(z)| over a complex rectangle");
    add_common(stability, false);
    stability->add_option("--re-min", re_min);
    stability->add_option("--re-max", re_max);
    stability->add_option("--im-min", im_min);
    stability->add_option("--im-max", im_max);
    stability->add_option("--n-re", n_re, "grid points along Re");
    stability->add_option("--n-im", n_im, "grid points along Im");

    // order
    std::string h_list_text = "0.02,0.01,0.005,0.0025";
    double slope_min = -1e300, slope_max = 1e300;
    CLI::App* order_cmd = app.add_subcommand("order", "empirical convergence order on one example");
    add_common(order_cmd);
    order_cmd->add_option("--example,-e", example, "example id 1..7");
    order_cmd->add_option("--h-list", h_list_text, "comma-separated step sizes");
    order_cmd->add_option("--refine", refine, "reference refinement");
    order_cmd->add_option("--slope-min", slope_min, "exit 2 if the slope is below this");
    order_cmd->add_option("--slope-max", slope_max, "exit 2 if the slope is above this");

    // portrait
    PortraitOptions po;
    CLI::App* portrait_cmd = app.add_subcommand("portrait", "phase-portrait data for 2-d examples");
    add_common(portrait_cmd);
    portrait_cmd->add_option("--example,-e", example, "example id (2-dimensional)");
    portrait_cmd->add_option("--h", h, "step size");
    portrait_cmd->add_option("--tol", po.basin_tol, "attractor proximity tolerance");
    portrait_cmd->add_option("--max-steps", po.max_steps, "step cap per trajectory");

    // probe
    std::string probe_schemes = "ll2,llrk4";
    std::string probe_h_list = "0.1,1,10";
    std::string probe_eps_list = "1e-2,1e-3,1e-4";
    CLI::App* probe =
        app.add_subcommand("probe", "equilibrium preservation and linearization probes");
    add_common(probe, false);
    probe->add_option("--example,-e", example, "example id 1..7");
    probe->add_option("--schemes", probe_schemes, "comma-separated scheme list");
    probe->add_option("--h-list", probe_h_list, "step sizes for the drift check");
    probe->add_option("--eps-list", probe_eps_list, "decreasing offsets for the linearization check");
    probe->add_option("--seed", seed, "seed for the probe direction (0 = all-ones direction)");

    CLI11_PARSE(app, argc, argv);

    const auto split_strings = [](const std::string& text) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t comma = text.find(',', pos);
            out.push_back(text.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return out;
    };

    try {
        OutputSink sink{out_path, json_path};
        cfg.scheme = scheme;
        cfg.example = example;
        cfg.h = h;
        cfg.steps = steps;
        cfg.pade = parse_pade(pade_text);
        cfg.out = out_path;
        cfg.seed = seed;
        cfg.refine = refine;

        if (solve->parsed()) return cmd_solve(cfg, with_reference, sink);
        if (table1->parsed()) {
            t1.schemes = split_strings(t1_schemes);
            t1.pade = cfg.pade;
            t1.threads = threads;
            t1.parameters = bare_parameters(cfg);
            return cmd_table1(t1, sink);
        }
        if (table2->parsed()) {
            t2.schemes = split_strings(t2_schemes);
            t2.examples.clear();
            for (const std::string& s : split_strings(t2_examples))
                t2.examples.push_back(std::stoi(s));
            if (steps > 0)
                for (int id : t2.examples) t2.ns_override[id] = steps;
            t2.refine = std::max<long>(refine, 2);
            t2.pade = cfg.pade;
            t2.threads = threads;
            return cmd_table2(t2, sink);
        }
        if (stability->parsed())
            return cmd_stability(cfg.pade, re_min, re_max, im_min, im_max, n_re, n_im, sink);
        if (order_cmd->parsed())
            return cmd_order(example, scheme, parse_list(h_list_text), cfg.pade,
                             std::max<long>(refine, 2), slope_min, slope_max, sink);
        if (portrait_cmd->parsed()) {
            po.example = example;
            po.scheme = scheme;
            if (h > 0.0) po.h = h;
            po.pade = cfg.pade;
            po.parameters = bare_parameters(cfg);
            return cmd_portrait(po, sink);
        }
        if (probe->parsed())
            return cmd_probe(example, bare_parameters(cfg), split_strings(probe_schemes),
                             parse_list(probe_h_list), parse_list(probe_eps_list), cfg.pade, seed,
                             sink);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
