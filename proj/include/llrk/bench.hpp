#pragma once

#include <array>
#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

#include "llrk/config.hpp"
#include "llrk/dynamics.hpp"
#include "llrk/examples.hpp"

namespace llrk {

namespace detail {

/// Runs f(0..n-1) on `threads` workers; each index writes only its own
/// slot, so results are bit-identical to serial execution.
template <class F>
inline void parallel_for(std::size_t n, int threads, F&& f) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const auto workers = std::min<std::size_t>(std::size_t(threads), n);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

/// Integrates the grid with DP5, each interval subdivided `refine` times.
inline Trajectory dp5_refined(const OdeSystem& sys, const TimeGrid& grid, const Vector& y0,
                              long refine) {
    const ButcherTableau dp5 = tableau_registry("dp5").tableau;
    Trajectory traj;
    traj.grid = grid;
    traj.scheme = "reference(dp5)";
    traj.states.reserve(grid.nodes.size());
    traj.states.push_back(y0);
    Vector y = y0;
    for (std::size_t n = 0; n + 1 < grid.nodes.size(); ++n) {
        const double t0 = grid.nodes[n];
        const double hsub = (grid.nodes[n + 1] - t0) / double(refine);
        for (long k = 0; k < refine; ++k) y = rk_step(sys, dp5, t0 + double(k) * hsub, y, hsub);
        traj.states.push_back(y);
    }
    return traj;
}

/// High-accuracy solution on the given grid: DP5 on refined subgrids,
/// accepted once it agrees with the half-refinement run to `self_check_tol`
/// componentwise relative at every shared node (refine doubles up to `cap`).
inline Trajectory reference_solution(const OdeSystem& sys, const TimeGrid& grid, const Vector& y0,
                                     long refine = 16, double self_check_tol = 1e-10,
                                     long cap = 16384) {
    grid.validate();
    if (refine < 2) throw Error("reference_solution: need refine >= 2");
    Trajectory prev = dp5_refined(sys, grid, y0, refine / 2);
    for (long r = refine; r <= cap; r *= 2) {
        Trajectory cur = dp5_refined(sys, grid, y0, r);
        double worst = 0.0;
        for (std::size_t n = 0; n < cur.states.size(); ++n)
            for (std::size_t i = 0; i < cur.states[n].size(); ++i) {
                const double b = cur.states[n][i];
                if (std::abs(b) < 1e-12) continue;
                worst = std::max(worst, std::abs(prev.states[n][i] - b) / std::abs(b));
            }
        if (worst <= self_check_tol) return cur;
        prev = std::move(cur);
    }
    throw ReferenceUnconverged("reference_solution: refinement cap reached before self-check");
}

// ---------------------------------------------------------------------------
// Separatrix intercept table
// ---------------------------------------------------------------------------

struct Table1Options {
    std::vector<std::string> schemes = {"ll2", "dp5", "llrk4"};
    int hpow_min = 1;          // h = 2^-k, k = hpow_min..hpow_max
    int hpow_max = 9;
    double bisect_tol = 1e-13;
    double bracket_lo = 0.0;
    double bracket_hi = 1.0;
    double basin_tol = 1e-6;
    std::size_t max_steps = 100000;
    PadeOrder pade{6, 6};
    std::map<std::string, double> parameters; // example 1 overrides
    int threads = 1;
};

struct Table1Row {
    std::string scheme;
    int hpow = 0;
    double h = 0.0;
    double xi = 0.0;
    std::size_t iterations = 0;
    std::optional<double> r;
};

/// Stable equilibria of example 1 from a 5x5 seed grid on [0,1]^2.
inline EquilibriumSet example1_attractors(const OdeSystem& sys) {
    std::vector<Vector> seeds;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) seeds.push_back({double(i) / 4.0, double(j) / 4.0});
    const EquilibriumSet all = find_equilibria(sys, seeds, 1e-12);
    EquilibriumSet stable;
    for (std::size_t k = 0; k < all.size(); ++k)
        if (all.stability[k] == Stability::Stable) {
            stable.points.push_back(all.points[k]);
            stable.stability.push_back(all.stability[k]);
        }
    if (stable.size() < 2)
        throw NoConvergence("example 1: expected two stable attractors");
    return stable;
}

/// The x2-axis separatrix intercept of example 1 for each (scheme, h),
/// with the estimated order r_h = log2 of successive difference ratios
/// where the two finer intercepts exist.
inline std::vector<Table1Row> compute_table1(const Table1Options& opt) {
    ExampleSpec spec = example_defaults(1);
    for (const auto& [key, value] : opt.parameters) spec.parameters[key] = value;
    const OdeSystem sys = make_example(spec);
    const EquilibriumSet attractors = example1_attractors(sys);

    std::vector<Table1Row> rows;
    for (const std::string& scheme : opt.schemes)
        for (int k = opt.hpow_min; k <= opt.hpow_max; ++k)
            rows.push_back({scheme, k, std::ldexp(1.0, -k), 0.0, 0, std::nullopt});

    detail::parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
        Table1Row& row = rows[i];
        const Stepper stepper = make_stepper(row.scheme, opt.pade);
        const BisectionResult res =
            manifold_intercept(sys, stepper, row.h, opt.bracket_lo, opt.bracket_hi,
                               opt.bisect_tol, attractors, opt.basin_tol, opt.max_steps);
        row.xi = res.xi_h;
        row.iterations = res.iterations;
    });

    const auto find_xi = [&](const std::string& scheme, int k) -> std::optional<double> {
        for (const Table1Row& row : rows)
            if (row.scheme == scheme && row.hpow == k) return row.xi;
        return std::nullopt;
    };
    for (Table1Row& row : rows) {
        const auto xi2 = find_xi(row.scheme, row.hpow + 1);
        const auto xi4 = find_xi(row.scheme, row.hpow + 2);
        if (!xi2 || !xi4) continue;
        try {
            row.r = order_estimate(row.xi, *xi2, *xi4);
        } catch (const DegenerateDifferences&) {
        }
    }
    return rows;
}

inline Csv table1_csv(const std::vector<Table1Row>& rows) {
    Csv csv;
    csv.comments = {"separatrix intercept xi_h of example 1 located by bisection",
                    "r_h = log2((xi_h - xi_{h/2}) / (xi_{h/2} - xi_{h/4})) where computable"};
    csv.columns = {"scheme", "h", "xi_h", "iterations", "r_h"};
    for (const Table1Row& row : rows)
        csv.rows.push_back({row.scheme, fmt_double(row.h), fmt_double(row.xi),
                            std::to_string(row.iterations),
                            row.r ? fmt_double(*row.r) : std::string{}});
    return csv;
}

// ---------------------------------------------------------------------------
// Accuracy table on uniform grids
// ---------------------------------------------------------------------------

struct Table2Options {
    std::vector<int> examples = {2, 3, 4, 5, 6, 7};
    std::vector<std::string> schemes = {"ll2", "llrk4"};
    std::map<int, long> ns_override;
    long refine = 16;
    long refine_cap = 16384;
    PadeOrder pade{6, 6};
    int threads = 1;
};

/// Uniform step counts used when none are requested explicitly.
inline long table2_default_ns(int example) {
    switch (example) {
        case 2: return 334;
        case 3: return 287;
        case 4: return 66;
        case 5: return 49;
        case 6: return 47;
        case 7: return 2285;
        default: throw UnknownExample("table2 covers examples 2..7");
    }
}

struct Table2Row {
    int example = 0;
    std::string scheme;
    long ns = 0;
    double re = 0.0;
    int max_kappa = 0;
};

inline std::vector<Table2Row> compute_table2(const Table2Options& opt) {
    struct Cell {
        int example;
        long ns;
        std::vector<Table2Row> rows;
    };
    std::vector<Cell> cells;
    for (int id : opt.examples) {
        const auto it = opt.ns_override.find(id);
        cells.push_back({id, it == opt.ns_override.end() ? table2_default_ns(id) : it->second, {}});
    }

    detail::parallel_for(cells.size(), opt.threads, [&](std::size_t i) {
        Cell& cell = cells[i];
        const ExampleSpec spec = example_defaults(cell.example);
        const OdeSystem sys = make_example(spec);
        const TimeGrid grid = TimeGrid::uniform(spec.t0, spec.t_end, std::size_t(cell.ns));
        const Trajectory ref =
            reference_solution(sys, grid, spec.initial_state, opt.refine, 1e-10, opt.refine_cap);
        for (const std::string& scheme : opt.schemes) {
            // a diverging scheme is a result worth reporting, not a crash
            double re = std::numeric_limits<double>::infinity();
            int kappa = 0;
            try {
                const Trajectory traj =
                    integrate(sys, make_stepper(scheme, opt.pade), grid, spec.initial_state);
                re = relative_error(ref, traj);
                kappa = traj.max_kappa;
            } catch (const StepFailure&) {
            }
            cell.rows.push_back({cell.example, scheme, cell.ns, re, kappa});
        }
    });

    std::vector<Table2Row> rows;
    for (const Cell& cell : cells)
        for (const Table2Row& row : cell.rows) rows.push_back(row);
    return rows;
}

inline Csv table2_csv(const std::vector<Table2Row>& rows) {
    Csv csv;
    csv.comments = {
        "accuracy on uniform grids; RE is the max componentwise relative",
        "deviation from a self-checked DP5 reference on the same grid",
        "note: step counts follow the published table, but the grids are uniform",
        "rather than the adaptive ones used there, so RE values are comparable",
        "in order of magnitude only"};
    csv.columns = {"example", "scheme", "ns", "re", "max_kappa"};
    for (const Table2Row& row : rows)
        csv.rows.push_back({std::to_string(row.example), row.scheme, std::to_string(row.ns),
                            fmt_double(row.re), std::to_string(row.max_kappa)});
    return csv;
}

// ---------------------------------------------------------------------------
// Stability-region scan
// ---------------------------------------------------------------------------

struct StabilityScan {
    std::vector<std::array<double, 3>> rows; // re, im, |R|
    double max_abs = 0.0;
};

inline StabilityScan stability_region(PadeOrder order, double re_min, double re_max, double im_min,
                                      double im_max, std::size_t n_re, std::size_t n_im) {
    if (n_re < 2 || n_im < 2) throw Error("stability_region: need at least a 2x2 grid");
    StabilityScan scan;
    scan.rows.reserve(n_re * n_im);
    for (std::size_t i = 0; i < n_re; ++i) {
        const double re = re_min + double(i) * (re_max - re_min) / double(n_re - 1);
        for (std::size_t j = 0; j < n_im; ++j) {
            const double im = im_min + double(j) * (im_max - im_min) / double(n_im - 1);
            const double mag = stability_magnitude({re, im}, order);
            scan.rows.push_back({re, im, mag});
            scan.max_abs = std::max(scan.max_abs, mag);
        }
    }
    return scan;
}

inline Csv stability_csv(const StabilityScan& scan, PadeOrder order) {
    Csv csv;
    csv.comments = {"|R(z)| of the (" + std::to_string(order.p) + "," + std::to_string(order.q) +
                        ") scheme sampled over the complex plane",
                    "max |R| over the grid = " + fmt_double(scan.max_abs)};
    csv.columns = {"re", "im", "abs_r"};
    for (const auto& row : scan.rows)
        csv.rows.push_back({fmt_double(row[0]), fmt_double(row[1]), fmt_double(row[2])});
    return csv;
}

// ---------------------------------------------------------------------------
// Phase-portrait data
// ---------------------------------------------------------------------------

struct PortraitOptions {
    int example = 1;
    std::string scheme = "llrk4";
    double h = 0.25;
    PadeOrder pade{6, 6};
    double basin_tol = 1e-6;
    std::size_t max_steps = 100000;
    std::vector<Vector> starts; // empty -> defaults per example
    double intercept_tol = 1e-5;
    std::map<std::string, double> parameters;
};

struct PortraitSeries {
    std::string name;
    std::vector<std::array<double, 3>> points; // t, x1, x2
    std::optional<std::size_t> attractor;      // classification, example 1 runs
};

struct PortraitData {
    std::vector<PortraitSeries> series;
};

/// 12 points evenly spaced on the boundary of [0,1]^2.
inline std::vector<Vector> boundary_starts_12() {
    std::vector<Vector> pts;
    for (int k = 0; k < 4; ++k) pts.push_back({double(k) / 3.0, 0.0});
    for (int k = 1; k < 4; ++k) pts.push_back({1.0, double(k) / 3.0});
    for (int k = 1; k < 4; ++k) pts.push_back({1.0 - double(k) / 3.0, 1.0});
    for (int k = 1; k < 3; ++k) pts.push_back({0.0, 1.0 - double(k) / 3.0});
    return pts;
}

inline PortraitData portrait(const PortraitOptions& opt) {
    ExampleSpec spec = example_defaults(opt.example);
    for (const auto& [key, value] : opt.parameters) spec.parameters[key] = value;
    const OdeSystem sys = make_example(spec);
    if (sys.dim != 2) throw Error("portrait: example must be 2-dimensional");
    const Stepper stepper = make_stepper(opt.scheme, opt.pade);

    PortraitData data;
    if (opt.example == 1) {
        const EquilibriumSet attractors = example1_attractors(sys);
        std::vector<Vector> starts = opt.starts.empty() ? boundary_starts_12() : opt.starts;
        for (std::size_t s = 0; s < starts.size(); ++s) {
            PortraitSeries series;
            series.name = "traj" + std::to_string(s);
            Vector y = starts[s];
            double t = 0.0;
            series.points.push_back({t, y[0], y[1]});
            for (std::size_t n = 0; n < opt.max_steps && !series.attractor; ++n) {
                StepResult r = stepper(sys, t, y, opt.h);
                y = std::move(r.y_next);
                t += opt.h;
                series.points.push_back({t, y[0], y[1]});
                for (std::size_t k = 0; k < attractors.size(); ++k) {
                    double dist = 0.0;
                    for (std::size_t i = 0; i < 2; ++i)
                        dist = std::max(dist, std::abs(y[i] - attractors.points[k][i]));
                    if (dist <= opt.basin_tol) series.attractor = k;
                }
            }
            data.series.push_back(std::move(series));
        }
        const EquilibriumSet all = find_equilibria(
            sys, [] {
                std::vector<Vector> seeds;
                for (int i = 0; i < 5; ++i)
                    for (int j = 0; j < 5; ++j) seeds.push_back({i / 4.0, j / 4.0});
                return seeds;
            }(),
            1e-12);
        for (std::size_t k = 0; k < all.size(); ++k)
            data.series.push_back({std::string("eq") + std::to_string(k) + "_" +
                                       to_string(all.stability[k]),
                                   {{0.0, all.points[k][0], all.points[k][1]}},
                                   std::nullopt});
        const BisectionResult bi = manifold_intercept(sys, stepper, opt.h, 0.0, 1.0,
                                                      opt.intercept_tol, attractors,
                                                      opt.basin_tol, opt.max_steps);
        data.series.push_back({"intercept", {{0.0, 0.0, bi.xi_h}}, std::nullopt});
    } else {
        std::vector<Vector> starts = opt.starts.empty()
                                         ? std::vector<Vector>{spec.initial_state}
                                         : opt.starts;
        const auto steps = std::size_t((spec.t_end - spec.t0) / opt.h + 0.5);
        const TimeGrid grid = TimeGrid::uniform(spec.t0, spec.t_end, std::max<std::size_t>(steps, 1));
        for (std::size_t s = 0; s < starts.size(); ++s) {
            const Trajectory traj = integrate(sys, stepper, grid, starts[s]);
            PortraitSeries series;
            series.name = "traj" + std::to_string(s);
            for (std::size_t n = 0; n < traj.states.size(); ++n)
                series.points.push_back(
                    {traj.grid.nodes[n], traj.states[n][0], traj.states[n][1]});
            data.series.push_back(std::move(series));
        }
        const std::vector<Vector> eqs = exact_equilibria(opt.example);
        for (std::size_t k = 0; k < eqs.size(); ++k) {
            const Stability s = detail::classify_jacobian(eval_jacobian(sys, 0.0, eqs[k]));
            data.series.push_back({std::string("eq") + std::to_string(k) + "_" + to_string(s),
                                   {{0.0, eqs[k][0], eqs[k][1]}},
                                   std::nullopt});
        }
    }
    return data;
}

inline Csv portrait_csv(const PortraitData& data) {
    Csv csv;
    csv.comments = {"trajectory fan; eq*/intercept rows are annotations"};
    csv.columns = {"series", "t", "x1", "x2"};
    for (const PortraitSeries& s : data.series)
        for (const auto& p : s.points)
            csv.rows.push_back({s.name, fmt_double(p[0]), fmt_double(p[1]), fmt_double(p[2])});
    return csv;
}

// ---------------------------------------------------------------------------
// Empirical convergence order
// ---------------------------------------------------------------------------

struct OrderScan {
    Vector hs;
    Vector errors; // max-over-grid infinity-norm error vs reference
    double slope = 0.0;
};

/// Global-error slope of a scheme on one example over a list of uniform
/// steps, by least-squares fit of log(err) against log(h).
inline OrderScan empirical_order(int example, const std::string& scheme, const Vector& hs,
                                 PadeOrder order = {}, long refine = 16) {
    if (hs.size() < 2) throw Error("empirical_order: need at least two step sizes");
    const ExampleSpec spec = example_defaults(example);
    const OdeSystem sys = make_example(spec);
    const Stepper stepper = make_stepper(scheme, order);

    OrderScan scan;
    scan.hs = hs;
    for (double h : hs) {
        const auto steps = std::size_t((spec.t_end - spec.t0) / h + 0.5);
        const TimeGrid grid = TimeGrid::uniform(spec.t0, spec.t_end, steps);
        const Trajectory ref = reference_solution(sys, grid, spec.initial_state, refine);
        const Trajectory traj = integrate(sys, stepper, grid, spec.initial_state);
        double err = 0.0;
        for (std::size_t n = 0; n < ref.states.size(); ++n)
            for (std::size_t i = 0; i < ref.states[n].size(); ++i)
                err = std::max(err, std::abs(ref.states[n][i] - traj.states[n][i]));
        scan.errors.push_back(err);
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = double(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double x = std::log(hs[i]);
        const double y = std::log(scan.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    scan.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return scan;
}

} // namespace llrk
