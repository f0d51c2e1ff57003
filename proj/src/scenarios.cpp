#include "mpt/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace mpt {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Eigen::MatrixXd column(std::initializer_list<double> v) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (double x : v) out(i++, 0) = x;
    return out;
}

JunctionSpec junction(std::string id, std::vector<std::string> in,
                      std::vector<std::string> out, Eigen::MatrixXd A,
                      Eigen::VectorXd q) {
    JunctionSpec j;
    j.id = std::move(id);
    j.incoming = std::move(in);
    j.outgoing = std::move(out);
    j.preferences = std::move(A);
    j.priorities = std::move(q);
    return j;
}

void path_bc(NetworkSpec& net, const std::string& path, bool at_end,
             BoundaryCondition cond) {
    net.boundaries[BoundaryKey{BoundaryKey::Target::Path, path,
                               at_end ? BoundaryKey::End::End
                                      : BoundaryKey::End::Start}] = std::move(cond);
}

void arc_bc(NetworkSpec& net, const std::string& arc, bool at_end,
            BoundaryCondition cond) {
    net.boundaries[BoundaryKey{BoundaryKey::Target::Arc, arc,
                               at_end ? BoundaryKey::End::End
                                      : BoundaryKey::End::Start}] = std::move(cond);
}

void finish(Scenario& sc) {
    sc.initial = PathDensityState::zeros(PathCellMap::build(sc.net));
}

/// Three unit roads merging 2 -> 1, 20 cells each, exit held empty.
Scenario merge_base(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.net.diagram = make_parabola();
    sc.net.arcs = {{"1", 1.0, 20}, {"2", 1.0, 20}, {"3", 1.0, 20}};
    sc.net.junctions = {junction("J", {"1", "2"}, {"3"},
                                 Eigen::MatrixXd::Ones(1, 2), vec({0.5, 0.5}))};
    sc.net.paths = {{"P1", {"1", "3"}}, {"P2", {"2", "3"}}};
    sc.grid = GridSpec{0.05, 5.0 / 240.0, 5.0};
    // Exit held empty; stated per path because both paths share the exit.
    path_bc(sc.net, "P1", true, BoundaryCondition::constant(0.0));
    path_bc(sc.net, "P2", true, BoundaryCondition::constant(0.0));
    return sc;
}

Scenario build_two_in_one_out_const() {
    Scenario sc = merge_base("two_in_one_out_const");
    path_bc(sc.net, "P1", false, BoundaryCondition::constant(0.4));
    path_bc(sc.net, "P2", false, BoundaryCondition::constant(0.2));
    finish(sc);
    return sc;
}

Scenario build_two_in_one_out_timedep() {
    Scenario sc = merge_base("two_in_one_out_timedep");
    sc.grid.t_f = 8.0;
    const int steps = sc.grid.step_count();
    std::vector<double> ts(steps + 1), in1(steps + 1), in2(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        const double t = i * sc.grid.dt;
        ts[i] = t;
        in1[i] = 0.25 * (1.0 + std::sin(t));
        in2[i] = 0.25 * (1.0 + std::cos(t));
    }
    path_bc(sc.net, "P1", false, BoundaryCondition::table(ts, in1));
    path_bc(sc.net, "P2", false, BoundaryCondition::table(ts, in2));
    finish(sc);
    return sc;
}

Scenario build_one_in_two_out() {
    Scenario sc;
    sc.name = "one_in_two_out";
    sc.net.diagram = make_parabola();
    sc.net.arcs = {{"1", 1.0, 20}, {"2", 1.0, 20}, {"3", 1.0, 20}};
    sc.net.junctions = {junction("J", {"1"}, {"2", "3"},
                                 column({0.8, 0.2}), vec({1.0}))};
    sc.net.paths = {{"P1", {"1", "2"}}, {"P2", {"1", "3"}}};
    sc.grid = GridSpec{0.05, 5.0 / 240.0, 11.0};
    path_bc(sc.net, "P1", false, BoundaryCondition::constant(0.4));
    path_bc(sc.net, "P2", false, BoundaryCondition::constant(0.1));
    arc_bc(sc.net, "2", true, BoundaryCondition::constant(0.0));
    arc_bc(sc.net, "3", true, BoundaryCondition::constant(0.9));
    finish(sc);
    return sc;
}

Scenario build_two_in_two_out() {
    Scenario sc;
    sc.name = "two_in_two_out";
    sc.net.diagram = make_parabola();
    sc.net.arcs = {{"1", 1.0, 20}, {"2", 1.0, 20}, {"3", 1.0, 20}, {"4", 1.0, 20}};
    Eigen::MatrixXd A(2, 2);
    A << 0.8, 0.9,
         0.2, 0.1;
    sc.net.junctions = {junction("J", {"1", "2"}, {"3", "4"}, A, vec({0.5, 0.5}))};
    sc.net.paths = {{"P1", {"1", "3"}}, {"P2", {"2", "3"}},
                    {"P3", {"1", "4"}}, {"P4", {"2", "4"}}};
    sc.grid = GridSpec{0.05, 5.0 / 240.0, 6.0};
    path_bc(sc.net, "P1", false, BoundaryCondition::constant(0.40));
    path_bc(sc.net, "P2", false, BoundaryCondition::constant(0.45));
    path_bc(sc.net, "P3", false, BoundaryCondition::constant(0.10));
    path_bc(sc.net, "P4", false, BoundaryCondition::constant(0.05));
    for (const auto& p : sc.net.paths)
        path_bc(sc.net, p.id, true, BoundaryCondition::constant(0.0));
    finish(sc);
    return sc;
}

Scenario build_five_arc() {
    Scenario sc;
    sc.name = "five_arc";
    sc.net.diagram = make_parabola();
    sc.net.arcs = {{"1", 1.0, 20}, {"2", 1.0, 20}, {"3", 1.0, 20},
                   {"4", 1.0, 20}, {"5", 1.0, 20}};
    sc.net.junctions = {
        junction("J1", {"1", "2"}, {"3"}, Eigen::MatrixXd::Ones(1, 2),
                 vec({0.5, 0.5})),
        junction("J2", {"3"}, {"4", "5"}, column({0.5, 0.5}), vec({1.0}))};
    sc.net.paths = {{"P1", {"1", "3", "4"}}, {"P2", {"2", "3", "5"}}};
    sc.grid = GridSpec{0.05, 5.0 / 240.0, 5.0};
    path_bc(sc.net, "P1", false, BoundaryCondition::constant(0.4));
    path_bc(sc.net, "P2", false, BoundaryCondition::constant(0.0));
    arc_bc(sc.net, "4", true, BoundaryCondition::constant(0.0));
    arc_bc(sc.net, "5", true, BoundaryCondition::constant(0.0));
    finish(sc);
    return sc;
}

Scenario build_synthetic_large() {
    Scenario sc;
    sc.name = "synthetic_large";
    sc.net.diagram = make_parabola();
    auto road = [](const char* id, int cells) {
        return ArcSpec{id, 100.0 * cells, cells};
    };
    sc.net.arcs = {road("E0", 270),  road("E1", 250),  road("E2", 250),
                   road("A12", 300), road("A23", 300), road("B12", 300),
                   road("B23", 300), road("X1", 281),  road("X2", 281),
                   road("V1", 250),  road("V2", 250),  road("V3", 250)};

    auto split = [](std::string id, std::string in, std::string keep,
                    std::string divert, double share) {
        return junction(std::move(id), {std::move(in)},
                        {std::move(keep), std::move(divert)},
                        column({share, 1.0 - share}), vec({1.0}));
    };
    auto merge = [](std::string id, std::string in1, std::string in2,
                    std::string out, double prio) {
        return junction(std::move(id), {std::move(in1), std::move(in2)},
                        {std::move(out)}, Eigen::MatrixXd::Ones(1, 2),
                        vec({prio, 1.0 - prio}));
    };

    JunctionSpec j12 = split("J12", "A12", "A23", "V2", 0.80);
    JunctionSpec j13 = split("J13", "A23", "X1", "V3", 0.85);
    JunctionSpec j22 = merge("J22", "B12", "V2", "B23", 0.6);
    JunctionSpec j23 = merge("J23", "B23", "V3", "X2", 0.5);

    // Paired lights, 120 s cycle: corridor arcs green for the first 70 s,
    // cross links for the remainder; the downstream pair is half a cycle out
    // of phase.
    SignalSchedule s12{120.0, 0.0, {{"A12", {{0.0, 70.0}}}}};
    SignalSchedule s13{120.0, 60.0, {{"A23", {{0.0, 70.0}}}}};
    SignalSchedule s22{120.0, 0.0, {{"B12", {{0.0, 70.0}}}, {"V2", {{70.0, 120.0}}}}};
    SignalSchedule s23{120.0, 60.0, {{"B23", {{0.0, 70.0}}}, {"V3", {{70.0, 120.0}}}}};
    j12.signal = s12;
    j13.signal = s13;
    j22.signal = s22;
    j23.signal = s23;

    sc.net.junctions = {split("J0", "E0", "E1", "E2", 0.60),
                        split("J11", "E1", "A12", "V1", 0.75),
                        j12,
                        j13,
                        merge("J21", "E2", "V1", "B12", 0.5),
                        j22,
                        j23};

    sc.net.paths = {{"P1", {"E0", "E1", "A12", "A23", "X1"}},
                    {"P2", {"E0", "E2", "B12", "B23", "X2"}},
                    {"P3", {"E0", "E1", "V1", "B12", "B23", "X2"}},
                    {"P4", {"E0", "E1", "A12", "V2", "B23", "X2"}},
                    {"P5", {"E0", "E1", "A12", "A23", "V3", "X2"}}};
    for (const auto& p : sc.net.paths) {
        path_bc(sc.net, p.id, false, BoundaryCondition::constant(0.07));
        path_bc(sc.net, p.id, true, BoundaryCondition::constant(0.0));
    }
    sc.grid = GridSpec{100.0, 2.5, 2700.0};
    finish(sc);
    return sc;
}

} // namespace

Scenario build_single_road_riemann(int cells) {
    if (cells < 4 || cells % 2 != 0)
        throw std::invalid_argument("single_road_riemann needs an even cell count >= 4");
    Scenario sc;
    sc.name = "single_road_riemann";
    sc.net.diagram = make_parabola();
    sc.net.arcs = {{"1", 1.0, cells}};
    sc.net.paths = {{"P1", {"1"}}};
    sc.grid = GridSpec{1.0 / cells, 1.0 / (4.0 * cells), 0.5};
    path_bc(sc.net, "P1", false, BoundaryCondition::constant(0.8));
    path_bc(sc.net, "P1", true, BoundaryCondition::constant(0.2));
    finish(sc);
    sc.initial.mu[0].head(cells / 2).setConstant(0.8);
    sc.initial.mu[0].tail(cells / 2).setConstant(0.2);
    return sc;
}

std::vector<std::string> builtin_scenario_names() {
    return {"two_in_one_out_const", "two_in_one_out_timedep", "one_in_two_out",
            "two_in_two_out",       "five_arc",               "single_road_riemann",
            "synthetic_large"};
}

Scenario build_scenario(const std::string& name) {
    if (name == "two_in_one_out_const") return build_two_in_one_out_const();
    if (name == "two_in_one_out_timedep") return build_two_in_one_out_timedep();
    if (name == "one_in_two_out") return build_one_in_two_out();
    if (name == "two_in_two_out") return build_two_in_two_out();
    if (name == "five_arc") return build_five_arc();
    if (name == "single_road_riemann") return build_single_road_riemann(40);
    if (name == "synthetic_large") return build_synthetic_large();
    std::string known;
    for (const auto& n : builtin_scenario_names()) known += " " + n;
    throw std::invalid_argument("unknown scenario '" + name + "'; known:" + known);
}

std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Classical: return "classical";
        case SolverKind::Multipath: return "multipath";
        case SolverKind::Local: return "local";
    }
    return "?";
}

SolverKind solver_from_string(const std::string& s) {
    if (s == "classical") return SolverKind::Classical;
    if (s == "multipath") return SolverKind::Multipath;
    if (s == "local") return SolverKind::Local;
    throw std::invalid_argument("unknown solver '" + s +
                                "' (expected classical, multipath or local)");
}

SolverRunResult run_solver(const Scenario& sc, SolverKind kind,
                           const RunOptions& opts) {
    auto diags = validate(sc.net, sc.grid);
    if (!diags.empty())
        throw std::invalid_argument("scenario '" + sc.name + "': " +
                                    diags.front().location + ": " +
                                    diags.front().message);

    const GridSpec& grid = sc.grid;
    const PathCellMap map = PathCellMap::build(sc.net);
    const BoundaryResolver bc(sc.net, map);
    const int steps = grid.step_count();
    const int arcs = static_cast<int>(sc.net.arcs.size());
    const bool per_path = (kind == SolverKind::Multipath);

    SolverRunResult out;
    out.solver = kind;

    // The monitored cells straddle the first junction: for every path that
    // crosses it, the cell before the interface, the first cell after it and
    // the next one.
    struct Monitor {
        int path;
        int base; ///< path cell just past the interface
    };
    std::vector<Monitor> monitors;
    if (opts.record_series && !sc.net.junctions.empty()) {
        static const char* tag[3] = {"before", "at", "after"};
        for (int p = 0; p < map.path_count(); ++p)
            for (const auto& cr : map.crossings(p))
                if (cr.junction == 0) {
                    monitors.push_back({p, cr.cell_after});
                    for (const char* o : tag)
                        out.series_labels.push_back(sc.net.paths[p].id +
                                                    std::string(":") + o);
                }
    }
    out.series.resize(steps + 1, static_cast<Eigen::Index>(3 * monitors.size()));

    PathDensityState mu = sc.initial;
    ArcDensityState rho;
    if (per_path) {
        out.mass_initial = total_mass(mu, map, grid);
    } else {
        rho.rho = arc_totals(sc.initial, map);
        out.mass_initial = total_mass(rho, grid);
    }

    auto sample = [&](int row) {
        if (monitors.empty()) return;
        std::vector<Eigen::ArrayXd> omega;
        if (per_path) omega = aggregate_omega(mu, map);
        for (int mi = 0; mi < static_cast<int>(monitors.size()); ++mi)
            for (int o = -1; o <= 1; ++o) {
                double v;
                if (per_path) {
                    v = omega[monitors[mi].path](monitors[mi].base + o);
                } else {
                    PathCell pc = map.arc_cell(monitors[mi].path, monitors[mi].base + o);
                    v = rho.rho[pc.arc](pc.cell);
                }
                out.series(row, 3 * mi + o + 1) = v;
            }
    };

    StepRecord rec;
    auto tally_boundaries = [&]() {
        for (const auto& [key, flux] : rec.boundary) {
            const std::string name =
                sc.net.arcs[key.first].id + (key.second == 0 ? ":start" : ":end");
            auto& bucket = (key.second == 0) ? out.inflow_integral : out.outflow_integral;
            bucket[name] += grid.dt * flux;
        }
    };

    const auto tick = std::chrono::steady_clock::now();
    for (int n = 0; n < steps; ++n) {
        const double t = n * grid.dt;
        sample(n);
        double delta = 0.0;
        if (per_path) {
            PathDensityState next = step_multipath(sc.net, grid, map, bc, mu, t, {}, &rec);
            for (int p = 0; p < map.path_count(); ++p)
                delta = std::max(delta, (next.mu[p] - mu.mu[p]).abs().maxCoeff());
            mu = std::move(next);
        } else {
            ArcDensityState next =
                (kind == SolverKind::Classical)
                    ? step_classical(sc.net, grid, map, bc, rho, t, {}, &rec)
                    : step_local(sc.net, grid, map, bc, rho, t, {}, &rec);
            for (int a = 0; a < arcs; ++a)
                delta = std::max(delta, (next.rho[a] - rho.rho[a]).abs().maxCoeff());
            rho = std::move(next);
        }
        tally_boundaries();
        if (!out.steady && delta < opts.steady_tol) {
            out.steady = true;
            out.steady_time = (n + 1) * grid.dt;
        }
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tick).count();

    sample(steps);
    for (const auto& js : rec.junctions) out.final_gamma_in.push_back(js.gamma_in);
    if (per_path) {
        out.final_mu = mu.mu;
        out.final_arc_total = arc_totals(mu, map);
        out.mass_final = total_mass(mu, map, grid);
    } else {
        out.final_arc_total = rho.rho;
        out.mass_final = total_mass(rho, grid);
    }

    double in_sum = 0.0, out_sum = 0.0;
    for (const auto& [k, v] : out.inflow_integral) in_sum += v;
    for (const auto& [k, v] : out.outflow_integral) out_sum += v;
    out.mass_residual = (out.mass_final - out.mass_initial) - (in_sum - out_sum);
    return out;
}

std::vector<SolverKind> default_solver_set(const Scenario& sc) {
    std::vector<SolverKind> kinds{SolverKind::Classical, SolverKind::Multipath};
    if (sc.name == "five_arc") kinds.push_back(SolverKind::Local);
    if (sc.name == "synthetic_large") kinds = {SolverKind::Local};
    return kinds;
}

ComparisonReport run_comparison(const Scenario& sc,
                                const std::vector<SolverKind>& kinds,
                                const RunOptions& opts) {
    if (kinds.empty())
        throw std::invalid_argument("run_comparison: no solvers requested");
    ComparisonReport rep;
    rep.scenario = sc.name;
    rep.grid = sc.grid;
    for (SolverKind k : kinds) rep.runs.push_back(run_solver(sc, k, opts));

    const double sigma = sc.net.diagram->sigma();
    const auto& first = rep.runs.front();
    for (const auto& js : sc.net.junctions)
        for (const auto& id : js.incoming) {
            const int a = sc.net.arc_index(id);
            rep.queue_max_density =
                std::max(rep.queue_max_density, first.final_arc_total[a].maxCoeff());
        }
    rep.queue_formed = rep.queue_max_density > sigma + 0.05;

    for (const auto& run : rep.runs)
        if (run.solver == SolverKind::Multipath && !run.final_gamma_in.empty() &&
            run.final_gamma_in.front().size() >= 2) {
            const auto& g = run.final_gamma_in.front();
            rep.mp_gamma_imbalance = std::abs(g(0) - g(1));
        }

    if (rep.runs.size() >= 2) {
        const auto& a = rep.runs[0];
        const auto& b = rep.runs[1];
        for (std::size_t i = 0; i < sc.net.arcs.size(); ++i) {
            const Eigen::ArrayXd diff =
                (a.final_arc_total[i] - b.final_arc_total[i]).abs();
            rep.linf_arc_total = std::max(rep.linf_arc_total, diff.maxCoeff());
            rep.l1_arc_total += sc.grid.dx * diff.sum();
        }

        auto lookup = [](const std::map<std::string, double>& m, const std::string& k) {
            auto it = m.find(k);
            return it == m.end() ? 0.0 : it->second;
        };
        std::set<std::string> exits;
        for (const auto& [k, v] : a.outflow_integral) exits.insert(k);
        for (const auto& [k, v] : b.outflow_integral) exits.insert(k);
        rep.outflows_equal = !exits.empty();
        for (const auto& e : exits) {
            const double x = lookup(a.outflow_integral, e);
            const double y = lookup(b.outflow_integral, e);
            const double rel =
                std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
            rep.outflow_compare[e] = {x, y, rel};
            if (rel > 1e-8) rep.outflows_equal = false;
        }

        if (sc.net.junctions.size() == 1 &&
            sc.net.junctions[0].outgoing.size() == 1) {
            const int o = sc.net.arc_index(sc.net.junctions[0].outgoing[0]);
            const auto& r = a.final_arc_total[o];
            const auto& w = b.final_arc_total[o];
            double worst = 0.0;
            for (Eigen::Index k = 2; k + 1 < r.size(); ++k)
                worst = std::max(worst, std::abs(r(k) - w(k + 1)));
            rep.shift_metric = worst;
        }
    }
    return rep;
}

ComparisonReport run_comparison(const Scenario& sc, const RunOptions& opts) {
    return run_comparison(sc, default_solver_set(sc), opts);
}

ComparisonReport run_comparison(const std::string& name) {
    return run_comparison(build_scenario(name));
}

JunctionOracleResult junction_oracle(const Eigen::VectorXd& demands,
                                     const Eigen::VectorXd& supplies,
                                     const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& q) {
    const int n = static_cast<int>(demands.size());
    const int m = static_cast<int>(supplies.size());
    if (n < 1 || n > 3 || m < 1 || A.rows() != m || A.cols() != n)
        throw std::invalid_argument("junction_oracle: unsupported shape");

    const double step = 2.5e-4; // 1e-3 of the unit-parabola peak flux
    const double eps =
        1e-12 * std::max(1.0, std::max(demands.maxCoeff(), supplies.maxCoeff()));

    JunctionOracleResult res;
    res.max_total = -1.0;
    res.argmax = Eigen::VectorXd::Zero(n);

    // The first coordinate is solved in closed form, so only dimensions
    // 1..n-1 are gridded and the result under-shoots the true maximum by at
    // most (n-1)*step.
    auto close_first = [&](const Eigen::VectorXd& partial, double g1, double g2) {
        double g0 = demands(0);
        for (int j = 0; j < m; ++j)
            if (A(j, 0) > 1e-15)
                g0 = std::min(g0, (supplies(j) - partial(j)) / A(j, 0));
        if (g0 < 0.0) g0 = 0.0;
        const double total = g0 + g1 + g2;
        if (total > res.max_total) {
            res.max_total = total;
            res.argmax(0) = g0;
            if (n > 1) res.argmax(1) = g1;
            if (n > 2) res.argmax(2) = g2;
        }
    };
    auto levels = [&](int i) {
        std::vector<double> v;
        for (long k = 0; k * step < demands(i); ++k) v.push_back(k * step);
        v.push_back(demands(i));
        return v;
    };

    if (n == 1) {
        close_first(Eigen::VectorXd::Zero(m), 0.0, 0.0);
    } else if (n == 2) {
        Eigen::VectorXd p(m);
        for (double g1 : levels(1)) {
            p.noalias() = A.col(1) * g1;
            if ((p.array() > supplies.array() + eps).any()) break;
            close_first(p, g1, 0.0);
        }
    } else {
        Eigen::VectorXd p1(m), p(m);
        const std::vector<double> lv2 = levels(2);
        for (double g1 : levels(1)) {
            p1.noalias() = A.col(1) * g1;
            if ((p1.array() > supplies.array() + eps).any()) break;
            for (double g2 : lv2) {
                p.noalias() = p1 + A.col(2) * g2;
                if ((p.array() > supplies.array() + eps).any()) break;
                close_first(p, g1, g2);
            }
        }
    }

    const JunctionFluxSolution lp = solve_junction(demands, supplies, A, q);
    res.priority_point_optimal =
        std::abs(lp.total - res.max_total) <= (n - 1) * step + 1e-9;
    return res;
}

} // namespace mpt
