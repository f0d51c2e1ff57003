// Command-line front end: validate scenario files, run solvers, emit the
// comparison artifacts, and benchmark the large synthetic network.
//
// Exit codes: 0 success, 1 rejected input (diagnostics printed), 2 runtime
// failure (CFL violation, I/O error, ...).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mpt/scenario_io.hpp"

namespace {

std::vector<mpt::SolverKind> expand_solvers(const std::vector<std::string>& names,
                                            const mpt::Scenario& sc) {
    if (names.empty()) return mpt::default_solver_set(sc);
    std::vector<mpt::SolverKind> kinds;
    for (const auto& n : names) {
        if (n == "all") {
            kinds = {mpt::SolverKind::Classical, mpt::SolverKind::Multipath,
                     mpt::SolverKind::Local};
            return kinds;
        }
        kinds.push_back(mpt::solver_from_string(n));
    }
    return kinds;
}

void print_summary(const mpt::ComparisonReport& rep) {
    std::printf("scenario %s: dx=%g dt=%g t_f=%g\n", rep.scenario.c_str(),
                rep.grid.dx, rep.grid.dt, rep.grid.t_f);
    for (const auto& run : rep.runs) {
        std::printf("  %-10s %8.3f s   mass %.6f -> %.6f   residual %.3e%s\n",
                    mpt::to_string(run.solver).c_str(), run.wall_seconds,
                    run.mass_initial, run.mass_final, run.mass_residual,
                    run.steady ? "   (steady)" : "");
    }
    for (const auto& [exit, v] : rep.outflow_compare)
        std::printf("  outflow %-10s %.12f vs %.12f   rel %.3e\n", exit.c_str(),
                    v[0], v[1], v[2]);
    if (rep.runs.size() >= 2)
        std::printf("  final density difference: Linf %.3e   L1 %.3e\n",
                    rep.linf_arc_total, rep.l1_arc_total);
    if (rep.shift_metric >= 0.0)
        std::printf("  junction one-cell shift metric: %.4f\n", rep.shift_metric);
    if (rep.mp_gamma_imbalance >= 0.0)
        std::printf("  multipath junction inflow imbalance: %.3e\n",
                    rep.mp_gamma_imbalance);
    std::printf("  queue: max incoming density %.4f -> %s\n", rep.queue_max_density,
                rep.queue_formed ? "queue formed" : "free flow");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Road-network traffic simulation: per-arc Godunov with junction "
                 "flux maximization vs. the per-path scheme"};
    app.require_subcommand(1);

    std::string validate_file;
    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Check a scenario file; print diagnostics");
    cmd_validate->add_option("file", validate_file, "scenario JSON file")->required();

    mpt::RunConfig cfg;
    std::vector<std::string> solver_names;
    std::vector<std::string> emit_names;
    CLI::App* cmd_run =
        app.add_subcommand("run", "Run chosen solvers and write result files");
    cmd_run->add_option("--scenario", cfg.scenario, "built-in name or JSON file")
        ->required();
    cmd_run->add_option("--solver", solver_names,
                        "classical | multipath | local | all (repeatable; "
                        "default: the scenario's comparison set)");
    cmd_run->add_option("--dx", cfg.dx, "re-mesh with this cell width");
    cmd_run->add_option("--dt", cfg.dt, "override the time step");
    cmd_run->add_option("--tf", cfg.t_f, "override the final time");
    cmd_run->add_option("--out", cfg.out_dir, "output directory (default: out)");
    cmd_run->add_option("--emit", emit_names,
                        "subset of profiles,timeseries,report (default: all)");

    std::string cmp_scenario;
    std::string cmp_out = "out";
    CLI::App* cmd_compare = app.add_subcommand(
        "compare", "Run the full solver comparison for one scenario");
    cmd_compare->add_option("scenario", cmp_scenario, "built-in name or JSON file")
        ->required();
    cmd_compare->add_option("--out", cmp_out, "output directory (default: out)");

    CLI::App* cmd_bench = app.add_subcommand(
        "bench", "Time the local solver on the synthetic_large network");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_validate->parsed()) {
            mpt::ParseResult pr = mpt::load_scenario_file(validate_file);
            if (!pr.ok()) {
                for (const auto& d : pr.diagnostics)
                    std::cerr << d.location << ": " << d.message << "\n";
                return 1;
            }
            const auto& sc = *pr.scenario;
            std::printf("%s: valid (%zu arcs, %zu junctions, %zu paths, %d steps)\n",
                        validate_file.c_str(), sc.net.arcs.size(),
                        sc.net.junctions.size(), sc.net.paths.size(),
                        sc.grid.step_count());
            return 0;
        }

        if (cmd_run->parsed()) {
            if (!emit_names.empty()) {
                cfg.emit = {false, false, false};
                for (const auto& e : emit_names) {
                    if (e == "profiles")
                        cfg.emit.profiles = true;
                    else if (e == "timeseries")
                        cfg.emit.timeseries = true;
                    else if (e == "report")
                        cfg.emit.report = true;
                    else
                        throw std::invalid_argument(
                            "--emit expects profiles, timeseries or report, got '" + e +
                            "'");
                }
            }
            const mpt::Scenario sc = mpt::resolve_scenario(cfg);
            const auto kinds = expand_solvers(solver_names, sc);
            const mpt::ComparisonReport rep = mpt::run_comparison(sc, kinds);
            print_summary(rep);
            for (const auto& f : mpt::emit_results(rep, sc, cfg))
                std::printf("wrote %s\n", f.c_str());
            return 0;
        }

        if (cmd_compare->parsed()) {
            mpt::RunConfig ccfg;
            ccfg.scenario = cmp_scenario;
            ccfg.out_dir = cmp_out;
            const mpt::Scenario sc = mpt::resolve_scenario(ccfg);
            const mpt::ComparisonReport rep = mpt::run_comparison(sc);
            print_summary(rep);
            for (const auto& f : mpt::emit_results(rep, sc, ccfg))
                std::printf("wrote %s\n", f.c_str());
            return 0;
        }

        if (cmd_bench->parsed()) {
            const mpt::Scenario sc = mpt::build_scenario("synthetic_large");
            const mpt::PathCellMap map = mpt::PathCellMap::build(sc.net);
            mpt::RunOptions opts;
            opts.record_series = false;
            const mpt::SolverRunResult run =
                mpt::run_solver(sc, mpt::SolverKind::Local, opts);
            const int steps = sc.grid.step_count();
            std::printf("synthetic_large: %d cells x %d steps, local solver\n",
                        map.total_physical_cells(), steps);
            std::printf("wall %.3f s  (%.3g cell-updates/s)  mass residual %.3e\n",
                        run.wall_seconds,
                        static_cast<double>(map.total_physical_cells()) * steps /
                            run.wall_seconds,
                        run.mass_residual);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
