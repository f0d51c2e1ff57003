#ifndef MPT_SCENARIOS_HPP
#define MPT_SCENARIOS_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpt/classical.hpp"
#include "mpt/multipath.hpp"
#include "mpt/network.hpp"
#include "mpt/path_map.hpp"

namespace mpt {

/// A runnable configuration: network, grid and initial per-path densities.
/// The per-arc initial state of the total-density solvers is the aggregation
/// of `initial`.
struct Scenario {
    std::string name;
    NetworkSpec net;
    GridSpec grid;
    PathDensityState initial; ///< sized per path; all-zero means an empty network
};

/// Names accepted by build_scenario.
std::vector<std::string> builtin_scenario_names();

/// Canonical experiment configurations:
///  - two_in_one_out_const: 3 arcs, junction 2->1, inflows 0.4/0.2, exit held
///    at 0, t_f = 5 with 241 time nodes; queues form behind the junction.
///  - two_in_one_out_timedep: same network, inflows (1+sin t)/4 and
///    (1+cos t)/4, t_f = 8.
///  - one_in_two_out: junction 1->2 with splits 0.8/0.2, exit of the minor
///    branch held at 0.9, t_f = 11.
///  - two_in_two_out: junction 2->2, four paths, splits 0.8/0.2 and 0.9/0.1,
///    inflows 0.5/0.5, t_f = 6.
///  - five_arc: two junctions in series, two overlapping routes, the second
///    route carrying no traffic; separates the global scheme from the local
///    one.
///  - single_road_riemann: one road, decreasing density jump mid-road
///    (0.8 | 0.2); convergence benchmark against the exact rarefaction.
///  - synthetic_large: a 2x3 junction grid with 6 corridors, 3282 cells of
///    100 m, dt = 2.5 s, 1080 steps, four paired traffic lights.
/// All square networks use 20 cells per unit-length arc and start empty.
Scenario build_scenario(const std::string& name);

/// The Riemann benchmark at a chosen resolution (cells must be even).
Scenario build_single_road_riemann(int cells);

enum class SolverKind { Classical, Multipath, Local };
std::string to_string(SolverKind k);
SolverKind solver_from_string(const std::string& s);

struct RunOptions {
    bool record_series = true;    ///< sample the junction-adjacent time series
    double steady_tol = 1e-10;    ///< max per-cell change defining steady state
};

/// Everything observed while running one solver on one scenario.
struct SolverRunResult {
    SolverKind solver = SolverKind::Classical;

    std::vector<Eigen::ArrayXd> final_arc_total; ///< per arc, total density
    std::vector<Eigen::ArrayXd> final_mu;        ///< per path (multi-path solver only)

    /// Time series at the cells around the first junction: one row per time
    /// node, one column per (path crossing, offset in {-1, 0, +1}).
    Eigen::MatrixXd series;
    std::vector<std::string> series_labels;

    std::map<std::string, double> inflow_integral;  ///< per entry "arc:side"
    std::map<std::string, double> outflow_integral; ///< per exit "arc:side"

    double mass_initial = 0.0;
    double mass_final = 0.0;
    /// (mass_final - mass_initial) - dt * (sum inflows - sum outflows);
    /// zero up to roundoff for a conservative scheme.
    double mass_residual = 0.0;

    std::vector<Eigen::VectorXd> final_gamma_in; ///< per junction, last step
    bool steady = false;
    double steady_time = -1.0;
    double wall_seconds = 0.0;
};

SolverRunResult run_solver(const Scenario& sc, SolverKind kind,
                           const RunOptions& opts = {});

/// Side-by-side metrics for the solver comparison experiments.  The pairwise
/// quantities compare the first two runs (per-arc vs multi-path).
struct ComparisonReport {
    std::string scenario;
    GridSpec grid;
    std::vector<SolverRunResult> runs;

    double linf_arc_total = 0.0;
    double l1_arc_total = 0.0;

    /// exit -> {first solver's integral, second's, relative difference}
    std::map<std::string, std::array<double, 3>> outflow_compare;
    bool outflows_equal = false; ///< all exits agree to 1e-8 relative

    /// One-cell junction shift: max |rho_out(k) - omega_out(k+1)| over
    /// outgoing cells at least 3 cells past the junction (-1 when the network
    /// is not a single-junction, single-outgoing-arc layout).
    double shift_metric = -1.0;

    double queue_max_density = 0.0; ///< max final density on junction-feeding arcs
    bool queue_formed = false;      ///< that max exceeds sigma by more than 0.05

    /// |gamma_1 - gamma_2| across the first junction of the multi-path run at
    /// the final step (-1 when fewer than 2 incoming arcs).
    double mp_gamma_imbalance = -1.0;
};

/// The default solver set: per-arc + multi-path for the square networks and
/// the Riemann road, plus the local solver for five_arc, local only for
/// synthetic_large.
std::vector<SolverKind> default_solver_set(const Scenario& sc);

ComparisonReport run_comparison(const Scenario& sc,
                                const std::vector<SolverKind>& kinds,
                                const RunOptions& opts = {});
ComparisonReport run_comparison(const Scenario& sc, const RunOptions& opts = {});
ComparisonReport run_comparison(const std::string& name);

/// Brute-force check of the junction flux maximization: grid search with step
/// 1e-3 * f(sigma) over the feasible set (the first coordinate is closed-form
/// maximal for each grid assignment of the others, so the gap to the true
/// optimum is at most (n-1) grid steps).  Also reports whether the
/// priority-selected point reaches the found maximum.
struct JunctionOracleResult {
    double max_total = 0.0;
    Eigen::VectorXd argmax;
    bool priority_point_optimal = false;
};

JunctionOracleResult junction_oracle(const Eigen::VectorXd& demands,
                                     const Eigen::VectorXd& supplies,
                                     const Eigen::MatrixXd& A,
                                     const Eigen::VectorXd& q);

} // namespace mpt

#endif
