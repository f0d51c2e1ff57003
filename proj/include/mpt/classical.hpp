#ifndef MPT_CLASSICAL_HPP
#define MPT_CLASSICAL_HPP

#include <map>
#include <utility>
#include <vector>

#include "mpt/fundamental.hpp"
#include "mpt/junction.hpp"
#include "mpt/network.hpp"
#include "mpt/path_map.hpp"

namespace mpt {

/// Maximum flux an upstream cell at density rho can send:
/// f(rho) for rho <= sigma, else f(sigma).
double demand(const FundamentalDiagram& d, double rho);

/// Maximum flux a downstream cell at density rho can receive:
/// f(sigma) for rho <= sigma, else f(rho).
double supply(const FundamentalDiagram& d, double rho);

/// Resolves ghost densities at free ends from the boundary table.
///
/// Conditions may be stated per arc (total density) or per path (per-path
/// density).  The arc view of a path-specified end is the sum of the path
/// ghosts sharing it; the path view of an arc-specified end is the arc value
/// when exactly one path uses that end (ambiguous splits are rejected by
/// validate()).  Ends with no condition are closed (zero flux).
class BoundaryResolver {
public:
    struct Ghost {
        bool closed = true;
        double density = 0.0;
    };

    BoundaryResolver(const NetworkSpec& net, const PathCellMap& map);

    Ghost arc_ghost(int arc, bool at_end, double t) const;
    Ghost path_ghost(int path, bool at_end, double t) const;

private:
    const NetworkSpec* net_;
    const PathCellMap* map_;
    const BoundaryCondition* find(BoundaryKey::Target target, const std::string& id,
                                  bool at_end) const;
};

struct StepOptions {
    bool enforce_cfl = true; ///< disable only for deliberate stability experiments
};

/// Optional per-step observations, filled when passed to a step function.
/// junctions[j].gamma_in holds, per incoming arc, the flux that actually
/// crossed junction j in this step (for the per-arc solver this is the
/// flux-maximization result; the path-based solvers record the realized sums).
/// boundary maps (arc index, 0=start / 1=end) to the flux through that free
/// boundary, directed along the arc.
struct StepRecord {
    std::vector<JunctionFluxSolution> junctions;
    std::map<std::pair<int, int>, double> boundary;
};

struct CflError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CFL condition of the per-arc scheme: dt * sup|f'| <= dx.
CflReport cfl_check_classical(const FundamentalDiagram& d, const GridSpec& grid);

/// One explicit step of the per-arc Godunov scheme.  Interior interfaces use
/// the scalar Godunov flux on total densities; each junction's crossing fluxes
/// come from solve_junction applied to the demands of the incoming last cells
/// (zeroed for red signal phases) and supplies of the outgoing first cells;
/// free ends use ghost-cell boundary data.  Pure function: the input state is
/// untouched.
ArcDensityState step_classical(const NetworkSpec& net, const GridSpec& grid,
                               const PathCellMap& map, const BoundaryResolver& bc,
                               const ArcDensityState& state, double t,
                               const StepOptions& opts = {},
                               StepRecord* rec = nullptr);

} // namespace mpt

#endif
