#ifndef MPT_MULTIPATH_HPP
#define MPT_MULTIPATH_HPP

#include "mpt/classical.hpp"
#include "mpt/network.hpp"
#include "mpt/path_map.hpp"

namespace mpt {

/// CFL-like condition of the multi-path scheme: 2 * dt * sup|f'| <= dx.
/// The extra factor 2 pays for several paths discharging into one shared cell.
CflReport cfl_check_multipath(const FundamentalDiagram& d, const GridSpec& grid);

/// True iff all mu >= 0 and the total density omega of every physical cell is
/// at most rho_max + 1e-12.
bool admissible(const PathDensityState& state, const PathCellMap& map,
                double rho_max);

/// One explicit step of the multi-path scheme.  Every path cell k is updated
/// by the conservative rule
///
///   mu_k -= (dt/dx) * [ (mu_k/omega_k) g(omega_k, omega_{k+1})
///                       - (mu_{k-1}/omega_{k-1}) g(omega_{k-1}, omega_k) ],
///
/// with all omegas taken along the path at time n, the convention mu/omega = 0
/// at empty cells, ghost cells feeding boundary data, and g forced to zero
/// across an interface whose junction shows red to the path's incoming arc.
/// No junction subproblem is solved: the aggregation omega carries the
/// coupling.  Note the asymmetry — the donor ratios are those of cells k and
/// k-1 only.
PathDensityState step_multipath(const NetworkSpec& net, const GridSpec& grid,
                                const PathCellMap& map, const BoundaryResolver& bc,
                                const PathDensityState& state, double t,
                                const StepOptions& opts = {},
                                StepRecord* rec = nullptr);

/// One step of the local (hybrid) scheme on total densities: plain Godunov in
/// arc interiors; at each junction the last incoming cell is split into
/// per-direction components by the preference matrix columns, the multi-path
/// stencil carries each component across the interface, and components are
/// re-summed on the outgoing first cells.  Scales to networks whose path count
/// is unmanageable, at the cost of losing global route fidelity.
ArcDensityState step_local(const NetworkSpec& net, const GridSpec& grid,
                           const PathCellMap& map, const BoundaryResolver& bc,
                           const ArcDensityState& state, double t,
                           const StepOptions& opts = {},
                           StepRecord* rec = nullptr);

} // namespace mpt

#endif
