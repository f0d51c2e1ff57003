#ifndef MPT_PATH_MAP_HPP
#define MPT_PATH_MAP_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpt/network.hpp"

namespace mpt {

/// Physical location of a path cell.  All indices 0-based; the figures'
/// 1-based labels (junction between cells 20 and 21 at 20 cells/arc) shift by
/// one.
struct PathCell {
    int arc = -1;
    int cell = -1;
    bool operator==(const PathCell&) const = default;
};

/// Immutable resolution of path coordinates against the arc grid, built once
/// per validated network.
///
/// Provides the bijection (path, path-cell) <-> (arc, arc-cell), the set of
/// paths traversing each arc, junction attachment of arc endpoints, and the
/// junction crossings along each path (needed for signal gating and for
/// junction throughput measurements).
class PathCellMap {
public:
    /// A path hop across a junction: the interface between path cells
    /// (cell_after - 1, cell_after) coincides with the junction.
    struct JunctionCrossing {
        int junction = -1;
        int cell_after = 0; ///< path cell index of the first cell past the junction
        int incoming_arc = -1;
        int outgoing_arc = -1;
    };

    static PathCellMap build(const NetworkSpec& net);

    int arc_count() const { return static_cast<int>(arc_cells_.size()); }
    int path_count() const { return static_cast<int>(cells_.size()); }
    int arc_cells(int arc) const { return arc_cells_[arc]; }
    int path_length(int path) const { return static_cast<int>(cells_[path].size()); }
    int total_physical_cells() const { return total_cells_; }

    PathCell arc_cell(int path, int k) const { return cells_[path][k]; }
    /// Inverse lookup; -1 when the path does not traverse that cell.
    int path_cell(int path, int arc, int cell) const;

    /// (path, path-cell offset of the arc's first cell) for every path
    /// traversing the arc.
    const std::vector<std::pair<int, int>>& paths_on_arc(int arc) const {
        return on_arc_[arc];
    }

    const std::vector<JunctionCrossing>& crossings(int path) const {
        return crossings_[path];
    }

    int junction_at_arc_start(int arc) const { return fed_by_[arc]; }  ///< -1 if free
    int junction_at_arc_end(int arc) const { return drained_by_[arc]; } ///< -1 if free

    /// Paths whose first (resp. last) arc is the given one; these share the
    /// inflow (resp. outflow) ghost cell at that free end.
    const std::vector<int>& paths_starting_at(int arc) const { return starts_[arc]; }
    const std::vector<int>& paths_ending_at(int arc) const { return ends_[arc]; }

private:
    std::vector<std::vector<PathCell>> cells_;       // per path
    std::vector<std::vector<std::pair<int, int>>> on_arc_;
    std::vector<std::vector<JunctionCrossing>> crossings_;
    std::vector<int> arc_cells_;
    std::vector<int> fed_by_, drained_by_;
    std::vector<std::vector<int>> starts_, ends_;
    int total_cells_ = 0;
};

/// Per-arc total densities rho (the unknowns of the per-arc solver).
struct ArcDensityState {
    std::vector<Eigen::ArrayXd> rho;

    static ArcDensityState zeros(const NetworkSpec& net);
    static ArcDensityState constant(const NetworkSpec& net, double value);
};

/// Per-path densities mu (the unknowns of the multi-path solver).
struct PathDensityState {
    std::vector<Eigen::ArrayXd> mu;

    static PathDensityState zeros(const PathCellMap& map);
};

/// Total density per arc cell: the sum of mu over all paths traversing the
/// cell.  This is the aggregation omega in arc-indexed layout.
std::vector<Eigen::ArrayXd> arc_totals(const PathDensityState& state,
                                       const PathCellMap& map);

/// omega along each path's cell sequence; a physical cell shared by several
/// paths yields the identical value on each of them.
std::vector<Eigen::ArrayXd> aggregate_omega(const PathDensityState& state,
                                            const PathCellMap& map);

/// Vehicles on the network: dx times the sum of densities over physical
/// cells (shared cells counted once).
double total_mass(const ArcDensityState& state, const GridSpec& grid);
double total_mass(const PathDensityState& state, const PathCellMap& map,
                  const GridSpec& grid);

} // namespace mpt

#endif
