#ifndef MPT_NETWORK_HPP
#define MPT_NETWORK_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpt/fundamental.hpp"

namespace mpt {

/// One road segment.  length/cell_count must equal the network-wide dx.
struct ArcSpec {
    std::string id;
    double length = 0.0;
    int cell_count = 0;
};

/// Periodic traffic-light schedule attached to a junction.  An incoming arc
/// is green at time t when fmod(t - offset, period) falls inside one of its
/// green windows; arcs without windows listed are always green.  Red arcs
/// have their junction-crossing flux forced to zero.
struct SignalSchedule {
    double period = 0.0;
    double offset = 0.0;
    /// arc id -> list of [begin, end) windows within [0, period)
    std::map<std::string, std::vector<std::pair<double, double>>> green;

    bool is_green(const std::string& arc_id, double t) const;
};

/// A node where n incoming arcs feed m outgoing arcs.
///
/// preferences is the m x n column-stochastic matrix A: entry (j, i) is the
/// fraction of arc i's flux routed to outgoing arc j.  priorities q (length n,
/// summing to 1) break ties between flux-maximizing distributions.
struct JunctionSpec {
    std::string id;
    std::vector<std::string> incoming;
    std::vector<std::string> outgoing;
    Eigen::MatrixXd preferences;
    Eigen::VectorXd priorities;
    std::optional<SignalSchedule> signal;
};

/// An end-to-end route: an ordered arc sequence, junction-consistent at each
/// hop.  Paths may share arcs; one density unknown per (path, cell) in the
/// multi-path scheme.
struct PathSpec {
    std::string id;
    std::vector<std::string> arcs;
};

/// Dirichlet or closed boundary data for one free end.
struct BoundaryCondition {
    enum class Kind { Constant, Table, ZeroFlux };
    Kind kind = Kind::ZeroFlux;
    double value = 0.0;                 // Constant
    std::vector<double> times, values;  // Table: piecewise-linear, clamped ends

    /// Ghost density at time t (meaningless for ZeroFlux).
    double eval(double t) const;

    static BoundaryCondition constant(double v);
    static BoundaryCondition table(std::vector<double> t, std::vector<double> v);
    static BoundaryCondition closed();

    bool operator==(const BoundaryCondition&) const = default;
};

/// Which end of which object a boundary condition applies to.  Conditions can
/// target a path end (per-path ghost density, the natural multi-path form) or
/// an arc end (total density, the natural per-arc form); see BoundaryTable for
/// how the two views are reconciled.
struct BoundaryKey {
    enum class Target { Arc, Path };
    Target target = Target::Arc;
    std::string id;
    enum class End { Start, End };
    End end = End::Start;

    auto operator<=>(const BoundaryKey&) const = default;
};

/// Uniform discretization parameters.
struct GridSpec {
    double dx = 0.0;
    double dt = 0.0;
    double t_f = 0.0;

    int step_count() const; ///< rounds t_f/dt; throws if not integral to 1e-9
};

/// The immutable-after-validation network description.
struct NetworkSpec {
    std::vector<ArcSpec> arcs;
    std::vector<JunctionSpec> junctions;
    std::vector<PathSpec> paths;
    std::shared_ptr<const FundamentalDiagram> diagram;
    std::map<BoundaryKey, BoundaryCondition> boundaries;

    int arc_index(const std::string& id) const;      ///< -1 when unknown
    int path_index(const std::string& id) const;     ///< -1 when unknown
    int junction_index(const std::string& id) const; ///< -1 when unknown
};

/// One validation finding, locatable by object id.
struct Diagnostic {
    std::string location;
    std::string message;
};

/// Structural validation: reference resolution, preference-column sums,
/// priority normalization, path continuity, arc/grid consistency, boundary
/// placement.  Empty result iff the specification is usable by the solvers.
std::vector<Diagnostic> validate(const NetworkSpec& net, const GridSpec& grid);

} // namespace mpt

#endif
