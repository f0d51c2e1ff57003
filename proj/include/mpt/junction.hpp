#ifndef MPT_JUNCTION_HPP
#define MPT_JUNCTION_HPP

#include <Eigen/Dense>

namespace mpt {

/// Flux distribution chosen at one junction for one time step.
/// gamma_out = A * gamma_in componentwise (routing by preference fractions),
/// so the total crossing the junction is conserved.
struct JunctionFluxSolution {
    Eigen::VectorXd gamma_in;  ///< per incoming arc, bounded by its demand
    Eigen::VectorXd gamma_out; ///< per outgoing arc, bounded by its supply
    double total = 0.0;        ///< sum of gamma_in
    bool unique = true;        ///< whether the maximizer was unique
};

/// Maximize the total flux through a junction subject to demand bounds on the
/// incoming arcs and supply bounds (through the preference matrix A) on the
/// outgoing ones:
///
///   maximize sum(gamma)  over  { 0 <= gamma_i <= demand_i, (A gamma)_j <= supply_j }.
///
/// The feasible set is a polytope in at most 3 dimensions, so the optimum is
/// found exactly by enumerating candidate vertices.  When the maximizer is not
/// unique, priorities q select a point: first the feasible point q*s with the
/// largest scale s is tried; if it falls short of the optimum, coordinates
/// blocked at their demand bound are saturated and the remaining capacity is
/// redistributed along the surviving coordinates (recursively).  If the
/// cascade is stopped below the optimum by a supply constraint alone, the
/// optimal vertex nearest to the ideal point q*T is returned.
///
/// A must be column-stochastic (m x n), q a probability vector of length n
/// (may be empty when n == 1), all rates nonnegative.
JunctionFluxSolution solve_junction(const Eigen::VectorXd& demands,
                                    const Eigen::VectorXd& supplies,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& q);

} // namespace mpt

#endif
