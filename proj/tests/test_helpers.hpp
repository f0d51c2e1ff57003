// Small network builders shared by the unit-test suites.  Everything returns
// plain value types; no fixture state.
#ifndef MPT_TEST_HELPERS_HPP
#define MPT_TEST_HELPERS_HPP

#include <random>
#include <string>
#include <vector>

#include "mpt/classical.hpp"
#include "mpt/multipath.hpp"
#include "mpt/network.hpp"
#include "mpt/path_map.hpp"

namespace mpt_test {

inline mpt::ArcSpec arc(const std::string& id, double length, int cells) {
    mpt::ArcSpec a;
    a.id = id;
    a.length = length;
    a.cell_count = cells;
    return a;
}

/// One road "r" traversed by one path "P"; no junctions, no boundaries.
inline mpt::NetworkSpec single_road(int cells, double dx) {
    mpt::NetworkSpec net;
    net.diagram = mpt::make_parabola();
    net.arcs = {arc("r", dx * cells, cells)};
    net.paths = {{"P", {"r"}}};
    return net;
}

/// The merge layout: arcs "1","2" feed arc "3" through one junction with
/// equal priorities; paths P1 = (1,3), P2 = (2,3).  No boundaries.
inline mpt::NetworkSpec merge_net(int cells = 20, double dx = 0.05) {
    mpt::NetworkSpec net;
    net.diagram = mpt::make_parabola();
    net.arcs = {arc("1", dx * cells, cells), arc("2", dx * cells, cells),
                arc("3", dx * cells, cells)};
    mpt::JunctionSpec j;
    j.id = "J";
    j.incoming = {"1", "2"};
    j.outgoing = {"3"};
    j.preferences = Eigen::MatrixXd::Ones(1, 2);
    j.priorities = Eigen::VectorXd::Constant(2, 0.5);
    net.junctions = {j};
    net.paths = {{"P1", {"1", "3"}}, {"P2", {"2", "3"}}};
    return net;
}

/// Two arcs in series joined by a trivial 1-in-1-out junction; one path.
inline mpt::NetworkSpec series_net(int cells = 10, double dx = 0.1) {
    mpt::NetworkSpec net;
    net.diagram = mpt::make_parabola();
    net.arcs = {arc("a", dx * cells, cells), arc("b", dx * cells, cells)};
    mpt::JunctionSpec j;
    j.id = "J";
    j.incoming = {"a"};
    j.outgoing = {"b"};
    j.preferences = Eigen::MatrixXd::Ones(1, 1);
    j.priorities = Eigen::VectorXd::Ones(1);
    net.junctions = {j};
    net.paths = {{"P", {"a", "b"}}};
    return net;
}

inline void set_boundary(mpt::NetworkSpec& net, mpt::BoundaryKey::Target target,
                         const std::string& id, mpt::BoundaryKey::End end,
                         mpt::BoundaryCondition bc) {
    net.boundaries[{target, id, end}] = std::move(bc);
}

/// Random admissible per-path state on a validated network: omega of every
/// physical cell is split uniformly among the traversing paths after drawing
/// omega ~ U(0, cap).
inline mpt::PathDensityState random_state(const mpt::NetworkSpec& net,
                                          const mpt::PathCellMap& map,
                                          std::mt19937& gen, double cap = 1.0) {
    std::uniform_real_distribution<double> uni(0.0, cap);
    mpt::PathDensityState st = mpt::PathDensityState::zeros(map);
    for (int a = 0; a < map.arc_count(); ++a) {
        const auto& users = map.paths_on_arc(a);
        if (users.empty()) continue;
        for (int c = 0; c < map.arc_cells(a); ++c) {
            double omega = uni(gen);
            // Random split of omega among the traversing paths.
            std::vector<double> cut(users.size() + 1, 0.0);
            cut.back() = 1.0;
            for (std::size_t i = 1; i < users.size(); ++i)
                cut[i] = uni(gen) / cap;
            std::sort(cut.begin(), cut.end());
            for (std::size_t i = 0; i < users.size(); ++i) {
                auto [p, off] = users[i];
                st.mu[p](off + c) = omega * (cut[i + 1] - cut[i]);
            }
        }
    }
    return st;
}

inline double max_abs_diff(const std::vector<Eigen::ArrayXd>& a,
                           const std::vector<Eigen::ArrayXd>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, (a[i] - b[i]).abs().maxCoeff());
    return m;
}

} // namespace mpt_test

#endif
