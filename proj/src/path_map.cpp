#include "mpt/path_map.hpp"

#include <stdexcept>

namespace mpt {

PathCellMap PathCellMap::build(const NetworkSpec& net) {
    PathCellMap m;
    const int A = static_cast<int>(net.arcs.size());
    m.arc_cells_.resize(A);
    for (int a = 0; a < A; ++a) m.arc_cells_[a] = net.arcs[a].cell_count;
    m.total_cells_ = 0;
    for (int a = 0; a < A; ++a) m.total_cells_ += m.arc_cells_[a];

    m.fed_by_.assign(A, -1);
    m.drained_by_.assign(A, -1);
    for (std::size_t j = 0; j < net.junctions.size(); ++j) {
        for (const auto& id : net.junctions[j].incoming) {
            int a = net.arc_index(id);
            if (a < 0) throw std::invalid_argument("PathCellMap: unresolved arc '" + id + "'");
            m.drained_by_[a] = static_cast<int>(j);
        }
        for (const auto& id : net.junctions[j].outgoing) {
            int a = net.arc_index(id);
            if (a < 0) throw std::invalid_argument("PathCellMap: unresolved arc '" + id + "'");
            m.fed_by_[a] = static_cast<int>(j);
        }
    }

    const int P = static_cast<int>(net.paths.size());
    m.cells_.resize(P);
    m.crossings_.resize(P);
    m.on_arc_.resize(A);
    m.starts_.resize(A);
    m.ends_.resize(A);

    for (int p = 0; p < P; ++p) {
        const auto& arcs = net.paths[p].arcs;
        int offset = 0;
        for (std::size_t h = 0; h < arcs.size(); ++h) {
            int a = net.arc_index(arcs[h]);
            if (a < 0)
                throw std::invalid_argument("PathCellMap: path '" + net.paths[p].id +
                                            "' references unknown arc '" + arcs[h] + "'");
            m.on_arc_[a].push_back({p, offset});
            for (int c = 0; c < m.arc_cells_[a]; ++c) m.cells_[p].push_back({a, c});
            if (h + 1 < arcs.size()) {
                int b = net.arc_index(arcs[h + 1]);
                int j = m.drained_by_[a];
                if (j < 0 || m.fed_by_[b] != j)
                    throw std::invalid_argument("PathCellMap: path '" + net.paths[p].id +
                                                "' is not junction-consistent at arc '" +
                                                arcs[h] + "'");
                m.crossings_[p].push_back({j, offset + m.arc_cells_[a], a, b});
            }
            offset += m.arc_cells_[a];
        }
        m.starts_[net.arc_index(arcs.front())].push_back(p);
        m.ends_[net.arc_index(arcs.back())].push_back(p);
    }
    return m;
}

int PathCellMap::path_cell(int path, int arc, int cell) const {
    for (const auto& [p, off] : on_arc_[arc])
        if (p == path) return off + cell;
    return -1;
}

ArcDensityState ArcDensityState::zeros(const NetworkSpec& net) {
    ArcDensityState s;
    s.rho.reserve(net.arcs.size());
    for (const auto& a : net.arcs) s.rho.push_back(Eigen::ArrayXd::Zero(a.cell_count));
    return s;
}

ArcDensityState ArcDensityState::constant(const NetworkSpec& net, double value) {
    ArcDensityState s;
    s.rho.reserve(net.arcs.size());
    for (const auto& a : net.arcs)
        s.rho.push_back(Eigen::ArrayXd::Constant(a.cell_count, value));
    return s;
}

PathDensityState PathDensityState::zeros(const PathCellMap& map) {
    PathDensityState s;
    s.mu.reserve(map.path_count());
    for (int p = 0; p < map.path_count(); ++p)
        s.mu.push_back(Eigen::ArrayXd::Zero(map.path_length(p)));
    return s;
}

std::vector<Eigen::ArrayXd> arc_totals(const PathDensityState& state,
                                       const PathCellMap& map) {
    std::vector<Eigen::ArrayXd> tot(map.arc_count());
    for (int a = 0; a < map.arc_count(); ++a) {
        tot[a] = Eigen::ArrayXd::Zero(map.arc_cells(a));
        for (const auto& [p, off] : map.paths_on_arc(a))
            tot[a] += state.mu[p].segment(off, map.arc_cells(a));
    }
    return tot;
}

std::vector<Eigen::ArrayXd> aggregate_omega(const PathDensityState& state,
                                            const PathCellMap& map) {
    auto tot = arc_totals(state, map);
    std::vector<Eigen::ArrayXd> omega(map.path_count());
    for (int p = 0; p < map.path_count(); ++p) {
        omega[p].resize(map.path_length(p));
        int off = 0;
        // Paths traverse whole arcs, so the gather is segment-wise.
        for (int k = 0; k < map.path_length(p);) {
            PathCell pc = map.arc_cell(p, k);
            int n = map.arc_cells(pc.arc);
            omega[p].segment(off, n) = tot[pc.arc];
            off += n;
            k += n;
        }
    }
    return omega;
}

double total_mass(const ArcDensityState& state, const GridSpec& grid) {
    double s = 0.0;
    for (const auto& r : state.rho) s += r.sum();
    return grid.dx * s;
}

double total_mass(const PathDensityState& state, const PathCellMap& map,
                  const GridSpec& grid) {
    // Summing omega over physical cells counts every mu exactly once, so the
    // per-path sum is already the physical total.
    (void)map;
    double s = 0.0;
    for (const auto& mu : state.mu) s += mu.sum();
    return grid.dx * s;
}

} // namespace mpt
