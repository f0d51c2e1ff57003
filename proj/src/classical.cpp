#include "mpt/classical.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mpt {

double demand(const FundamentalDiagram& d, double rho) {
    return rho <= d.sigma() ? d.flux(rho) : d.flux_max();
}

double supply(const FundamentalDiagram& d, double rho) {
    return rho <= d.sigma() ? d.flux_max() : d.flux(rho);
}

BoundaryResolver::BoundaryResolver(const NetworkSpec& net, const PathCellMap& map)
    : net_(&net), map_(&map) {}

const BoundaryCondition* BoundaryResolver::find(BoundaryKey::Target target,
                                                const std::string& id,
                                                bool at_end) const {
    BoundaryKey key{target, id, at_end ? BoundaryKey::End::End : BoundaryKey::End::Start};
    auto it = net_->boundaries.find(key);
    return it == net_->boundaries.end() ? nullptr : &it->second;
}

BoundaryResolver::Ghost BoundaryResolver::arc_ghost(int arc, bool at_end, double t) const {
    if (const auto* bc = find(BoundaryKey::Target::Arc, net_->arcs[arc].id, at_end)) {
        if (bc->kind == BoundaryCondition::Kind::ZeroFlux) return {true, 0.0};
        return {false, bc->eval(t)};
    }
    // Aggregate per-path conditions sharing this free end.
    const auto& paths =
        at_end ? map_->paths_ending_at(arc) : map_->paths_starting_at(arc);
    bool any = false;
    double sum = 0.0;
    for (int p : paths) {
        if (const auto* bc = find(BoundaryKey::Target::Path, net_->paths[p].id, at_end)) {
            if (bc->kind != BoundaryCondition::Kind::ZeroFlux) {
                any = true;
                sum += bc->eval(t);
            }
        }
    }
    if (!any) return {true, 0.0};
    return {false, sum};
}

BoundaryResolver::Ghost BoundaryResolver::path_ghost(int path, bool at_end, double t) const {
    if (const auto* bc = find(BoundaryKey::Target::Path, net_->paths[path].id, at_end)) {
        if (bc->kind == BoundaryCondition::Kind::ZeroFlux) return {true, 0.0};
        return {false, bc->eval(t)};
    }
    // Fall back to an arc-level condition when this path owns the end alone.
    const auto& arcs = net_->paths[path].arcs;
    int arc = net_->arc_index(at_end ? arcs.back() : arcs.front());
    const auto& sharing =
        at_end ? map_->paths_ending_at(arc) : map_->paths_starting_at(arc);
    if (const auto* bc = find(BoundaryKey::Target::Arc, net_->arcs[arc].id, at_end)) {
        if (bc->kind == BoundaryCondition::Kind::ZeroFlux) return {true, 0.0};
        if (sharing.size() == 1) return {false, bc->eval(t)};
        throw std::runtime_error(
            "BoundaryResolver: arc-level condition on '" + net_->arcs[arc].id +
            "' is ambiguous for " + std::to_string(sharing.size()) +
            " paths; specify per-path conditions");
    }
    return {true, 0.0};
}

CflReport cfl_check_classical(const FundamentalDiagram& d, const GridSpec& grid) {
    CflReport r;
    r.margin = grid.dx - grid.dt * d.max_char_speed();
    r.dt_limit = grid.dx / d.max_char_speed();
    r.pass = r.margin >= 0.0;
    return r;
}

namespace {

void require_admissible(const ArcDensityState& state, double rho_max) {
    for (const auto& r : state.rho)
        if ((r < -1e-12).any() || (r > rho_max + 1e-12).any())
            throw std::invalid_argument(
                "step_classical: input densities outside [0, rho_max]");
}

} // namespace

ArcDensityState step_classical(const NetworkSpec& net, const GridSpec& grid,
                               const PathCellMap& map, const BoundaryResolver& bc,
                               const ArcDensityState& state, double t,
                               const StepOptions& opts, StepRecord* rec) {
    const FundamentalDiagram& fd = *net.diagram;
    if (opts.enforce_cfl) {
        auto cfl = cfl_check_classical(fd, grid);
        if (!cfl.pass) {
            std::ostringstream os;
            os << "CFL violated for the per-arc scheme: dt * sup|f'| = "
               << grid.dt * fd.max_char_speed() << " > dx = " << grid.dx;
            throw CflError(os.str());
        }
    }
    require_admissible(state, fd.rho_max());

    const double lam = grid.dt / grid.dx;
    const int A = map.arc_count();
    const int J = static_cast<int>(net.junctions.size());

    if (rec) {
        rec->junctions.assign(J, {});
        rec->boundary.clear();
    }

    // Resolve all junction crossings first: Eq.-style end-cell updates use the
    // maximal flux distribution computed from time-n adjacent cell values.
    std::vector<JunctionFluxSolution> jsol(J);
    for (int j = 0; j < J; ++j) {
        const auto& js = net.junctions[j];
        const auto n = static_cast<Eigen::Index>(js.incoming.size());
        const auto m = static_cast<Eigen::Index>(js.outgoing.size());
        Eigen::VectorXd dm(n), sp(m);
        for (Eigen::Index i = 0; i < n; ++i) {
            int a = net.arc_index(js.incoming[i]);
            double di = demand(fd, state.rho[a](state.rho[a].size() - 1));
            if (js.signal && !js.signal->is_green(js.incoming[i], t)) di = 0.0;
            dm(i) = di;
        }
        for (Eigen::Index o = 0; o < m; ++o) {
            int a = net.arc_index(js.outgoing[o]);
            sp(o) = supply(fd, state.rho[a](0));
        }
        jsol[j] = solve_junction(dm, sp, js.preferences, js.priorities);
        if (rec) rec->junctions[j] = jsol[j];
    }

    ArcDensityState next = state;
    for (int a = 0; a < A; ++a) {
        const Eigen::ArrayXd& r = state.rho[a];
        const auto N = r.size();
        Eigen::ArrayXd F(N + 1);
        for (Eigen::Index k = 1; k < N; ++k)
            F(k) = godunov_flux(fd, r(k - 1), r(k));

        int jin = map.junction_at_arc_start(a);
        if (jin >= 0) {
            const auto& js = net.junctions[jin];
            Eigen::Index slot = 0;
            while (net.arc_index(js.outgoing[slot]) != a) ++slot;
            F(0) = jsol[jin].gamma_out(slot);
        } else {
            auto g = bc.arc_ghost(a, /*at_end=*/false, t);
            F(0) = g.closed ? 0.0 : godunov_flux(fd, g.density, r(0));
            if (rec) rec->boundary[{a, 0}] = F(0);
        }

        int jout = map.junction_at_arc_end(a);
        if (jout >= 0) {
            const auto& js = net.junctions[jout];
            Eigen::Index slot = 0;
            while (net.arc_index(js.incoming[slot]) != a) ++slot;
            F(N) = jsol[jout].gamma_in(slot);
        } else {
            auto g = bc.arc_ghost(a, /*at_end=*/true, t);
            F(N) = g.closed ? 0.0 : godunov_flux(fd, r(N - 1), g.density);
            if (rec) rec->boundary[{a, 1}] = F(N);
        }

        next.rho[a] = r - lam * (F.tail(N) - F.head(N));
    }
    return next;
}

} // namespace mpt
