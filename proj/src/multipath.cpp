#include "mpt/multipath.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mpt {

namespace {

// 0/0 convention for composition fractions: an empty cell contributes no
// flux.  The threshold tolerates underflow without treating real densities
// as empty.
inline double ratio(double mu, double omega) {
    return omega < 1e-300 ? 0.0 : mu / omega;
}

void check_cfl_multipath(const FundamentalDiagram& fd, const GridSpec& grid) {
    auto cfl = cfl_check_multipath(fd, grid);
    if (!cfl.pass) {
        std::ostringstream os;
        os << "CFL violated for the multi-path scheme: 2 * dt * sup|f'| = "
           << 2.0 * grid.dt * fd.max_char_speed() << " > dx = " << grid.dx;
        throw CflError(os.str());
    }
}

} // namespace

CflReport cfl_check_multipath(const FundamentalDiagram& d, const GridSpec& grid) {
    CflReport r;
    r.margin = grid.dx - 2.0 * grid.dt * d.max_char_speed();
    r.dt_limit = grid.dx / (2.0 * d.max_char_speed());
    r.pass = r.margin >= 0.0;
    return r;
}

bool admissible(const PathDensityState& state, const PathCellMap& map,
                double rho_max) {
    for (const auto& mu : state.mu)
        if ((mu < 0.0).any()) return false;
    for (const auto& tot : arc_totals(state, map))
        if ((tot > rho_max + 1e-12).any()) return false;
    return true;
}

PathDensityState step_multipath(const NetworkSpec& net, const GridSpec& grid,
                                const PathCellMap& map, const BoundaryResolver& bc,
                                const PathDensityState& state, double t,
                                const StepOptions& opts, StepRecord* rec) {
    const FundamentalDiagram& fd = *net.diagram;
    if (opts.enforce_cfl) check_cfl_multipath(fd, grid);
    if (!admissible(state, map, fd.rho_max()))
        throw std::invalid_argument(
            "step_multipath: input state inadmissible (mu < 0 or omega > rho_max)");

    const double lam = grid.dt / grid.dx;
    const int P = map.path_count();
    const int J = static_cast<int>(net.junctions.size());

    if (rec) {
        rec->junctions.assign(J, {});
        for (int j = 0; j < J; ++j) {
            const auto& js = net.junctions[j];
            rec->junctions[j].gamma_in =
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(js.incoming.size()));
            rec->junctions[j].gamma_out =
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(js.outgoing.size()));
        }
        rec->boundary.clear();
    }

    // All omegas at time n, before any update (interleaving would break
    // conservation on shared cells).
    const auto omega = aggregate_omega(state, map);

    // Ghost omega at a free end is the sum of the ghost mu of every path
    // sharing that end; compute once per (arc, side).
    const int A = map.arc_count();
    std::vector<double> ghost_omega_start(A, 0.0), ghost_omega_end(A, 0.0);
    for (int a = 0; a < A; ++a) {
        if (map.junction_at_arc_start(a) < 0)
            for (int p : map.paths_starting_at(a)) {
                auto g = bc.path_ghost(p, false, t);
                if (!g.closed) ghost_omega_start[a] += g.density;
            }
        if (map.junction_at_arc_end(a) < 0)
            for (int p : map.paths_ending_at(a)) {
                auto g = bc.path_ghost(p, true, t);
                if (!g.closed) ghost_omega_end[a] += g.density;
            }
    }

    PathDensityState next = state;
    for (int p = 0; p < P; ++p) {
        const Eigen::ArrayXd& mu = state.mu[p];
        const Eigen::ArrayXd& om = omega[p];
        const auto L = mu.size();
        Eigen::ArrayXd F(L + 1);

        for (Eigen::Index k = 1; k < L; ++k)
            F(k) = ratio(mu(k - 1), om(k - 1)) * godunov_flux(fd, om(k - 1), om(k));

        {
            auto g = bc.path_ghost(p, false, t);
            if (g.closed) {
                F(0) = 0.0;
            } else {
                int a0 = map.arc_cell(p, 0).arc;
                double og = ghost_omega_start[a0];
                F(0) = ratio(g.density, og) * godunov_flux(fd, og, om(0));
            }
        }
        {
            auto g = bc.path_ghost(p, true, t);
            if (g.closed) {
                F(L) = 0.0;
            } else {
                int aL = map.arc_cell(p, static_cast<int>(L) - 1).arc;
                double og = ghost_omega_end[aL];
                F(L) = ratio(mu(L - 1), om(L - 1)) * godunov_flux(fd, om(L - 1), og);
            }
        }

        // Red phases cut the flux across the junction interface itself.
        for (const auto& cr : map.crossings(p)) {
            const auto& js = net.junctions[cr.junction];
            if (js.signal && !js.signal->is_green(net.arcs[cr.incoming_arc].id, t))
                F(cr.cell_after) = 0.0;
        }

        if (rec) {
            for (const auto& cr : map.crossings(p)) {
                auto& jr = rec->junctions[cr.junction];
                const auto& js = net.junctions[cr.junction];
                Eigen::Index si = 0;
                while (net.arc_index(js.incoming[si]) != cr.incoming_arc) ++si;
                Eigen::Index so = 0;
                while (net.arc_index(js.outgoing[so]) != cr.outgoing_arc) ++so;
                jr.gamma_in(si) += F(cr.cell_after);
                jr.gamma_out(so) += F(cr.cell_after);
                jr.total += F(cr.cell_after);
            }
            int a0 = map.arc_cell(p, 0).arc;
            int aL = map.arc_cell(p, static_cast<int>(L) - 1).arc;
            if (map.junction_at_arc_start(a0) < 0) rec->boundary[{a0, 0}] += F(0);
            if (map.junction_at_arc_end(aL) < 0) rec->boundary[{aL, 1}] += F(L);
        }

        next.mu[p] = mu - lam * (F.tail(L) - F.head(L));
    }
    return next;
}

ArcDensityState step_local(const NetworkSpec& net, const GridSpec& grid,
                           const PathCellMap& map, const BoundaryResolver& bc,
                           const ArcDensityState& state, double t,
                           const StepOptions& opts, StepRecord* rec) {
    const FundamentalDiagram& fd = *net.diagram;
    if (opts.enforce_cfl) check_cfl_multipath(fd, grid);

    const double lam = grid.dt / grid.dx;
    const int A = map.arc_count();
    const int J = static_cast<int>(net.junctions.size());

    if (rec) {
        rec->junctions.assign(J, {});
        rec->boundary.clear();
    }

    // Junction-crossing fluxes: the last incoming cell's density is split by
    // the preference columns into per-direction components, each advected by
    // the multi-path stencil across the interface, then re-summed per arc.
    std::vector<Eigen::VectorXd> jin(J), jout(J);
    for (int j = 0; j < J; ++j) {
        const auto& js = net.junctions[j];
        const auto n = static_cast<Eigen::Index>(js.incoming.size());
        const auto m = static_cast<Eigen::Index>(js.outgoing.size());
        jin[j] = Eigen::VectorXd::Zero(n);
        jout[j] = Eigen::VectorXd::Zero(m);
        for (Eigen::Index i = 0; i < n; ++i) {
            int ai = net.arc_index(js.incoming[i]);
            if (js.signal && !js.signal->is_green(js.incoming[i], t)) continue;
            double ri = state.rho[ai](state.rho[ai].size() - 1);
            for (Eigen::Index o = 0; o < m; ++o) {
                int ao = net.arc_index(js.outgoing[o]);
                double flux =
                    js.preferences(o, i) * godunov_flux(fd, ri, state.rho[ao](0));
                jin[j](i) += flux;
                jout[j](o) += flux;
            }
        }
        if (rec) {
            rec->junctions[j].gamma_in = jin[j];
            rec->junctions[j].gamma_out = jout[j];
            rec->junctions[j].total = jin[j].sum();
        }
    }

    ArcDensityState next = state;
    for (int a = 0; a < A; ++a) {
        const Eigen::ArrayXd& r = state.rho[a];
        const auto N = r.size();
        Eigen::ArrayXd F(N + 1);
        for (Eigen::Index k = 1; k < N; ++k)
            F(k) = godunov_flux(fd, r(k - 1), r(k));

        int jfs = map.junction_at_arc_start(a);
        if (jfs >= 0) {
            const auto& js = net.junctions[jfs];
            Eigen::Index slot = 0;
            while (net.arc_index(js.outgoing[slot]) != a) ++slot;
            F(0) = jout[jfs](slot);
        } else {
            auto g = bc.arc_ghost(a, false, t);
            F(0) = g.closed ? 0.0 : godunov_flux(fd, g.density, r(0));
            if (rec) rec->boundary[{a, 0}] = F(0);
        }

        int jfe = map.junction_at_arc_end(a);
        if (jfe >= 0) {
            const auto& js = net.junctions[jfe];
            Eigen::Index slot = 0;
            while (net.arc_index(js.incoming[slot]) != a) ++slot;
            F(N) = jin[jfe](slot);
        } else {
            auto g = bc.arc_ghost(a, true, t);
            F(N) = g.closed ? 0.0 : godunov_flux(fd, r(N - 1), g.density);
            if (rec) rec->boundary[{a, 1}] = F(N);
        }

        next.rho[a] = r - lam * (F.tail(N) - F.head(N));
    }
    return next;
}

} // namespace mpt
