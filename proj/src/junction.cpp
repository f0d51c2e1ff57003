#include "mpt/junction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mpt {

namespace {

struct ConstraintSet {
    Eigen::MatrixXd C; // rows: constraint normals
    Eigen::VectorXd c; // right-hand sides, C gamma <= c
};

ConstraintSet build_constraints(const Eigen::VectorXd& d, const Eigen::VectorXd& s,
                                const Eigen::MatrixXd& A) {
    const Eigen::Index n = d.size(), m = s.size();
    ConstraintSet cs;
    cs.C.resize(2 * n + m, n);
    cs.c.resize(2 * n + m);
    cs.C.topRows(n) = -Eigen::MatrixXd::Identity(n, n); // gamma >= 0
    cs.c.head(n).setZero();
    cs.C.middleRows(n, n) = Eigen::MatrixXd::Identity(n, n); // gamma <= d
    cs.c.segment(n, n) = d;
    cs.C.bottomRows(m) = A; // A gamma <= s
    cs.c.tail(m) = s;
    return cs;
}

bool feasible(const ConstraintSet& cs, const Eigen::VectorXd& g, double tol) {
    return ((cs.C * g - cs.c).array() <= tol).all();
}

/// All polytope vertices by exhaustive intersection of constraint n-subsets.
/// Dimension is at most 3, so at most C(9,3) = 84 linear systems.
std::vector<Eigen::VectorXd> enumerate_vertices(const ConstraintSet& cs, double tol) {
    const Eigen::Index n = cs.C.cols(), R = cs.C.rows();
    std::vector<Eigen::VectorXd> verts;
    std::vector<Eigen::Index> idx(n);
    // Iterate over increasing index combinations.
    auto recurse = [&](auto&& self, Eigen::Index depth, Eigen::Index first) -> void {
        if (depth == n) {
            Eigen::MatrixXd B(n, n);
            Eigen::VectorXd b(n);
            for (Eigen::Index r = 0; r < n; ++r) {
                B.row(r) = cs.C.row(idx[r]);
                b(r) = cs.c(idx[r]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
            if (!lu.isInvertible()) return;
            Eigen::VectorXd g = lu.solve(b);
            if (feasible(cs, g, tol)) verts.push_back(g);
            return;
        }
        for (Eigen::Index i = first; i <= R - (n - depth); ++i) {
            idx[depth] = i;
            self(self, depth + 1, i + 1);
        }
    };
    recurse(recurse, 0, 0);
    return verts;
}

} // namespace

JunctionFluxSolution solve_junction(const Eigen::VectorXd& demands,
                                    const Eigen::VectorXd& supplies,
                                    const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& q_in) {
    const Eigen::Index n = demands.size(), m = supplies.size();
    if (n == 0 || m == 0)
        throw std::invalid_argument("solve_junction: empty demand or supply vector");
    if (A.rows() != m || A.cols() != n)
        throw std::invalid_argument("solve_junction: preference matrix shape mismatch");

    Eigen::VectorXd q = q_in;
    if (q.size() == 0 && n == 1) q = Eigen::VectorXd::Ones(1);
    if (q.size() != n)
        throw std::invalid_argument("solve_junction: priority vector length mismatch");
    if ((q.array() < -1e-12).any() || std::abs(q.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("solve_junction: priorities must be a probability vector");
    if ((demands.array() < -1e-12).any() || (supplies.array() < -1e-12).any())
        throw std::invalid_argument("solve_junction: negative demand or supply");

    const Eigen::VectorXd d = demands.cwiseMax(0.0);
    const Eigen::VectorXd s = supplies.cwiseMax(0.0);
    const double scale = std::max({1.0, d.maxCoeff(), s.maxCoeff()});
    const double tol = 1e-12 * scale;

    ConstraintSet cs = build_constraints(d, s, A);
    auto verts = enumerate_vertices(cs, tol);
    if (verts.empty())
        throw std::runtime_error("solve_junction: feasible set empty (should contain 0)");

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : verts) best = std::max(best, v.sum());

    // Distinct optimal vertices (enumeration visits degenerate corners many times).
    std::vector<Eigen::VectorXd> opt;
    for (const auto& v : verts) {
        if (v.sum() < best - tol) continue;
        bool dup = false;
        for (const auto& o : opt)
            if ((o - v).cwiseAbs().maxCoeff() <= 1e-10 * scale) { dup = true; break; }
        if (!dup) opt.push_back(v);
    }

    JunctionFluxSolution sol;
    sol.unique = opt.size() == 1;

    if (sol.unique) {
        sol.gamma_in = opt.front().cwiseMax(0.0).cwiseMin(d);
    } else {
        // Saturate-and-redistribute cascade along the priority direction.
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        std::vector<bool> frozen(n, false);
        for (Eigen::Index round = 0; round < n; ++round) {
            Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
            double qs = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (!frozen[i]) qs += std::max(q(i), 0.0);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (frozen[i]) continue;
                dir(i) = qs > 0.0 ? std::max(q(i), 0.0) / qs
                                  : 1.0; // all remaining priorities zero: spread evenly
            }
            if (qs <= 0.0) {
                double cnt = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) cnt += frozen[i] ? 0.0 : 1.0;
                if (cnt == 0.0) break;
                for (Eigen::Index i = 0; i < n; ++i)
                    if (!frozen[i]) dir(i) = 1.0 / cnt;
            }
            if (dir.isZero(0.0)) break;

            // Largest step along dir before a demand bound or supply row blocks.
            double step = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i)
                if (dir(i) > 0.0) step = std::min(step, (d(i) - g(i)) / dir(i));
            Eigen::VectorXd Adir = A * dir, slack = s - A * g;
            for (Eigen::Index j = 0; j < m; ++j)
                if (Adir(j) > tol) step = std::min(step, slack(j) / Adir(j));
            if (!(step > 0.0) || !std::isfinite(step)) break;
            g += step * dir;

            bool saturated_some = false;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!frozen[i] && g(i) >= d(i) - tol) {
                    g(i) = d(i);
                    frozen[i] = true;
                    saturated_some = true;
                }
            }
            if (g.sum() >= best - tol) break;
            if (!saturated_some) break; // blocked by a supply row short of the optimum
        }

        if (g.sum() >= best - tol) {
            sol.gamma_in = g;
        } else {
            // Cascade stopped below the optimum: fall back to the optimal vertex
            // nearest to the ideal priority point q*T.
            Eigen::VectorXd ideal = best * q;
            std::size_t pick = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < opt.size(); ++i) {
                double dist = (opt[i] - ideal).norm();
                if (dist < bd - tol ||
                    (std::abs(dist - bd) <= tol &&
                     std::lexicographical_compare(opt[i].data(), opt[i].data() + n,
                                                  opt[pick].data(), opt[pick].data() + n))) {
                    bd = dist;
                    pick = i;
                }
            }
            sol.gamma_in = opt[pick];
        }
        sol.gamma_in = sol.gamma_in.cwiseMax(0.0).cwiseMin(d);
    }

    sol.gamma_out = A * sol.gamma_in;
    sol.total = sol.gamma_in.sum();
    return sol;
}

} // namespace mpt
