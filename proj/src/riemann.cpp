#include "mpt/riemann.hpp"

#include <cmath>
#include <stdexcept>

namespace mpt {

namespace {

double derivative(const FundamentalDiagram& d, double rho) {
    const double h = 1e-7 * d.rho_max();
    double a = std::max(0.0, rho - h), b = std::min(d.rho_max(), rho + h);
    return (d.flux(b) - d.flux(a)) / (b - a);
}

/// Solve f'(rho) = xi for rho in [lo, hi]; f' is decreasing for concave f.
double invert_derivative(const FundamentalDiagram& d, double xi, double lo, double hi) {
    if (const auto* par = dynamic_cast<const ParabolicDiagram*>(&d)) {
        // f' = 1 - 2 rho / rho_max  =>  rho = rho_max (1 - xi) / 2
        return par->rho_max() * (1.0 - xi) / 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (derivative(d, mid) > xi)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double riemann_exact(const FundamentalDiagram& d, double rho_L, double rho_R,
                     double xi) {
    auto in_domain = [&](double r) { return r >= -1e-12 && r <= d.rho_max() + 1e-12; };
    if (!in_domain(rho_L) || !in_domain(rho_R))
        throw std::domain_error("riemann_exact: state outside [0, rho_max]");

    if (rho_L == rho_R) return rho_L;

    if (rho_L < rho_R) {
        // Characteristics converge: entropic shock.
        double s = (d.flux(rho_R) - d.flux(rho_L)) / (rho_R - rho_L);
        return xi < s ? rho_L : rho_R;
    }

    // rho_L > rho_R: rarefaction between f'(rho_L) and f'(rho_R).
    double xiL = derivative(d, rho_L);
    double xiR = derivative(d, rho_R);
    if (xi <= xiL) return rho_L;
    if (xi >= xiR) return rho_R;
    return invert_derivative(d, xi, rho_R, rho_L);
}

} // namespace mpt
