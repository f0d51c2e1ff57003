#ifndef MPT_RIEMANN_HPP
#define MPT_RIEMANN_HPP

#include "mpt/fundamental.hpp"

namespace mpt {

/// Entropy solution of the Riemann problem rho(x,0) = rho_L for x<0, rho_R for
/// x>0, evaluated at the self-similar coordinate xi = x/t.
///
/// For a strictly concave flux: rho_L < rho_R gives a shock travelling at the
/// Rankine-Hugoniot speed (f(rho_R)-f(rho_L))/(rho_R-rho_L); rho_L > rho_R
/// gives a rarefaction fan rho = (f')^{-1}(xi) between the characteristic
/// speeds f'(rho_L) and f'(rho_R).  The parabola inverts in closed form;
/// other diagrams fall back to bisection on the (decreasing) derivative.
double riemann_exact(const FundamentalDiagram& d, double rho_L, double rho_R,
                     double xi);

} // namespace mpt

#endif
