#ifndef MPT_FUNDAMENTAL_HPP
#define MPT_FUNDAMENTAL_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpt {

/// Flux law f(rho) relating vehicle density to flow rate.
///
/// Assumptions (checked at construction where possible): f(0) = f(rho_max) = 0,
/// f strictly concave on (0, rho_max) with a unique interior maximum at the
/// critical density sigma.  The critical density, the capacity f(sigma) and the
/// maximal characteristic speed sup|f'| are computed once and cached; instances
/// are immutable afterwards and safe to share across threads.
class FundamentalDiagram {
public:
    virtual ~FundamentalDiagram() = default;

    /// Flow rate at density rho.  rho must lie in [0, rho_max]; excursions
    /// smaller than 1e-12 (roundoff drift from explicit stepping) are clamped,
    /// anything larger throws std::domain_error.
    double flux(double rho) const;

    /// Elementwise flux over an array of densities.
    Eigen::ArrayXd flux(const Eigen::ArrayXd& rho) const;

    double rho_max() const { return rho_max_; }
    /// Critical density: the argmax of the flux.
    double sigma() const { return sigma_; }
    /// Capacity f(sigma).
    double flux_max() const { return flux_max_; }
    /// sup |f'| over (0, rho_max); bounds the speed of any wave.
    double max_char_speed() const { return max_char_speed_; }

    virtual std::string describe() const = 0;

protected:
    explicit FundamentalDiagram(double rho_max);

    /// Raw flux evaluation, called with rho already validated/clamped.
    virtual double flux_impl(double rho) const = 0;

    /// Derived classes call this once their flux_impl is functional.
    /// Closed-form values may be passed; negative arguments request a numeric
    /// fallback (golden-section search for sigma, dense sampling for sup|f'|).
    void finalize(double sigma = -1.0, double max_char_speed = -1.0);

    double rho_max_;
    double sigma_ = 0.0;
    double flux_max_ = 0.0;
    double max_char_speed_ = 0.0;
};

/// The concave parabola f(rho) = rho (1 - rho/rho_max).
/// sigma = rho_max/2, f(sigma) = rho_max/4, sup|f'| = 1.
class ParabolicDiagram final : public FundamentalDiagram {
public:
    explicit ParabolicDiagram(double rho_max = 1.0);
    std::string describe() const override;

protected:
    double flux_impl(double rho) const override;
};

/// Piecewise-linear concave diagram from tabulated (rho, f) samples.
/// The table must start at (0, 0), end at (rho_max, 0), have strictly
/// increasing abscissae and pass a discrete concavity check.  sup|f'| is the
/// largest segment slope in absolute value, which only approximates the
/// continuous sup when the underlying law has unbounded endpoint derivatives.
class TabulatedDiagram final : public FundamentalDiagram {
public:
    TabulatedDiagram(std::vector<double> rho, std::vector<double> f);
    std::string describe() const override;

    const std::vector<double>& rho_nodes() const { return rho_; }
    const std::vector<double>& flux_nodes() const { return f_; }

protected:
    double flux_impl(double rho) const override;

private:
    std::vector<double> rho_, f_;
};

/// Diagram defined by an arbitrary callable; sigma is located by
/// golden-section search (tolerance 1e-12) and sup|f'| by dense central
/// differences.  Intended for experimentation; not serializable.
class CustomDiagram final : public FundamentalDiagram {
public:
    CustomDiagram(std::function<double(double)> f, double rho_max,
                  std::string label = "custom");
    std::string describe() const override;

protected:
    double flux_impl(double rho) const override;

private:
    std::function<double(double)> f_;
    std::string label_;
};

/// Godunov numerical flux across an interface with upstream density rho_minus
/// and downstream density rho_plus.  Four-branch form for a concave flux:
///
///   g(u, w) = min(f(u), f(w))   if u <= w,
///             f(u)              if w < u < sigma,
///             f(sigma)          if w <= sigma <= u,
///             f(w)              if sigma < w < u.
///
/// Equals min(demand(u), supply(w)); that identity is exercised by the test
/// suite rather than used as the implementation.
double godunov_flux(const FundamentalDiagram& d, double rho_minus, double rho_plus);

/// Result of a CFL admissibility check; margin = dx - factor * dt * sup|f'|
/// (factor 1 for the per-arc scheme, 2 for the multi-path scheme).
struct CflReport {
    bool pass = false;
    double margin = 0.0;   ///< slack in length units; >= 0 iff pass
    double dt_limit = 0.0; ///< largest admissible dt for this dx
};

std::shared_ptr<const FundamentalDiagram> make_parabola(double rho_max = 1.0);

} // namespace mpt

#endif
