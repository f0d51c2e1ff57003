#include "mpt/fundamental.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mpt {

namespace {

constexpr double kClampTol = 1e-12;

double golden_section_max(const std::function<double(double)>& h, double a, double b,
                          double tol) {
    // Maximize a strictly unimodal h on [a, b].
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double hc = h(c), hd = h(d);
    while (b - a > tol) {
        if (hc > hd) {
            b = d; d = c; hd = hc;
            c = b - invphi * (b - a);
            hc = h(c);
        } else {
            a = c; c = d; hc = hd;
            d = a + invphi * (b - a);
            hd = h(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

FundamentalDiagram::FundamentalDiagram(double rho_max) : rho_max_(rho_max) {
    if (!(rho_max > 0.0))
        throw std::invalid_argument("FundamentalDiagram: rho_max must be positive");
}

double FundamentalDiagram::flux(double rho) const {
    if (rho < 0.0) {
        if (rho < -kClampTol)
            throw std::domain_error("flux: density " + std::to_string(rho) +
                                    " below 0");
        rho = 0.0;
    } else if (rho > rho_max_) {
        if (rho > rho_max_ + kClampTol)
            throw std::domain_error("flux: density " + std::to_string(rho) +
                                    " above rho_max=" + std::to_string(rho_max_));
        rho = rho_max_;
    }
    return flux_impl(rho);
}

Eigen::ArrayXd FundamentalDiagram::flux(const Eigen::ArrayXd& rho) const {
    return rho.unaryExpr([this](double r) { return flux(r); });
}

void FundamentalDiagram::finalize(double sigma, double max_char_speed) {
    if (sigma >= 0.0) {
        sigma_ = sigma;
    } else {
        sigma_ = golden_section_max([this](double r) { return flux_impl(r); }, 0.0,
                                    rho_max_, 1e-12 * rho_max_);
    }
    flux_max_ = flux_impl(sigma_);

    if (!(sigma_ > 0.0) || !(sigma_ < rho_max_) || !(flux_max_ > 0.0))
        throw std::invalid_argument(
            "FundamentalDiagram: no interior flux maximum (diagram not concave?)");

    // Sampled concavity check: midpoints must lie above chords.
    const int S = 256;
    for (int i = 1; i + 1 < S; ++i) {
        double r1 = rho_max_ * (i - 1) / (S - 1);
        double r2 = rho_max_ * i / (S - 1);
        double r3 = rho_max_ * (i + 1) / (S - 1);
        double chord = 0.5 * (flux_impl(r1) + flux_impl(r3));
        if (flux_impl(r2) < chord - 1e-10 * std::max(1.0, flux_max_))
            throw std::invalid_argument("FundamentalDiagram: concavity violated near rho=" +
                                        std::to_string(r2));
    }

    if (max_char_speed >= 0.0) {
        max_char_speed_ = max_char_speed;
    } else {
        // For a concave flux |f'| peaks at an endpoint; sample densely anyway.
        const int N = 4096;
        double m = 0.0;
        for (int i = 0; i + 1 <= N; ++i) {
            double a = rho_max_ * i / N;
            double b = rho_max_ * std::min(i + 1, N) / N;
            m = std::max(m, std::abs(flux_impl(b) - flux_impl(a)) / (b - a));
        }
        max_char_speed_ = m;
    }
}

ParabolicDiagram::ParabolicDiagram(double rho_max) : FundamentalDiagram(rho_max) {
    // f(r) = r (1 - r/rho_max): vertex at rho_max/2, f' = 1 - 2 r/rho_max.
    finalize(rho_max_ / 2.0, 1.0);
}

double ParabolicDiagram::flux_impl(double rho) const {
    return rho * (1.0 - rho / rho_max_);
}

std::string ParabolicDiagram::describe() const {
    std::ostringstream os;
    os << "parabola(rho_max=" << rho_max_ << ")";
    return os.str();
}

TabulatedDiagram::TabulatedDiagram(std::vector<double> rho, std::vector<double> f)
    : FundamentalDiagram(rho.empty() ? 1.0 : rho.back()),
      rho_(std::move(rho)),
      f_(std::move(f)) {
    if (rho_.size() != f_.size() || rho_.size() < 3)
        throw std::invalid_argument("TabulatedDiagram: need >= 3 matching samples");
    if (rho_.front() != 0.0 || std::abs(f_.front()) > 0.0 || std::abs(f_.back()) > 0.0)
        throw std::invalid_argument(
            "TabulatedDiagram: table must run from (0,0) to (rho_max,0)");
    for (std::size_t i = 1; i < rho_.size(); ++i)
        if (!(rho_[i] > rho_[i - 1]))
            throw std::invalid_argument("TabulatedDiagram: abscissae not increasing");
    // sigma sits exactly at the node with maximal f for a PL concave table.
    std::size_t arg = 0;
    for (std::size_t i = 0; i < f_.size(); ++i)
        if (f_[i] > f_[arg]) arg = i;
    double speed = 0.0;
    for (std::size_t i = 1; i < rho_.size(); ++i)
        speed = std::max(speed,
                         std::abs(f_[i] - f_[i - 1]) / (rho_[i] - rho_[i - 1]));
    finalize(rho_[arg], speed);
}

double TabulatedDiagram::flux_impl(double rho) const {
    auto it = std::upper_bound(rho_.begin(), rho_.end(), rho);
    std::size_t hi = std::min<std::size_t>(it - rho_.begin(), rho_.size() - 1);
    if (hi == 0) hi = 1;
    std::size_t lo = hi - 1;
    double w = (rho - rho_[lo]) / (rho_[hi] - rho_[lo]);
    return (1.0 - w) * f_[lo] + w * f_[hi];
}

std::string TabulatedDiagram::describe() const {
    std::ostringstream os;
    os << "table(" << rho_.size() << " nodes, rho_max=" << rho_max_ << ")";
    return os.str();
}

CustomDiagram::CustomDiagram(std::function<double(double)> f, double rho_max,
                             std::string label)
    : FundamentalDiagram(rho_max), f_(std::move(f)), label_(std::move(label)) {
    finalize();
}

double CustomDiagram::flux_impl(double rho) const { return f_(rho); }

std::string CustomDiagram::describe() const { return label_; }

double godunov_flux(const FundamentalDiagram& d, double rho_minus, double rho_plus) {
    double u = rho_minus, w = rho_plus;
    // Route through flux() for domain validation / clamping of both arguments.
    double fu = d.flux(u), fw = d.flux(w);
    if (u <= w) return std::min(fu, fw);
    double s = d.sigma();
    if (u < s) return fu;          // w < u < sigma
    if (w > s) return fw;          // sigma < w < u
    return d.flux_max();           // w <= sigma <= u
}

std::shared_ptr<const FundamentalDiagram> make_parabola(double rho_max) {
    return std::make_shared<ParabolicDiagram>(rho_max);
}

} // namespace mpt
