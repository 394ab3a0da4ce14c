#include "cvfp/maxwellian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cvfp/error.hpp"
#include "cvfp/quadrature.hpp"

namespace cvfp {

namespace {

// log of exp(a t) (kappa G(v, r))^mu for radius r.
double log_maxwellian(const MaxwellianParams& p, double t, double r2) {
    const double v = p.sigma * p.sigma * t + p.core.s;
    const double log_m = std::log(p.core.kappa) - 0.5 * p.dim * std::log(2.0 * std::numbers::pi * v) -
                         0.5 * r2 / v;
    return p.a * t + p.mu * log_m;
}

}  // namespace

double heat_kernel(double variance, const Vec& u) noexcept {
    return std::pow(2.0 * std::numbers::pi * variance, -0.5 * u.dim()) *
           std::exp(-0.5 * norm2(u) / variance);
}

double heat_kernel_1d(double variance, double u) noexcept {
    return std::exp(-0.5 * u * u / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

void MaxwellianParams::validate() const {
    require(dim >= 1 && dim <= kMaxDim, ErrorKind::InvalidArgument, "dimension must be 1..3");
    require(2.0 * mu > 1.0, ErrorKind::InvalidExponent,
            "Maxwellian exponent requires 2 mu > 1, got mu=" + std::to_string(mu));
    require(core.kappa > 0.0 && core.s > 0.0 && sigma > 0.0, ErrorKind::InvalidArgument,
            "Maxwellian requires kappa, s, sigma > 0");
    require(std::isfinite(a), ErrorKind::InvalidArgument, "Maxwellian rate must be finite");
}

double maxwellian_eval(const MaxwellianParams& p, double t, const Vec& u) {
    require(t >= 0.0, ErrorKind::InvalidArgument, "Maxwellian evaluated at negative time");
    return std::exp(log_maxwellian(p, t, norm2(u)));
}

double maxwellian_eval_1d(const MaxwellianParams& p, double t, double u) {
    require(t >= 0.0, ErrorKind::InvalidArgument, "Maxwellian evaluated at negative time");
    return std::exp(log_maxwellian(p, t, u * u));
}

double maxwellian_peak(const MaxwellianParams& p, double t) { return std::exp(log_maxwellian(p, t, 0.0)); }

double super_solution_min_rate(double mu, double sigma, double b_norm) {
    require(mu > 0.0 && mu < 1.0, ErrorKind::InvalidExponent,
            "super-solution exponent must lie in (0, 1), got mu=" + std::to_string(mu));
    require(sigma > 0.0 && b_norm >= 0.0, ErrorKind::InvalidArgument, "need sigma > 0, B >= 0");
    return mu * b_norm * b_norm / (2.0 * sigma * sigma * (1.0 - mu));
}

double sub_solution_max_rate(double mu, double sigma, double b_norm) {
    require(mu > 1.0, ErrorKind::InvalidExponent,
            "sub-solution exponent must exceed 1, got mu=" + std::to_string(mu));
    require(sigma > 0.0 && b_norm >= 0.0, ErrorKind::InvalidArgument, "need sigma > 0, B >= 0");
    return -mu * b_norm * b_norm / (2.0 * sigma * sigma * (mu - 1.0));
}

double super_sub_threshold(double mu, double sigma, double b_norm) {
    require(mu > 0.0 && mu != 1.0, ErrorKind::InvalidExponent,
            "exponent mu=" + std::to_string(mu) + " admits neither envelope");
    return mu < 1.0 ? super_solution_min_rate(mu, sigma, b_norm)
                    : sub_solution_max_rate(mu, sigma, b_norm);
}

double lB_apply(const MaxwellianParams& p, const Vec& drift, double t, const Vec& u) {
    require(t > 0.0, ErrorKind::InvalidArgument, "L_B is evaluated for t > 0");
    const double s2 = p.sigma * p.sigma;
    const double v = s2 * t + p.core.s;
    const double u2 = norm2(u);
    const double val = std::exp(log_maxwellian(p, t, u2));

    // Logarithmic derivatives of the Gaussian core m.
    const double dm_dt = s2 * (-0.5 * p.dim / v + 0.5 * u2 / (v * v));  // (dm/dt)/m
    const double lap_m = u2 / (v * v) - p.dim / v;                        // (lap m)/m
    const double grad2_m = u2 / (v * v);                                  // |grad m|^2/m^2
    const double b_dot_grad = -dot(drift, u) / v;                         // (B.grad m)/m

    const double dt_p = p.a + p.mu * dm_dt;
    const double lap_p = p.mu * (lap_m + (p.mu - 1.0) * grad2_m);
    return val * (dt_p + p.mu * b_dot_grad - 0.5 * s2 * lap_p);
}

MaxwellianMassBounds maxwellian_mass_bounds(const MaxwellianParams& p, double horizon,
                                            const WeightParams& weight, int time_points) {
    p.validate();
    require(horizon >= 0.0 && time_points >= 2, ErrorKind::InvalidArgument,
            "mass bounds need T >= 0 and at least two time points");
    MaxwellianMassBounds out;
    out.inf_mass = std::numeric_limits<double>::infinity();
    for (int k = 0; k < time_points; ++k) {
        const double t = horizon * k / (time_points - 1);
        const double l2 = integrate_radial(
            [&](double r) {
                return (1.0 + r) * weight_value(weight.alpha, r * r) *
                       std::exp(2.0 * log_maxwellian(p, t, r * r));
            },
            p.dim);
        const double mass =
            integrate_radial([&](double r) { return std::exp(log_maxwellian(p, t, r * r)); }, p.dim);
        out.sup_weighted_l2 = std::max(out.sup_weighted_l2, l2);
        out.inf_mass = std::min(out.inf_mass, mass);
    }
    return out;
}

MaxwellianParams dominating_envelope(double amp, double s0, double shift, double s_wide,
                                     double mu, double a, double sigma, int dim) {
    require(s_wide > s0 && s0 > 0.0 && amp > 0.0, ErrorKind::InvalidArgument,
            "dominating envelope needs s_wide > s0 > 0 and amp > 0");
    // amp G(s0, u - v) <= amp (2 pi s0)^(-d/2) exp(|v|^2 / (2 (s_wide - s0))) exp(-|u|^2 / (2 s_wide)).
    MaxwellianParams p;
    p.a = a;
    p.mu = mu;
    p.sigma = sigma;
    p.dim = dim;
    p.core.s = mu * s_wide;
    const double coeff = std::log(amp) - 0.5 * dim * std::log(2.0 * std::numbers::pi * s0) +
                         0.5 * shift * shift / (s_wide - s0);
    p.core.kappa = std::exp(coeff / mu + 0.5 * dim * std::log(2.0 * std::numbers::pi * p.core.s));
    p.validate();
    return p;
}

MaxwellianParams dominated_envelope(double amp, double s0, double shift, double s_narrow,
                                    double mu, double a, double sigma, int dim) {
    require(s_narrow < s0 && s_narrow > 0.0 && amp > 0.0, ErrorKind::InvalidArgument,
            "dominated envelope needs 0 < s_narrow < s0 and amp > 0");
    MaxwellianParams p;
    p.a = a;
    p.mu = mu;
    p.sigma = sigma;
    p.dim = dim;
    p.core.s = mu * s_narrow;
    const double coeff = std::log(amp) - 0.5 * dim * std::log(2.0 * std::numbers::pi * s0) -
                         0.5 * shift * shift / (s0 - s_narrow);
    p.core.kappa = std::exp(coeff / mu + 0.5 * dim * std::log(2.0 * std::numbers::pi * p.core.s));
    p.validate();
    return p;
}

}  // namespace cvfp
