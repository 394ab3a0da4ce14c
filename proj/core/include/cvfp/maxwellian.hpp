#pragma once

#include "cvfp/vec.hpp"
#include "cvfp/weights.hpp"

namespace cvfp {

/// Heat kernel G(v, u) = (2 pi v)^(-d/2) exp(-|u|^2 / (2 v)).
double heat_kernel(double variance, const Vec& u) noexcept;
double heat_kernel_1d(double variance, double u) noexcept;

/// Radial core of the initial profile: P0^(1/mu)(u) = kappa * G(s, u).
struct GaussianCore {
    double kappa = 1.0;
    double s = 1.0;
};

/// Maxwellian P(t, u) = exp(a t) m(t, u)^mu with m(t, u) = kappa G(sigma^2 t + s, u),
/// so that P(0, .) = P0 exactly.
struct MaxwellianParams {
    double a = 0.0;
    double mu = 1.0;
    GaussianCore core;
    double sigma = 1.0;
    int dim = 1;

    /// Checks 2 mu > 1, kappa, s, sigma > 0 and 1 <= dim <= 3.
    void validate() const;
};

double maxwellian_eval(const MaxwellianParams& p, double t, const Vec& u);
double maxwellian_eval_1d(const MaxwellianParams& p, double t, double u);

/// Largest value of P(t, .) (attained at u = 0).
double maxwellian_peak(const MaxwellianParams& p, double t);

/// Smallest admissible rate for a super-solution, mu in (0, 1):
/// a_min = mu B^2 / (2 sigma^2 (1 - mu)).
double super_solution_min_rate(double mu, double sigma, double b_norm);
/// Largest admissible rate for a sub-solution, mu > 1:
/// a_max = -mu B^2 / (2 sigma^2 (mu - 1)).
double sub_solution_max_rate(double mu, double sigma, double b_norm);
/// Dispatches on mu: super case for mu < 1, sub case for mu > 1.
double super_sub_threshold(double mu, double sigma, double b_norm);

/// L_B(P) = dP/dt + B . grad_u P - sigma^2/2 lap_u P from analytic derivatives
/// of the Gaussian core. The x-transport term vanishes since P is x-free.
double lB_apply(const MaxwellianParams& p, const Vec& drift, double t, const Vec& u);

struct MaxwellianMassBounds {
    double sup_weighted_l2 = 0.0;  ///< sup_t int (1+|u|) omega(u) P(t,u)^2 du
    double inf_mass = 0.0;         ///< inf_t int P(t,u) du
};

MaxwellianMassBounds maxwellian_mass_bounds(const MaxwellianParams& p, double horizon,
                                            const WeightParams& weight, int time_points = 101);

/// Super-solution envelope with exponent mu that dominates
/// amp * G(s0, u - v) for every |v| <= shift, using a wider variance
/// s_wide > s0 for the tail.
MaxwellianParams dominating_envelope(double amp, double s0, double shift, double s_wide,
                                     double mu, double a, double sigma, int dim);

/// Sub-solution envelope with exponent mu lying below amp * G(s0, u - v) for
/// every |v| <= shift, using s_narrow < s0.
MaxwellianParams dominated_envelope(double amp, double s0, double shift, double s_narrow,
                                    double mu, double a, double sigma, int dim);

}  // namespace cvfp
