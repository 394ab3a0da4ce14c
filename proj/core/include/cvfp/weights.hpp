#pragma once

#include "cvfp/vec.hpp"

namespace cvfp {

/// Velocity weight omega(u) = (1 + |u|^2)^(alpha/2), alpha > max(d, 2).
struct WeightParams {
    double alpha = 3.0;
    int dim = 1;

    WeightParams() = default;
    WeightParams(double alpha_, int dim_);

    /// max(d, 2) + 1.
    static WeightParams with_default_alpha(int dim);
};

struct WeightValue {
    double value = 0.0;
    Vec gradient;
    double laplacian = 0.0;
};

WeightValue weight_eval(const WeightParams& params, const Vec& u);

/// Scalar weight for a single velocity component (d = 1 grids).
double weight_value(double alpha, double speed_squared) noexcept;

/// |grad sqrt(omega)(u)| in closed form.
double grad_sqrt_weight_norm(const WeightParams& params, const Vec& u);

/// Integral of 1/omega over R^d by adaptive radial quadrature. Throws
/// QuadratureNonConvergent unless successively refined estimates agree to
/// rel_tol.
double inverse_weight_integral(const WeightParams& params, double rel_tol = 1e-6);

/// Surface measure of the unit sphere S^{d-1} (2 for d = 1).
double unit_sphere_area(int dim) noexcept;

}  // namespace cvfp
