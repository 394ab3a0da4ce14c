#pragma once

#include <functional>

namespace cvfp {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Tanh-sinh on finite [a, b], Gauss-Kronrod when b = +infinity. The estimate is
/// recomputed at increasing refinement depth and accepted once consecutive
/// results agree to rel_tol; otherwise QuadratureNonConvergent is thrown.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-6);

/// Integral over R^d of a radial function g(|u|).
double integrate_radial(const std::function<double(double)>& g, int dim, double rel_tol = 1e-6);

}  // namespace cvfp
