#include "cvfp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cvfp/error.hpp"
#include "cvfp/quadrature.hpp"

namespace cvfp {

WeightParams::WeightParams(double alpha_, int dim_) : alpha(alpha_), dim(dim_) {
    require(dim >= 1 && dim <= kMaxDim, ErrorKind::InvalidArgument, "dimension must be 1..3");
    require(alpha > std::max(dim, 2), ErrorKind::ConstraintViolation,
            "weight exponent alpha=" + std::to_string(alpha) + " must exceed max(d, 2)=" +
                std::to_string(std::max(dim, 2)));
}

WeightParams WeightParams::with_default_alpha(int dim) {
    return WeightParams(static_cast<double>(std::max(dim, 2) + 1), dim);
}

double weight_value(double alpha, double speed_squared) noexcept {
    return std::pow(1.0 + speed_squared, 0.5 * alpha);
}

WeightValue weight_eval(const WeightParams& params, const Vec& u) {
    const double a = params.alpha;
    const double q = 1.0 + norm2(u);
    WeightValue w;
    w.value = std::pow(q, 0.5 * a);
    w.gradient = u * (a * w.value / q);
    w.laplacian = a * params.dim * w.value / q + a * (a - 2.0) * w.value * norm2(u) / (q * q);
    return w;
}

double grad_sqrt_weight_norm(const WeightParams& params, const Vec& u) {
    const double a = params.alpha;
    return 0.5 * a * norm(u) * std::pow(1.0 + norm2(u), 0.25 * a - 1.0);
}

double unit_sphere_area(int dim) noexcept {
    const double h = 0.5 * dim;
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double inverse_weight_integral(const WeightParams& params, double rel_tol) {
    const double a = params.alpha;
    return integrate_radial([a](double r) { return std::pow(1.0 + r * r, -0.5 * a); }, params.dim,
                            rel_tol);
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::tanh_sinh;
    const bool finite = std::isfinite(b);
    QuadratureResult prev{};
    bool have_prev = false;
    for (unsigned level : {4u, 6u, 8u, 10u, 12u, 15u}) {
        double err = 0.0;
        double v = 0.0;
        if (finite) {
            // tanh-sinh copes with integrable endpoint singularities
            tanh_sinh<double> ts(level);
            v = ts.integrate(f, a, b, 0.01 * rel_tol, &err);
        } else {
            v = gauss_kronrod<double, 61>::integrate(f, a, b, 2 * level, 0.01 * rel_tol, &err);
        }
        if (!std::isfinite(v)) break;
        if (have_prev) {
            const double scale = std::max(std::abs(v), std::numeric_limits<double>::min());
            if (std::abs(v - prev.value) <= rel_tol * scale && err <= rel_tol * scale)
                return {v, std::max(err, std::abs(v - prev.value))};
        }
        prev = {v, err};
        have_prev = true;
    }
    fail(ErrorKind::QuadratureNonConvergent,
         "adaptive quadrature did not stabilise to relative " + std::to_string(rel_tol));
}

double integrate_radial(const std::function<double(double)>& g, int dim, double rel_tol) {
    // [0, 1] directly, [1, inf) through r = 1/s so slow algebraic tails become
    // an integrable endpoint singularity at s = 0.
    const auto head = [&](double r) { return g(r) * std::pow(r, dim - 1); };
    const auto tail = [&](double s) {
        const double r = 1.0 / s;
        if (!std::isfinite(r)) return 0.0;
        const double gv = g(r);
        if (gv == 0.0 || std::isnan(gv)) return 0.0;
        // log form avoids inf * tiny once s^(-d-1) overflows
        return std::copysign(std::exp(std::log(std::abs(gv)) - (dim + 1) * std::log(s)), gv);
    };
    const double v = integrate_adaptive(head, 0.0, 1.0, rel_tol).value +
                     integrate_adaptive(tail, 0.0, 1.0, rel_tol).value;
    return unit_sphere_area(dim) * v;
}

}  // namespace cvfp
