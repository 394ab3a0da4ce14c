#include "cvfp/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvfp/error.hpp"

namespace cvfp {

PhaseGrid::PhaseGrid(double length, int nx, int nu, double vmax, double dt, double horizon)
    : length_(length), vmax_(vmax), horizon_(horizon), dt_(dt), nx_(nx), nu_(nu), steps_(0) {
    require(length > 0.0 && std::isfinite(length), ErrorKind::ConstraintViolation,
            "grid length must be positive");
    require(nx >= 8 && nu >= 8, ErrorKind::ConstraintViolation, "grid needs nx, nu >= 8");
    require(nu % 2 == 0, ErrorKind::ConstraintViolation, "nu must be even (mirror-paired nodes)");
    require(vmax > 0.0 && std::isfinite(vmax), ErrorKind::ConstraintViolation,
            "vmax must be positive");
    require(dt > 0.0 && std::isfinite(dt), ErrorKind::ConstraintViolation, "dt must be positive");
    require(horizon >= 0.0 && std::isfinite(horizon), ErrorKind::ConstraintViolation,
            "horizon must be nonnegative");
    if (horizon > 0.0) {
        steps_ = static_cast<int>(std::ceil(horizon / dt - 1e-9));
        steps_ = std::max(steps_, 1);
        dt_ = horizon / steps_;
    }
    u_.resize(static_cast<std::size_t>(nu));
    const double du = 2.0 * vmax / nu;
    for (int j = 0; j < nu / 2; ++j) {
        u_[static_cast<std::size_t>(j)] = -vmax + (j + 0.5) * du;
        u_[static_cast<std::size_t>(nu - 1 - j)] = -u_[static_cast<std::size_t>(j)];
    }
}

void PhaseGrid::check_cfl() const {
    if (steps_ > 0 && vmax_ * dt_ > dx() * (1.0 + 1e-12))
        fail(ErrorKind::CFLViolated, "vmax * dt = " + std::to_string(vmax_ * dt_) +
                                         " exceeds dx = " + std::to_string(dx()));
}

double velocity_cutoff(const MaxwellianParams& envelope, double horizon, double rel) {
    envelope.validate();
    require(rel > 0.0 && rel < 1.0, ErrorKind::InvalidArgument, "rel must lie in (0, 1)");
    constexpr int kTimes = 201;
    const auto sup_over_time = [&](double v) {
        double m = 0.0;
        for (int k = 0; k < kTimes; ++k) {
            const double t = horizon * k / (kTimes - 1);
            m = std::max(m, maxwellian_eval_1d(envelope, t, v));
        }
        return m;
    };
    const double peak = sup_over_time(0.0);
    const double target = rel * peak;
    double lo = 0.0;
    double hi = std::sqrt(envelope.core.s + envelope.sigma * envelope.sigma * horizon);
    while (sup_over_time(hi) >= target) hi *= 2.0;
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        (sup_over_time(mid) < target ? hi : lo) = mid;
    }
    return hi;
}

double DensityField::mass(const PhaseGrid& g) const noexcept {
    double s = 0.0;
    for (double v : values) s += v;
    return s * g.cell_area();
}

double DensityField::max() const noexcept {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double DensityField::min() const noexcept {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

TraceFunctionals trace_functionals(const PhaseGrid& g, const TraceField& tr, int wall) {
    TraceFunctionals out;
    const double n = wall_normal(wall);
    const double du = g.du();
    for (int j = 0; j < g.nu() / 2; ++j) {
        const int jm = g.mirror(j);
        const double a = tr.gamma(wall, j), b = tr.gamma(wall, jm);
        const double ua = g.u(j), ub = g.u(jm);
        out.abs_flux += (std::abs(ua) * a + std::abs(ub) * b) * du;
        out.mass += (a + b) * du;
        out.normal_flux += (ua * n * a + ub * n * b) * du;
    }
    return out;
}

}  // namespace cvfp
