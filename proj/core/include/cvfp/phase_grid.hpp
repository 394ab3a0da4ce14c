#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cvfp/maxwellian.hpp"

namespace cvfp {

/// Cell-centred grid on (0, L) x (-V, V). Velocity nodes are built in mirror
/// pairs so that u(mirror(j)) == -u(j) holds bitwise.
class PhaseGrid {
  public:
    PhaseGrid(double length, int nx, int nu, double vmax, double dt, double horizon);

    double length() const noexcept { return length_; }
    int nx() const noexcept { return nx_; }
    int nu() const noexcept { return nu_; }
    double vmax() const noexcept { return vmax_; }
    double horizon() const noexcept { return horizon_; }
    /// Number of time steps; the effective step horizon/steps never exceeds
    /// the requested dt.
    int steps() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }
    double dx() const noexcept { return length_ / nx_; }
    double du() const noexcept { return 2.0 * vmax_ / nu_; }
    double cell_area() const noexcept { return dx() * du(); }
    double x(int i) const noexcept { return (i + 0.5) * dx(); }
    double u(int j) const noexcept { return u_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& u_nodes() const noexcept { return u_; }
    int mirror(int j) const noexcept { return nu_ - 1 - j; }
    double time(int n) const noexcept { return n == steps_ ? horizon_ : n * dt_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * nu_; }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * nu_ + static_cast<std::size_t>(j);
    }

    /// Throws CFLViolated unless vmax * dt <= dx.
    void check_cfl() const;

  private:
    double length_, vmax_, horizon_, dt_;
    int nx_, nu_, steps_;
    std::vector<double> u_;
};

/// Smallest cutoff V (to 1e-3 relative) with P(t, V) < rel * max P over
/// t in [0, horizon], for a 1D Gaussian-core Maxwellian.
double velocity_cutoff(const MaxwellianParams& envelope, double horizon, double rel = 1e-10);

/// rho[i, j] at (x_i, u_j), stored row-major in x.
struct DensityField {
    int nx = 0;
    int nu = 0;
    double time = 0.0;
    std::vector<double> values;

    DensityField() = default;
    explicit DensityField(const PhaseGrid& g, double t = 0.0)
        : nx(g.nx()), nu(g.nu()), time(t), values(g.size(), 0.0) {}

    double& at(int i, int j) noexcept { return values[static_cast<std::size_t>(i) * nu + j]; }
    double at(int i, int j) const noexcept { return values[static_cast<std::size_t>(i) * nu + j]; }
    double mass(const PhaseGrid& g) const noexcept;
    double max() const noexcept;
    double min() const noexcept;
};

template <class F>
DensityField sample_field(const PhaseGrid& g, F&& f, double t = 0.0) {
    DensityField out(g, t);
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.nu(); ++j) out.at(i, j) = f(g.x(i), g.u(j));
    return out;
}

enum Wall : int { kLeftWall = 0, kRightWall = 1 };

/// Outward normal of a wall in d = 1.
inline double wall_normal(int wall) noexcept { return wall == kLeftWall ? -1.0 : 1.0; }

/// Wall traces at one time level. gamma_plus is nonzero only on outgoing
/// nodes (u n > 0), gamma_minus only on incoming nodes.
struct TraceField {
    double time = 0.0;
    std::array<std::vector<double>, 2> gamma_plus;
    std::array<std::vector<double>, 2> gamma_minus;

    double gamma(int wall, int j) const noexcept {
        return gamma_plus[wall][static_cast<std::size_t>(j)] +
               gamma_minus[wall][static_cast<std::size_t>(j)];
    }
};

struct TraceFunctionals {
    double abs_flux = 0.0;     ///< integral of |u| gamma du
    double mass = 0.0;         ///< integral of gamma du
    double normal_flux = 0.0;  ///< integral of (u n) gamma du
};

/// Integral functionals of a wall trace; normal_flux is summed over mirror
/// pairs so an even trace gives exactly zero.
TraceFunctionals trace_functionals(const PhaseGrid& g, const TraceField& tr, int wall);

}  // namespace cvfp
