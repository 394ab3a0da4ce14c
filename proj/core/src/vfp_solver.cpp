#include "cvfp/vfp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvfp/error.hpp"
#include "cvfp/parallel.hpp"
#include "cvfp/weights.hpp"

namespace cvfp {

namespace {

constexpr std::size_t kRowBlock = 8;

// Conservative semi-Lagrangian flux through one interface for Courant
// number c in [0, 1]: third-order upwind-biased reconstruction, clipped to
// [0, upwind value] so every update stays nonnegative.
inline double pfc_flux(double c, double up, double down, double upup) noexcept {
    const double a = (1.0 - c) * (2.0 - c) / 6.0;
    const double b = (1.0 - c) * (1.0 + c) / 6.0;
    const double r = up + a * (down - up) + b * (up - upup);
    return std::clamp(c * r, 0.0, up);
}

enum class WallMode { Specular, Inflow };

class Stepper {
  public:
    Stepper(const PhaseGrid& g, double sign, WallMode mode, const InflowData* q, double sigma,
            const SolverOptions& opts, SolverStats& stats)
        : g_(g), sign_(sign), mode_(mode), q_(q), sigma_(sigma), opts_(opts), stats_(stats) {}

    // Advances f over tau; wall data are sampled at t_mid. Returns the mass
    // entering and leaving through the walls.
    void transport(std::vector<double>& f, double tau, double t_mid, double& in, double& out) {
        const int nx = g_.nx(), nu = g_.nu();
        const double dx = g_.dx();
        std::vector<double> next(f.size());
        std::vector<double> row_in(static_cast<std::size_t>(nu), 0.0);
        std::vector<double> row_out(static_cast<std::size_t>(nu), 0.0);
        const auto at = [&](int i, int j) { return f[g_.index(i, j)]; };
        parallel_blocks(static_cast<std::size_t>(nu), kRowBlock, opts_.threads,
                        [&](std::size_t, std::size_t jb, std::size_t je) {
            std::vector<double> ext(static_cast<std::size_t>(nx + 4));
            std::vector<double> flux(static_cast<std::size_t>(nx + 1));
            for (std::size_t jj = jb; jj < je; ++jj) {
                const int j = static_cast<int>(jj);
                const double v = sign_ * g_.u(j);
                const double c = std::abs(v) * tau / dx;
                double* e = ext.data() + 2;
                for (int i = 0; i < nx; ++i) e[i] = at(i, j);
                fill_ghosts(f, j, v, t_mid, e);
                if (v > 0.0) {
                    for (int i = 0; i <= nx; ++i) flux[i] = pfc_flux(c, e[i - 1], e[i], e[i - 2]);
                } else {
                    for (int i = 0; i <= nx; ++i) flux[i] = -pfc_flux(c, e[i], e[i - 1], e[i + 1]);
                }
                for (int i = 0; i < nx; ++i)
                    next[g_.index(i, j)] = e[i] + flux[i] - flux[i + 1];
                // flux[0] > 0 enters through the left wall, flux[nx] > 0 leaves on the right.
                row_in[jj] = std::max(flux[0], 0.0) + std::max(-flux[nx], 0.0);
                row_out[jj] = std::max(-flux[0], 0.0) + std::max(flux[nx], 0.0);
            }
        });
        f.swap(next);
        double sin = 0.0, sout = 0.0;
        for (int j = 0; j < nu; ++j) {
            sin += row_in[j];
            sout += row_out[j];
        }
        in = sin * dx * g_.du();
        out = sout * dx * g_.du();
        sanitize(f);
    }

    // Upwind flux form of d_t f + d_u (B f) = 0 with B constant per column
    // and zero flux through u = +-V.
    void drift(std::vector<double>& f, const std::vector<double>& b, double tau) {
        const int nu = g_.nu();
        const double du = g_.du();
        parallel_blocks(static_cast<std::size_t>(g_.nx()), kRowBlock, opts_.threads,
                        [&](std::size_t, std::size_t ib, std::size_t ie) {
            std::vector<double> face(static_cast<std::size_t>(nu + 1));
            for (std::size_t ii = ib; ii < ie; ++ii) {
                const double bi = b[ii];
                if (bi == 0.0) continue;
                double* col = f.data() + ii * static_cast<std::size_t>(nu);
                const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(bi) * tau / du)));
                const double lam = tau / sub / du;
                face[0] = face[static_cast<std::size_t>(nu)] = 0.0;
                for (int s = 0; s < sub; ++s) {
                    for (int k = 1; k < nu; ++k) face[k] = bi > 0.0 ? bi * col[k - 1] : bi * col[k];
                    for (int k = 0; k < nu; ++k) col[k] -= lam * (face[k + 1] - face[k]);
                }
            }
        });
        sanitize(f);
    }

    // Crank-Nicolson for d_t f = sigma^2/2 d_uu f with zero ghost values,
    // sub-stepped so the explicit half stays monotone.
    void diffuse(std::vector<double>& f, double tau) {
        if (sigma_ == 0.0) return;
        const int nu = g_.nu();
        const double du = g_.du();
        const double r = sigma_ * sigma_ * tau / (2.0 * du * du);
        const int sub = std::max(1, static_cast<int>(std::ceil(r)));
        const double c = 0.5 * r / sub;
        // Thomas factors for the constant tridiagonal (-c, 1 + 2c, -c).
        std::vector<double> cp(static_cast<std::size_t>(nu)), inv(static_cast<std::size_t>(nu));
        double piv = 1.0 + 2.0 * c;
        inv[0] = 1.0 / piv;
        cp[0] = -c * inv[0];
        for (int k = 1; k < nu; ++k) {
            piv = 1.0 + 2.0 * c + c * cp[k - 1];
            inv[k] = 1.0 / piv;
            cp[k] = -c * inv[k];
        }
        parallel_blocks(static_cast<std::size_t>(g_.nx()), kRowBlock, opts_.threads,
                        [&](std::size_t, std::size_t ib, std::size_t ie) {
            std::vector<double> rhs(static_cast<std::size_t>(nu));
            for (std::size_t ii = ib; ii < ie; ++ii) {
                double* col = f.data() + ii * static_cast<std::size_t>(nu);
                for (int s = 0; s < sub; ++s) {
                    for (int k = 0; k < nu; ++k) {
                        const double lo = k > 0 ? col[k - 1] : 0.0;
                        const double hi = k + 1 < nu ? col[k + 1] : 0.0;
                        rhs[k] = (1.0 - 2.0 * c) * col[k] + c * (lo + hi);
                    }
                    // forward sweep: y_k = (rhs_k + c y_{k-1}) / piv_k
                    col[0] = rhs[0] * inv[0];
                    for (int k = 1; k < nu; ++k) col[k] = (rhs[k] + c * col[k - 1]) * inv[k];
                    for (int k = nu - 2; k >= 0; --k) col[k] -= cp[k] * col[k + 1];
                }
            }
        });
        sanitize(f);
    }

  private:
    void fill_ghosts(const std::vector<double>& f, int j, double v, double t, double* e) const {
        const int nx = g_.nx();
        const auto at = [&](int i, int jj) { return f[g_.index(i, jj)]; };
        if (mode_ == WallMode::Specular) {
            const int jm = g_.mirror(j);
            e[-1] = at(0, jm);
            e[-2] = at(1, jm);
            e[nx] = at(nx - 1, jm);
            e[nx + 1] = at(nx - 2, jm);
            return;
        }
        const double u = g_.u(j);
        // Left wall: transport enters when v > 0.
        if (v > 0.0) {
            const double qv = (*q_)(t, kLeftWall, u);
            e[-1] = std::max(0.0, 2.0 * qv - e[0]);
            e[-2] = std::max(0.0, 4.0 * qv - 3.0 * e[0]);
        } else {
            e[-1] = std::max(0.0, 2.0 * e[0] - e[1]);
            e[-2] = std::max(0.0, 3.0 * e[0] - 2.0 * e[1]);
        }
        if (v < 0.0) {
            const double qv = (*q_)(t, kRightWall, u);
            e[nx] = std::max(0.0, 2.0 * qv - e[nx - 1]);
            e[nx + 1] = std::max(0.0, 4.0 * qv - 3.0 * e[nx - 1]);
        } else {
            e[nx] = std::max(0.0, 2.0 * e[nx - 1] - e[nx - 2]);
            e[nx + 1] = std::max(0.0, 3.0 * e[nx - 1] - 2.0 * e[nx - 2]);
        }
    }

    void sanitize(std::vector<double>& f) {
        double mx = 0.0, mn = 0.0;
        for (double v : f) {
            mx = std::max(mx, v);
            mn = std::min(mn, v);
        }
        stats_.min_value = std::min(stats_.min_value, mn);
        if (mn >= 0.0) return;
        if (mn < -1e-12 * std::max(1.0, mx))
            fail(ErrorKind::NegativeDensity, "value " + std::to_string(mn) + " below round-off level");
        for (double& v : f)
            if (v < 0.0) {
                stats_.clamped_total -= v;
                v = 0.0;
            }
    }

    const PhaseGrid& g_;
    double sign_;
    WallMode mode_;
    const InflowData* q_;
    double sigma_;
    SolverOptions opts_;
    SolverStats& stats_;
};

void check_field(const PhaseGrid& g, const DensityField& f, const char* what) {
    require(f.nx == g.nx() && f.nu == g.nu() && f.values.size() == g.size(),
            ErrorKind::InvalidArgument, std::string(what) + " does not match the grid");
    for (double v : f.values)
        require(v >= 0.0 && std::isfinite(v), ErrorKind::InvalidArgument,
                std::string(what) + " must be finite and nonnegative");
}

GridSolution run(const PhaseGrid& g, const DensityField& init, double sign, WallMode mode,
                 const InflowData* q, const DriftHistory* drift, double sigma,
                 const SolverOptions& opts) {
    g.check_cfl();
    require(sigma >= 0.0, ErrorKind::InvalidArgument, "sigma must be nonnegative");
    require(opts.trace_order == 0 || opts.trace_order == 1, ErrorKind::InvalidArgument,
            "trace_order must be 0 or 1");
    const int steps = g.steps();
    const bool has_drift = drift && !drift->empty();
    if (has_drift) {
        require(static_cast<int>(drift->size()) == steps + 1, ErrorKind::InvalidArgument,
                "drift history needs one entry per time level");
        for (const auto& lvl : *drift)
            require(static_cast<int>(lvl.size()) == g.nx(), ErrorKind::InvalidArgument,
                    "drift level needs one value per x-node");
    }

    GridSolution sol;
    Stepper stepper(g, sign, mode, q, sigma, opts, sol.stats);
    std::vector<double> f = init.values;
    DensityField level(g, 0.0);
    level.values = f;
    sol.history.reserve(static_cast<std::size_t>(steps) + 1);
    sol.traces.reserve(static_cast<std::size_t>(steps) + 1);
    sol.history.push_back(level);
    sol.traces.push_back(trace_extract(g, level, sign, opts.trace_order, q));
    sol.stats.mass.push_back(level.mass(g));
    sol.stats.mass_in.push_back(0.0);
    sol.stats.mass_out.push_back(0.0);

    std::vector<double> b_half(static_cast<std::size_t>(g.nx()));
    for (int n = 0; n < steps; ++n) {
        const double t0 = g.time(n), t1 = g.time(n + 1);
        const double tau = t1 - t0;
        double in1, out1, in2, out2;
        stepper.transport(f, 0.5 * tau, t0 + 0.25 * tau, in1, out1);
        if (has_drift) {
            for (int i = 0; i < g.nx(); ++i)
                b_half[i] = 0.5 * ((*drift)[n][i] + (*drift)[n + 1][i]);
            stepper.drift(f, b_half, tau);
        }
        stepper.diffuse(f, tau);
        stepper.transport(f, 0.5 * tau, t0 + 0.75 * tau, in2, out2);

        level.time = t1;
        level.values = f;
        const double m = level.mass(g);
        const double prev = sol.stats.mass.back();
        if (prev > 0.0)
            sol.stats.max_step_mass_change =
                std::max(sol.stats.max_step_mass_change, std::abs(m - prev) / prev);
        sol.stats.mass.push_back(m);
        sol.stats.mass_in.push_back(sol.stats.mass_in.back() + in1 + in2);
        sol.stats.mass_out.push_back(sol.stats.mass_out.back() + out1 + out2);
        sol.traces.push_back(trace_extract(g, level, sign, opts.trace_order, q));
        sol.history.push_back(level);
    }
    return sol;
}

// Trapezoid weights for time level n.
double trap_weight(const PhaseGrid& g, int n) {
    const int steps = g.steps();
    if (steps == 0) return 0.0;
    double w = 0.0;
    if (n > 0) w += 0.5 * (g.time(n) - g.time(n - 1));
    if (n < steps) w += 0.5 * (g.time(n + 1) - g.time(n));
    return w;
}

double l2_squared(const PhaseGrid& g, const DensityField& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return s * g.cell_area();
}

// sum over interface differences (zero ghosts) of w(face) ((f_k - f_{k-1}) / du)^2 dx du
template <class W>
double face_gradient_squared(const PhaseGrid& g, const DensityField& f, W&& weight_at_face) {
    const int nu = g.nu();
    const double du = g.du();
    std::vector<double> w(static_cast<std::size_t>(nu + 1));
    for (int k = 0; k <= nu; ++k) w[k] = weight_at_face(-g.vmax() + k * du);
    double s = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        for (int k = 0; k <= nu; ++k) {
            const double lo = k > 0 ? f.at(i, k - 1) : 0.0;
            const double hi = k < nu ? f.at(i, k) : 0.0;
            const double d = (hi - lo) / du;
            s += w[k] * d * d;
        }
    }
    return s * g.cell_area();
}

}  // namespace

TraceField trace_extract(const PhaseGrid& g, const DensityField& f, double sign, int trace_order,
                         const InflowData* inflow) {
    const int nx = g.nx(), nu = g.nu();
    TraceField tr;
    tr.time = f.time;
    for (int w = 0; w < 2; ++w) {
        tr.gamma_plus[w].assign(static_cast<std::size_t>(nu), 0.0);
        tr.gamma_minus[w].assign(static_cast<std::size_t>(nu), 0.0);
    }
    const auto extrapolate = [&](int wall, int j) {
        const double f0 = wall == kLeftWall ? f.at(0, j) : f.at(nx - 1, j);
        if (trace_order == 0) return f0;
        const double f1 = wall == kLeftWall ? f.at(1, j) : f.at(nx - 2, j);
        return std::max(0.0, 1.5 * f0 - 0.5 * f1);
    };
    for (int wall = 0; wall < 2; ++wall) {
        const double n = wall_normal(wall);
        std::vector<double> gam(static_cast<std::size_t>(nu));
        // Transport velocity sign*u leaves the domain when sign*u*n > 0.
        for (int j = 0; j < nu; ++j)
            if (sign * g.u(j) * n > 0.0) gam[j] = extrapolate(wall, j);
        for (int j = 0; j < nu; ++j) {
            if (sign * g.u(j) * n > 0.0) continue;
            gam[j] = inflow ? (*inflow)(f.time, wall, g.u(j)) : gam[g.mirror(j)];
        }
        for (int j = 0; j < nu; ++j) {
            if (g.u(j) * n > 0.0)
                tr.gamma_plus[wall][j] = gam[j];
            else
                tr.gamma_minus[wall][j] = gam[j];
        }
    }
    return tr;
}

GridSolution solve_linear_inflow(const PhaseGrid& grid, const DensityField& f0,
                                 const InflowData& q, double sigma, const SolverOptions& opts) {
    check_field(grid, f0, "initial field");
    require(static_cast<bool>(q), ErrorKind::InvalidArgument, "inflow data required");
    const InflowData checked = [&q](double t, int wall, double u) {
        const double v = q(t, wall, u);
        require(v >= 0.0 && std::isfinite(v), ErrorKind::InvalidArgument,
                "inflow data must be finite and nonnegative");
        return v;
    };
    return run(grid, f0, -1.0, WallMode::Inflow, &checked, nullptr, sigma, opts);
}

GridSolution solve_specular_linear(const PhaseGrid& grid, const DensityField& rho0,
                                   const DriftHistory& drift, double sigma,
                                   const SolverOptions& opts) {
    check_field(grid, rho0, "initial field");
    return run(grid, rho0, 1.0, WallMode::Specular, nullptr, &drift, sigma, opts);
}

GridSolution solve_specular_backward(const PhaseGrid& grid, const DensityField& psi, double sigma,
                                     const SolverOptions& opts) {
    check_field(grid, psi, "test function");
    return run(grid, psi, -1.0, WallMode::Specular, nullptr, nullptr, sigma, opts);
}

std::vector<double> drift_from_density(const PhaseGrid& g, const DensityField& field,
                                       const KineticModel& model) {
    const int nu = g.nu();
    const double floor = 1e-14 / (nu * g.du());
    const double bound = model.b.b_norm(1);
    std::vector<double> bu(static_cast<std::size_t>(nu));
    for (int j = 0; j < nu; ++j) bu[j] = model.b.component(g.u(j));
    std::vector<double> out(static_cast<std::size_t>(g.nx()), 0.0);
    for (int i = 0; i < g.nx(); ++i) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < nu / 2; ++j) {
            const int jm = g.mirror(j);
            num += bu[j] * field.at(i, j) + bu[jm] * field.at(i, jm);
            den += field.at(i, j) + field.at(i, jm);
        }
        if (den * g.du() < floor || !(den > 0.0)) continue;
        out[i] = std::clamp(num / den, -bound, bound);
    }
    return out;
}

double weighted_l2_squared(const PhaseGrid& g, const DensityField& f, double alpha) {
    double s = 0.0;
    for (int j = 0; j < g.nu(); ++j) {
        const double w = weight_value(alpha, g.u(j) * g.u(j));
        double col = 0.0;
        for (int i = 0; i < g.nx(); ++i) col += f.at(i, j) * f.at(i, j);
        s += w * col;
    }
    return s * g.cell_area();
}

double weighted_grad_squared(const PhaseGrid& g, const DensityField& f, double alpha) {
    const int nu = g.nu();
    const double du = g.du();
    double s = 0.0;
    for (int j = 0; j < nu; ++j) {
        const double w = weight_value(alpha, g.u(j) * g.u(j));
        double col = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            const double lo = j > 0 ? f.at(i, j - 1) : 0.0;
            const double hi = j + 1 < nu ? f.at(i, j + 1) : 0.0;
            const double d = (hi - lo) / (2.0 * du);
            col += d * d;
        }
        s += w * col;
    }
    return s * g.cell_area();
}

WeightedNorms weighted_norms(const PhaseGrid& g, const std::vector<DensityField>& history,
                             double alpha) {
    WeightedNorms out;
    for (std::size_t n = 0; n < history.size(); ++n) {
        out.sup_l2 = std::max(out.sup_l2, weighted_l2_squared(g, history[n], alpha));
        if (history.size() == static_cast<std::size_t>(g.steps()) + 1)
            out.grad_integral +=
                trap_weight(g, static_cast<int>(n)) * weighted_grad_squared(g, history[n], alpha);
    }
    out.v1 = std::sqrt(out.sup_l2 + out.grad_integral);
    return out;
}

double v1_distance(const PhaseGrid& g, const std::vector<DensityField>& a,
                   const std::vector<DensityField>& b, double alpha) {
    require(a.size() == b.size(), ErrorKind::InvalidArgument, "histories differ in length");
    std::vector<DensityField> diff(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        diff[n] = a[n];
        for (std::size_t k = 0; k < diff[n].values.size(); ++k)
            diff[n].values[k] -= b[n].values[k];
    }
    return weighted_norms(g, diff, alpha).v1;
}

EnergyBalance inflow_energy_balance(const PhaseGrid& g, const GridSolution& sol, double sigma) {
    const int steps = g.steps();
    double boundary_out = 0.0, boundary_in = 0.0, dissipation = 0.0;
    for (int n = 0; n <= steps; ++n) {
        const double w = trap_weight(g, n);
        const TraceField& tr = sol.traces[static_cast<std::size_t>(n)];
        for (int wall = 0; wall < 2; ++wall) {
            for (int j = 0; j < g.nu(); ++j) {
                const double un = g.u(j) * wall_normal(wall);
                const double gp = tr.gamma_plus[wall][j], gm = tr.gamma_minus[wall][j];
                if (un > 0.0) boundary_in += w * un * gp * gp * g.du();
                if (un < 0.0) boundary_out += w * (-un) * gm * gm * g.du();
            }
        }
        dissipation += w * face_gradient_squared(g, sol.history[n], [](double) { return 1.0; });
    }
    EnergyBalance e;
    e.lhs = l2_squared(g, sol.history.back()) + boundary_out + sigma * sigma * dissipation;
    e.rhs = l2_squared(g, sol.history.front()) + boundary_in;
    e.residual = std::abs(e.lhs - e.rhs);
    e.relative = e.rhs > 0.0 ? e.residual / e.rhs : e.residual;
    return e;
}

MassBalance inflow_mass_balance(const PhaseGrid& g, const GridSolution& sol) {
    (void)g;
    MassBalance m;
    m.excess = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < sol.stats.mass.size(); ++n) {
        const double lhs = sol.stats.mass[n] + sol.stats.mass_out[n];
        const double rhs = sol.stats.mass.front() + sol.stats.mass_in[n];
        m.excess = std::max(m.excess, lhs - rhs);
        m.lhs = lhs;
        m.rhs = rhs;
    }
    return m;
}

EnergyBalance specular_weighted_energy(const PhaseGrid& g, const GridSolution& sol,
                                       const DriftHistory& drift, double sigma, double alpha) {
    const WeightParams wp(alpha, 1);
    const int nu = g.nu();
    std::vector<double> w1(static_cast<std::size_t>(nu)), w2(static_cast<std::size_t>(nu));
    for (int j = 0; j < nu; ++j) {
        const WeightValue wv = weight_eval(wp, Vec{g.u(j)});
        w1[j] = wv.gradient[0];
        w2[j] = wv.laplacian;
    }
    double dissipation = 0.0, source = 0.0;
    for (int n = 0; n <= g.steps(); ++n) {
        const double w = trap_weight(g, n);
        const DensityField& f = sol.history[static_cast<std::size_t>(n)];
        dissipation += w * face_gradient_squared(
                               g, f, [alpha](double u) { return weight_value(alpha, u * u); });
        double s = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            const double b = drift.empty() ? 0.0 : drift[static_cast<std::size_t>(n)][i];
            for (int j = 0; j < nu; ++j) {
                const double v = f.at(i, j);
                s += (0.5 * sigma * sigma * w2[j] + w1[j] * b) * v * v;
            }
        }
        source += w * s * g.cell_area();
    }
    EnergyBalance e;
    e.lhs = weighted_l2_squared(g, sol.history.back(), alpha) + sigma * sigma * dissipation;
    e.rhs = weighted_l2_squared(g, sol.history.front(), alpha) + source;
    e.residual = std::abs(e.lhs - e.rhs);
    e.relative = e.rhs > 0.0 ? e.residual / e.rhs : e.residual;
    return e;
}

EnergyBalance backward_energy_balance(const PhaseGrid& g, const GridSolution& sol, double sigma) {
    double dissipation = 0.0;
    for (int n = 0; n <= g.steps(); ++n)
        dissipation += trap_weight(g, n) * face_gradient_squared(g, sol.history[n],
                                                                 [](double) { return 1.0; });
    EnergyBalance e;
    e.lhs = l2_squared(g, sol.history.back()) + sigma * sigma * dissipation;
    e.rhs = l2_squared(g, sol.history.front());
    e.residual = std::abs(e.lhs - e.rhs);
    e.relative = e.rhs > 0.0 ? e.residual / e.rhs : e.residual;
    return e;
}

}  // namespace cvfp
