#include "cvfp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cvfp/error.hpp"

namespace cvfp {

void DiagnosticsReport::add(std::string name, double value, double tolerance, std::string note) {
    const bool pass = std::isfinite(value) && value <= tolerance;
    entries.push_back({std::move(name), value, tolerance, pass, false, std::move(note)});
}

void DiagnosticsReport::add_flag(std::string name, double value, double tolerance, bool pass,
                                 std::string note) {
    entries.push_back({std::move(name), value, tolerance, pass, false, std::move(note)});
}

void DiagnosticsReport::add_skipped(std::string name, std::string note) {
    entries.push_back({std::move(name), 0.0, 0.0, true, true, std::move(note)});
}

bool DiagnosticsReport::all_pass() const noexcept {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

std::string DiagnosticsReport::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json o;
        o["name"] = e.name;
        o["value"] = e.value;
        o["tolerance"] = e.tolerance;
        o["pass"] = e.pass;
        o["skipped"] = e.skipped;
        o["scenario"] = scenario;
        if (!e.note.empty()) o["note"] = e.note;
        j["entries"].push_back(std::move(o));
    }
    j["all_pass"] = all_pass();
    return j.dump(2);
}

std::string DiagnosticsReport::summary_table() const {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-34s %14s %14s  %s\n", "check", "value", "tolerance",
                  "status");
    os << line;
    for (const auto& e : entries) {
        const char* status = e.skipped ? "skip" : (e.pass ? "pass" : "FAIL");
        std::snprintf(line, sizeof line, "%-34s %14.6e %14.6e  %s\n", e.name.c_str(), e.value,
                      e.tolerance, status);
        os << line;
    }
    return os.str();
}

double no_permeability_residual(const PhaseGrid& grid, const TraceField& trace) {
    double worst = 0.0;
    for (int wall = 0; wall < 2; ++wall) {
        const TraceFunctionals tf = trace_functionals(grid, trace, wall);
        if (!(tf.abs_flux > 0.0))
            fail(ErrorKind::DegenerateTrace,
                 "trace at t = " + std::to_string(trace.time) + " carries no flux mass");
        worst = std::max(worst, std::abs(tf.normal_flux) / tf.abs_flux);
    }
    return worst;
}

double no_permeability_residual(const PhaseGrid& grid, const std::vector<TraceField>& traces) {
    double worst = 0.0;
    for (const auto& tr : traces) worst = std::max(worst, no_permeability_residual(grid, tr));
    return worst;
}

ShellEstimate shell_normal_velocity(const Domain& domain, const std::vector<Ensemble>& snapshots,
                                    double eps_shell, TimeWindow window) {
    require(eps_shell > 0.0, ErrorKind::InvalidArgument, "shell width must be positive");
    ShellEstimate est;
    double sum = 0.0, sum2 = 0.0;
    std::vector<std::pair<double, std::size_t>> batches;
    for (const auto& snap : snapshots) {
        if (snap.time < window.begin || snap.time > window.end) continue;
        double bsum = 0.0;
        std::size_t bn = 0;
        for (const auto& s : snap.states) {
            const double sd = signed_distance(domain, s.x);
            if (sd < -2.0 * eps_shell) continue;
            const double v = dot(s.u, outward_normal(domain, s.x));
            bsum += v;
            sum2 += v * v;
            ++bn;
        }
        if (bn == 0) continue;
        sum += bsum;
        est.samples += bn;
        batches.emplace_back(bsum, bn);
    }
    if (est.samples == 0) return est;
    const double n = static_cast<double>(est.samples);
    est.mean = sum / n;
    est.batches = batches.size();
    if (batches.size() >= 2) {
        // Ratio-estimator variance over snapshot batches.
        double acc = 0.0;
        for (const auto& [bs, bn] : batches) {
            const double r = bs - est.mean * static_cast<double>(bn);
            acc += r * r;
        }
        const double k = static_cast<double>(batches.size());
        const double mean_batch = n / k;
        est.std_error = std::sqrt(acc / (k - 1.0) / k) / mean_batch;
    } else if (est.samples >= 2) {
        const double var = (sum2 - n * est.mean * est.mean) / (n - 1.0);
        est.std_error = std::sqrt(std::max(var, 0.0) / n);
    }
    return est;
}

FluxBalance flux_balance_particles(const Domain& domain, const std::vector<ParticleHit>& hits,
                                   TimeWindow window, const std::vector<Ensemble>* snapshots,
                                   double eps_shell) {
    FluxBalance fb;
    for (const auto& h : hits) {
        const Vec n = outward_normal(domain, h.event.location);
        const double a = dot(h.event.pre_velocity, n);
        const double b = dot(h.event.post_velocity, n);
        fb.max_antisymmetry = std::max(fb.max_antisymmetry, std::abs(a + b));
        if (h.event.time >= window.begin && h.event.time <= window.end) {
            fb.windowed_flux += a + b;
            ++fb.events;
        }
    }
    fb.skipped = fb.events == 0;
    if (snapshots) fb.shell = shell_normal_velocity(domain, *snapshots, eps_shell, window);
    return fb;
}

HitSymmetry hit_side_symmetry(const Domain& domain, const std::vector<ParticleHit>& hits) {
    HitSymmetry s;
    for (const auto& h : hits) {
        const double n0 = outward_normal(domain, h.event.location)[0];
        if (n0 < 0.0) ++s.first;
        if (n0 > 0.0) ++s.second;
    }
    const double tot = static_cast<double>(s.first + s.second);
    if (tot > 0.0) {
        const double d = static_cast<double>(s.first) - static_cast<double>(s.second);
        s.chi2 = d * d / tot;
        s.p_value = std::erfc(std::sqrt(0.5 * s.chi2));
    }
    return s;
}

SemigroupCheck semigroup_l2_check(const PhaseGrid& grid, const DensityField& psi, double sigma,
                                  const SolverOptions& opts) {
    const int nx = grid.nx(), nu = grid.nu();
    for (int j = 0; j < nu; ++j)
        require(psi.at(0, j) == 0.0 && psi.at(nx - 1, j) == 0.0, ErrorKind::InvalidArgument,
                "test function must vanish on wall-adjacent cells");
    for (int i = 0; i < nx; ++i)
        require(psi.at(i, 0) == 0.0 && psi.at(i, nu - 1) == 0.0, ErrorKind::InvalidArgument,
                "test function must vanish on the outer velocity cells");
    const GridSolution sol = solve_specular_backward(grid, psi, sigma, opts);
    const EnergyBalance e = backward_energy_balance(grid, sol, sigma);
    SemigroupCheck c;
    c.psi_norm2 = e.rhs;
    double g2 = 0.0;
    for (double v : sol.history.back().values) g2 += v * v;
    c.gamma_norm2 = g2 * grid.cell_area();
    c.margin = c.psi_norm2 - c.gamma_norm2;
    c.dissipation = e.lhs - c.gamma_norm2;
    c.split_residual = e.residual;
    c.split_relative = e.relative;
    return c;
}

SandwichResult sandwich_check(const PhaseGrid& grid, const std::vector<DensityField>& history,
                              const MaxwellianParams& lower, const MaxwellianParams& upper) {
    SandwichResult r;
    std::vector<double> lo(static_cast<std::size_t>(grid.nu())), hi(lo.size());
    for (const auto& f : history) {
        r.upper_peak = std::max(r.upper_peak, maxwellian_peak(upper, f.time));
        for (int j = 0; j < grid.nu(); ++j) {
            lo[j] = maxwellian_eval_1d(lower, f.time, grid.u(j));
            hi[j] = maxwellian_eval_1d(upper, f.time, grid.u(j));
        }
        for (int i = 0; i < grid.nx(); ++i)
            for (int j = 0; j < grid.nu(); ++j) {
                const double v = f.at(i, j);
                r.absolute = std::max({r.absolute, lo[j] - v, v - hi[j]});
            }
    }
    r.relative = r.upper_peak > 0.0 ? r.absolute / r.upper_peak : r.absolute;
    return r;
}

SandwichResult sandwich_check(const PhaseGrid& grid, const DensityField& field,
                              const MaxwellianParams& lower, const MaxwellianParams& upper) {
    return sandwich_check(grid, std::vector<DensityField>{field}, lower, upper);
}

double mc_grid_distance(const Domain& domain, const Ensemble& particles, const PhaseGrid& grid,
                        const DensityField& field, int coarsen_x, int coarsen_u) {
    const auto* iv = std::get_if<Interval>(&domain.shape());
    if (!iv || std::abs(iv->length - grid.length()) > 1e-12 * grid.length())
        fail(ErrorKind::BoxMismatch, "particle domain does not match the grid interval");
    if (std::abs(particles.time - field.time) > 1e-9 * std::max(1.0, field.time))
        fail(ErrorKind::BoxMismatch, "snapshot time differs from the field time");
    require(field.nx == grid.nx() && field.nu == grid.nu(), ErrorKind::BoxMismatch,
            "field does not match the grid");
    require(coarsen_x >= 1 && coarsen_u >= 1 && grid.nx() % coarsen_x == 0 &&
                grid.nu() % coarsen_u == 0,
            ErrorKind::InvalidArgument, "coarsening factors must divide the grid");
    require(!particles.states.empty(), ErrorKind::InvalidArgument, "empty particle snapshot");

    const int bx = grid.nx() / coarsen_x, bu = grid.nu() / coarsen_u;
    std::vector<double> hist(static_cast<std::size_t>(bx) * bu, 0.0);
    std::vector<double> dens(hist.size(), 0.0);
    double outside = 0.0;
    const double wx = grid.dx() * coarsen_x, wu = grid.du() * coarsen_u;
    for (const auto& s : particles.states) {
        const double x = s.x[0], u = s.u[0];
        if (!(u >= -grid.vmax() && u < grid.vmax())) {
            outside += 1.0;
            continue;
        }
        const int i = std::clamp(static_cast<int>(x / wx), 0, bx - 1);
        const int j = std::clamp(static_cast<int>((u + grid.vmax()) / wu), 0, bu - 1);
        hist[static_cast<std::size_t>(i) * bu + j] += 1.0;
    }
    double total = 0.0;
    for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.nu(); ++j) {
            const double v = field.at(i, j);
            dens[static_cast<std::size_t>(i / coarsen_x) * bu + j / coarsen_u] += v;
            total += v;
        }
    require(total > 0.0, ErrorKind::InvalidArgument, "grid density has zero mass");
    const double n = static_cast<double>(particles.states.size());
    double dist = outside / n;
    for (std::size_t k = 0; k < hist.size(); ++k) dist += std::abs(hist[k] / n - dens[k] / total);
    return dist;
}

}  // namespace cvfp
