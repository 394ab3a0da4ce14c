// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// on the command line to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cvfp/diagnostics.hpp"
#include "cvfp/error.hpp"
#include "cvfp/geometry.hpp"
#include "cvfp/langevin.hpp"
#include "cvfp/maxwellian.hpp"
#include "cvfp/mckean.hpp"
#include "cvfp/picard.hpp"
#include "cvfp/rng.hpp"
#include "cvfp/vfp_solver.hpp"
#include "cvfp/weights.hpp"
#include "cvfp_cli/config.hpp"
#include "cvfp_cli/runner.hpp"

using namespace cvfp;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::filesystem::path scenario_dir() {
    const char* env = std::getenv("CVFP_SCENARIO_DIR");
    return env ? std::filesystem::path(env) : std::filesystem::path(CVFP_SCENARIO_DIR);
}

double gauss(double var, double u) { return std::exp(-u * u / (2 * var)) / std::sqrt(2 * kPi * var); }

// ---------------------------------------------------------------- 1
Outcome reflection_algebra() {
    RngStream rng(101, 0);
    double worst_norm = 0, worst_twice = 0, worst_flip = 0;
    for (int dim : {2, 3}) {
        const Domain ball = Domain::ball(Vec::filled(dim, 0.0), 1.0);
        for (int k = 0; k < 10000; ++k) {
            Vec p(dim), u(dim);
            for (int c = 0; c < dim; ++c) {
                p[c] = rng.normal();
                u[c] = 3 * rng.normal();
            }
            p *= 1.0 / norm(p);
            const Vec n = outward_normal(ball, p);
            const Vec r = reflect(u, n);
            const Vec rr = reflect(r, n);
            worst_norm = std::max(worst_norm, std::abs(norm(r) - norm(u)));
            worst_twice = std::max(worst_twice, norm(rr - u));
            worst_flip = std::max(worst_flip, std::abs(dot(r, n) + dot(u, n)));
        }
    }
    const bool ok = worst_norm <= 1e-12 && worst_twice <= 1e-12 && worst_flip <= 1e-12;
    return {ok, "max ||Ru|-|u||=" + fmt(worst_norm) + " max |RRu-u|=" + fmt(worst_twice) +
                    " max |Ru.n+u.n|=" + fmt(worst_flip)};
}

// ---------------------------------------------------------------- 2
Outcome weight_lemma() {
    RngStream rng(102, 0);
    bool ok = true;
    std::ostringstream os;
    for (auto [d, alpha] : {std::pair{1, 3.0}, std::pair{2, 3.0}, std::pair{3, 4.0}}) {
        const WeightParams wp(alpha, d);
        int bad[4] = {0, 0, 0, 0};
        for (int k = 0; k < 10000; ++k) {
            Vec u(d);
            const double scale = std::exp(4 * rng.uniform() - 2);  // speeds from ~0.1 to ~10
            for (int c = 0; c < d; ++c) u[c] = scale * rng.normal();
            const WeightValue w = weight_eval(wp, u);
            if (!(dot(u, w.gradient) >= 0.0)) ++bad[0];
            if (!(norm(w.gradient) <= alpha * w.value)) ++bad[1];
            if (!(grad_sqrt_weight_norm(wp, u) <= 0.5 * alpha * std::sqrt(w.value))) ++bad[2];
            if (!(w.laplacian <= alpha * (alpha - 2.0 + d) * w.value)) ++bad[3];
        }
        // 1/omega integrates to |S^{d-1}| B(d/2, (alpha-d)/2) / 2
        const double exact = unit_sphere_area(d) * std::beta(0.5 * d, 0.5 * (alpha - d)) / 2.0;
        double integral = 0.0;
        bool quad_ok = true;
        try {
            integral = inverse_weight_integral(wp, 1e-6);
        } catch (const Error&) {
            quad_ok = false;
        }
        const double rel = std::abs(integral - exact) / exact;
        const bool case_ok = bad[0] + bad[1] + bad[2] + bad[3] == 0 && quad_ok && rel <= 1e-6;
        ok = ok && case_ok;
        os << "(d=" << d << ",a=" << alpha << ") violations " << bad[0] << "/" << bad[1] << "/" << bad[2]
           << "/" << bad[3] << " int rel err " << fmt(rel) << "; ";
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------- 3
struct CovStat {
    double mean[3] = {0, 0, 0};  // xx, xu, uu
    double se[3] = {0, 0, 0};
};

template <class Draw>
CovStat covariance_stat(std::size_t n, Draw&& draw) {
    double s[3] = {0, 0, 0}, q[3] = {0, 0, 0};
    for (std::size_t k = 0; k < n; ++k) {
        const auto [x, u] = draw();
        const double v[3] = {x * x, x * u, u * u};
        for (int i = 0; i < 3; ++i) {
            s[i] += v[i];
            q[i] += v[i] * v[i];
        }
    }
    CovStat c;
    for (int i = 0; i < 3; ++i) {
        c.mean[i] = s[i] / n;
        c.se[i] = std::sqrt(std::max(0.0, q[i] / n - c.mean[i] * c.mean[i]) / n);
    }
    return c;
}

Outcome free_flow_exactness() {
    bool ok = true;
    std::ostringstream os;
    for (auto [sigma, h] : {std::pair{1.0, 0.1}, std::pair{0.5, 0.01}}) {
        const double target[3] = {sigma * sigma * h * h * h / 3, sigma * sigma * h * h / 2, sigma * sigma * h};
        double worst_z = 0;
        CovStat exact_stat[2];
        for (int comp = 0; comp < 2; ++comp) {
            RngStream rng(103, static_cast<std::uint64_t>(comp));
            const PhaseState s0{Vec{0.0, 0.0}, Vec{0.0, 0.0}};
            exact_stat[comp] = covariance_stat(1000000, [&] {
                const PhaseState e = free_step(s0, h, sigma, rng);
                return std::pair{e.x[comp], e.u[comp]};
            });
            for (int i = 0; i < 3; ++i)
                worst_z = std::max(worst_z, std::abs(exact_stat[comp].mean[i] - target[i]) / exact_stat[comp].se[i]);
        }
        // Euler-Maruyama with m substeps: x += u dt, then u += sigma dW.
        constexpr int m = 500;
        const double dt = h / m;
        RngStream er(104, 0);
        const CovStat euler = covariance_stat(100000, [&] {
            double x = 0, u = 0;
            for (int k = 0; k < m; ++k) {
                x += u * dt;
                u += sigma * std::sqrt(dt) * er.normal();
            }
            return std::pair{x, u};
        });
        // discretisation bias of this Euler scheme in closed form
        const double md = m;
        const double euler_target[3] = {sigma * sigma * dt * dt * dt * (md - 1) * md * (2 * md - 1) / 6,
                                        sigma * sigma * dt * dt * md * (md - 1) / 2, sigma * sigma * h};
        double worst_euler = 0;
        for (int i = 0; i < 3; ++i) {
            const double bias = std::abs(euler_target[i] - target[i]);
            const double band = 4 * std::hypot(euler.se[i], exact_stat[0].se[i]) + bias;
            worst_euler = std::max(worst_euler, std::abs(euler.mean[i] - exact_stat[0].mean[i]) / band);
        }
        const bool case_ok = worst_z <= 4.0 && worst_euler <= 1.0;
        ok = ok && case_ok;
        os << "(s=" << sigma << ",h=" << h << ") max z=" << fmt(worst_z)
           << " euler gap/band=" << fmt(worst_euler) << "; ";
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------- 4
std::vector<HitEvent> interval_billiard(double L, double x, double v, double T) {
    std::vector<HitEvent> out;
    double t = 0;
    while (true) {
        const double tau = v > 0 ? (L - x) / v : x / -v;
        if (t + tau > T) break;
        t += tau;
        x = v > 0 ? L : 0.0;
        out.push_back({t, Vec{x}, Vec{v}, Vec{-v}});
        v = -v;
    }
    return out;
}

std::vector<HitEvent> disc_billiard(Vec p, Vec v, double T) {
    std::vector<HitEvent> out;
    double t = 0;
    while (true) {
        // exit time of the ray p + s v from the unit circle
        const double a = dot(v, v), b = dot(p, v), c = dot(p, p) - 1.0;
        const double s = (-b + std::sqrt(b * b - a * c)) / a;
        if (t + s > T) break;
        t += s;
        p = p + v * s;
        const Vec n = p * (1.0 / norm(p));
        const Vec w = v - n * (2 * dot(v, n));
        out.push_back({t, p, v, w});
        v = w;
    }
    return out;
}

Outcome deterministic_billiard() {
    StepParams params = StepParams::with_defaults(0.05);
    double worst = 0;
    std::size_t mismatched = 0, total = 0;
    const auto compare = [&](const std::vector<HitEvent>& got, const std::vector<HitEvent>& want) {
        if (got.size() != want.size()) {
            ++mismatched;
            return;
        }
        for (std::size_t k = 0; k < got.size(); ++k) {
            ++total;
            worst = std::max(worst, std::abs(got[k].time - want[k].time));
            worst = std::max(worst, norm(got[k].location - want[k].location));
            worst = std::max(worst, norm(got[k].post_velocity - want[k].post_velocity));
        }
    };
    const Domain iv = Domain::interval(1.0);
    for (auto [x, v] : {std::pair{0.5, 1.0}, std::pair{0.2, 3.0}, std::pair{0.9, -2.5}}) {
        RngStream rng(105, 0);
        const auto path = simulate_path(iv, {Vec{x}, Vec{v}}, 2.0, params, 0.0, rng);
        compare(path.events, interval_billiard(1.0, x, v, 2.0));
    }
    const Domain disc = Domain::ball({0.0, 0.0}, 1.0);
    for (auto [p, v] : {std::pair{Vec{0.5, 0.0}, Vec{0.0, 1.0}}, std::pair{Vec{0.1, 0.0}, Vec{0.6, 0.8}},
                        std::pair{Vec{-0.3, 0.2}, Vec{1.3, -0.4}}}) {
        RngStream rng(106, 0);
        const auto path = simulate_path(disc, {p, v}, 3.0, params, 0.0, rng);
        compare(path.events, disc_billiard(p, v, 3.0));
    }
    return {mismatched == 0 && worst <= 1e-10 && total > 0,
            std::to_string(total) + " hits, max error " + fmt(worst) + ", count mismatches " +
                std::to_string(mismatched)};
}

// ---------------------------------------------------------------- 5
Outcome maxwellian_classification() {
    struct Case {
        double mu, sigma, b;
    };
    const Case super_cases[] = {{0.75, 1.0, 1.0}, {0.6, 0.5, 1.0}, {0.9, 2.0, 0.5}};
    const Case sub_cases[] = {{2.0, 1.0, 1.0}, {1.5, 0.5, 1.0}, {3.0, 2.0, 0.5}};
    RngStream rng(107, 0);
    bool ok = true;
    std::ostringstream os;
    const auto scan = [&](const Case& c, double a, bool super, int& wrong_sign) {
        MaxwellianParams p;
        p.a = a;
        p.mu = c.mu;
        p.core = {1.0, 0.5};
        p.sigma = c.sigma;
        const double reach = 2.0 * (p.core.s + c.sigma * c.sigma) * c.b / (std::abs(1 - c.mu) * c.sigma * c.sigma) + 2.0;
        wrong_sign = 0;
        for (int k = 0; k < 1000; ++k) {
            const double t = 1e-3 + rng.uniform();
            const double u = reach * (2 * rng.uniform() - 1);
            const double bu = rng.uniform() < 0.5 ? (rng.uniform() < 0.5 ? -c.b : c.b) : c.b * (2 * rng.uniform() - 1);
            const double l = lB_apply(p, Vec{bu}, t, Vec{u});
            if (super ? l < 0.0 : l > 0.0) ++wrong_sign;
        }
    };
    for (bool super : {true, false}) {
        for (const Case& c : super ? super_cases : sub_cases) {
            const double thr = super_sub_threshold(c.mu, c.sigma, c.b);
            const double gap = 0.1;
            const double inside = super ? thr + gap : thr - gap;
            const double outside = super ? thr - 2 * gap : thr + 2 * gap;
            int wrong_in = 0, wrong_out = 0;
            scan(c, inside, super, wrong_in);
            scan(c, outside, super, wrong_out);
            ok = ok && wrong_in == 0 && wrong_out > 0;
            os << (super ? "super" : "sub") << "(mu=" << c.mu << ") " << wrong_in << "/" << wrong_out << "; ";
        }
    }
    return {ok, "wrong-sign counts inside/outside: " + os.str()};
}

// ---------------------------------------------------------------- 6
Outcome inflow_energy_ladder() {
    const double T = 0.1, vmax = 6.0, sigma = 1.0;
    std::vector<double> residuals;
    double worst_mass = 0;
    for (int n : {32, 64, 128}) {
        const PhaseGrid g(1.0, n, n, vmax, T / n, T);
        const auto f0 = sample_field(g, [](double x, double u) { return std::sin(kPi * x) * gauss(0.5, u); });
        const InflowData q = [](double t, int wall, double u) {
            return (1 + t) * gauss(0.4, u - (wall == kLeftWall ? -0.5 : 0.5));
        };
        const auto sol = solve_linear_inflow(g, f0, q, sigma);
        residuals.push_back(inflow_energy_balance(g, sol, sigma).relative);
        const auto mb = inflow_mass_balance(g, sol);
        worst_mass = std::max(worst_mass, mb.excess / mb.rhs);
    }
    const bool mono = residuals[1] < residuals[0] && residuals[2] < residuals[1];
    const bool ok = mono && residuals[2] <= 1e-2 && worst_mass <= 1e-10;
    return {ok, "energy residuals " + fmt(residuals[0]) + " " + fmt(residuals[1]) + " " + fmt(residuals[2]) +
                    ", max L1 excess " + fmt(worst_mass)};
}

// ---------------------------------------------------------------- 7
Outcome specular_solver() {
    const double T = 0.15, sigma = 1.0;
    std::vector<double> errors;
    double worst_mass = 0, worst_perm = 0;
    bool symmetric = true;
    for (int n : {32, 64, 128}) {
        // analytic: uniform in x, Gaussian in u, no drift
        const PhaseGrid g(1.0, n, n, 6.0, T / n, T);
        const double s0 = 0.25;
        const auto f0 = sample_field(g, [&](double, double u) { return gauss(s0, u); });
        const auto sol = solve_specular_linear(g, f0, {}, sigma);
        double err = 0;
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.nu(); ++j)
                err = std::max(err, std::abs(sol.history.back().at(i, j) - gauss(s0 + sigma * sigma * T, g.u(j))));
        errors.push_back(err);

        // conservation and traces with a nonuniform density and a drift
        const int steps_m = static_cast<int>(std::ceil(T * 8.0 * n));
        const PhaseGrid gm(1.0, n, n, 8.0, T / steps_m, T);
        const auto rho0 = sample_field(gm, [](double x, double u) {
            return (1 + 0.5 * std::cos(kPi * x)) * gauss(0.3, u - 0.8);
        });
        const KineticModel model{sigma, DriftFunction::tanh(1.0)};
        const DriftHistory drift(static_cast<std::size_t>(gm.steps() + 1), drift_from_density(gm, rho0, model));
        const auto ms = solve_specular_linear(gm, rho0, drift, sigma);
        worst_mass = std::max(worst_mass, ms.stats.max_step_mass_change);
        for (const auto& tr : ms.traces)
            for (int w : {kLeftWall, kRightWall})
                for (int j = 0; j < gm.nu(); ++j)
                    symmetric = symmetric && tr.gamma(w, j) == tr.gamma(w, gm.mirror(j));
        worst_perm = std::max(worst_perm, no_permeability_residual(gm, ms.traces));
    }
    const bool mono = errors[1] < errors[0] && errors[2] < errors[1];
    const bool ok = worst_mass <= 1e-10 && mono && errors[2] <= 5e-3 && symmetric && worst_perm <= 1e-10;
    return {ok, "max-norm errors " + fmt(errors[0]) + " " + fmt(errors[1]) + " " + fmt(errors[2]) +
                    ", mass/step " + fmt(worst_mass) + ", traces " + (symmetric ? "mirror-exact" : "ASYMMETRIC") +
                    ", no-permeability " + fmt(worst_perm)};
}

// ---------------------------------------------------------------- 8, 10, 11
struct PicardScenario {
    cli::ScenarioConfig cfg;
    std::optional<PhaseGrid> grid;
    std::optional<PicardResult> result;
    double worst_sandwich = 0;
    double tol_grid = 0;
    std::optional<McKeanRun> particles;
};

PicardScenario& picard_scenario() {
    static std::unique_ptr<PicardScenario> sc;
    if (!sc) {
        sc = std::make_unique<PicardScenario>();
        sc->cfg = cli::parse_config(scenario_dir() / "picard_tanh.json");
    }
    return *sc;
}

void ensure_picard(PicardScenario& sc) {
    if (sc.result) return;
    const PhaseGrid grid = cli::make_grid(sc.cfg);
    sc.grid = grid;
    sc.tol_grid = 10.0 * (grid.dx() + grid.du() + grid.dt());
    const MaxwellianParams lo = cli::lower_envelope(sc.cfg), up = cli::upper_envelope(sc.cfg);
    PicardOptions opts;
    opts.tol = sc.cfg.run.picard_tol;
    opts.max_iter = sc.cfg.run.picard_max_iter;
    opts.alpha = sc.cfg.weight_alpha();
    opts.throw_on_failure = false;
    opts.observer = [&](int, const GridSolution& s) {
        sc.worst_sandwich = std::max(sc.worst_sandwich, sandwich_check(grid, s.history, lo, up).relative);
    };
    sc.result = picard_nonlinear(grid, cli::initial_density(sc.cfg, grid), sc.cfg.model, opts);
}

void ensure_particles(PicardScenario& sc) {
    if (sc.particles) return;
    McKeanRunConfig rc;
    rc.horizon = sc.cfg.run.horizon;
    rc.particles = sc.cfg.run.particles;
    rc.seed = sc.cfg.run.seed;
    rc.output_times = sc.cfg.run.output_times;
    sc.particles = run_mckean(sc.cfg.domain, cli::initial_sampler(sc.cfg), sc.cfg.model, sc.cfg.estimator,
                              sc.cfg.step, rc);
}

Outcome picard_scheme() {
    PicardScenario& sc = picard_scenario();
    ensure_picard(sc);
    const PicardReport& rep = sc.result->report;
    const auto& d = rep.distances;
    // eventually decreasing: strictly decreasing after the largest distance
    const auto peak = std::max_element(d.begin(), d.end()) - d.begin();
    bool decreasing = true;
    for (std::size_t k = static_cast<std::size_t>(peak) + 1; k < d.size(); ++k) decreasing = decreasing && d[k] < d[k - 1];
    std::ostringstream os;
    os << rep.iterations << " iterates, distances";
    for (double v : d) os << " " << fmt(v);
    os << "; worst sandwich " << fmt(sc.worst_sandwich) << " vs tol_grid " << fmt(sc.tol_grid);
    const bool ok = rep.converged && rep.iterations <= 20 && decreasing && sc.worst_sandwich <= sc.tol_grid;
    return {ok, os.str()};
}

// ---------------------------------------------------------------- 9
Outcome semigroup_contraction() {
    const double T = 0.1, sigma = 1.0;
    std::vector<double> tol, viol, split;
    for (int n : {32, 64, 128}) {
        const PhaseGrid g(1.0, n, n, 5.0, T / n, T);
        auto psi = sample_field(g, [](double x, double u) {
            const double s = std::sin(kPi * x);
            return s * s * std::exp(-u * u);
        });
        for (int i = 0; i < g.nx(); ++i)
            for (int j = 0; j < g.nu(); ++j)
                if (i == 0 || i == g.nx() - 1 || j == 0 || j == g.nu() - 1) psi.at(i, j) = 0.0;
        const SemigroupCheck c = semigroup_l2_check(g, psi, sigma);
        tol.push_back(10.0 * (g.dx() + g.du() + g.dt()) * c.psi_norm2);
        viol.push_back(std::max(0.0, -c.margin));
        split.push_back(c.split_relative);
    }
    bool ok = split.back() <= 1e-2;
    for (std::size_t k = 0; k < tol.size(); ++k) ok = ok && viol[k] <= tol[k];
    for (std::size_t k = 1; k < tol.size(); ++k) ok = ok && tol[k] < tol[k - 1];
    return {ok, "margin violations " + fmt(viol[0]) + " " + fmt(viol[1]) + " " + fmt(viol[2]) + " vs tol_grid " +
                    fmt(tol[0]) + " " + fmt(tol[1]) + " " + fmt(tol[2]) + ", energy split residual " +
                    fmt(split[0]) + " " + fmt(split[1]) + " " + fmt(split[2])};
}

// ---------------------------------------------------------------- 10
Outcome particle_grid() {
    PicardScenario& sc = picard_scenario();
    ensure_picard(sc);
    ensure_particles(sc);
    const double dist = mc_grid_distance(sc.cfg.domain, sc.particles->snapshots.back(), *sc.grid,
                                         sc.result->solution.history.back(), sc.cfg.run.coarsen_x,
                                         sc.cfg.run.coarsen_u);
    return {dist <= 0.05, "L1 distance " + fmt(dist) + " with N=" + std::to_string(sc.cfg.run.particles)};
}

// ---------------------------------------------------------------- 11
Outcome particle_no_permeability() {
    PicardScenario& sc = picard_scenario();
    ensure_particles(sc);
    const auto& run = *sc.particles;
    const double eps = sc.cfg.run.eps_shell * sc.cfg.domain_size();
    const FluxBalance fb =
        flux_balance_particles(sc.cfg.domain, run.hits, {0.0, sc.cfg.run.horizon}, &run.snapshots, eps);
    const ShellEstimate& s = *fb.shell;
    const double z = s.std_error > 0 ? std::abs(s.mean) / s.std_error : INFINITY;
    const bool ok = !fb.skipped && fb.max_antisymmetry == 0.0 && fb.windowed_flux == 0.0 && z <= 4.0;
    return {ok, std::to_string(fb.events) + " events, antisymmetry " + fmt(fb.max_antisymmetry) + ", shell mean " +
                    fmt(s.mean) + " se " + fmt(s.std_error) + " (" + fmt(z) + " SE, " + std::to_string(s.samples) +
                    " samples in " + std::to_string(s.batches) + " batches)"};
}

// ---------------------------------------------------------------- 12
Outcome reproducibility() {
    std::ostringstream os;
    bool ok = true;
    for (auto [file, cmd] : {std::pair{"default.json", cli::Subcommand::Validate},
                             std::pair{"disc.json", cli::Subcommand::SimulateMcKean}}) {
        const auto cfg = cli::parse_config(scenario_dir() / file);
        const auto t0 = std::chrono::steady_clock::now();
        const auto base = cli::run_scenario(cfg, cmd, {1, std::nullopt});
        const double cost = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool same = true;
        double others = 0;
        for (int threads : {2, 8}) {
            const auto t1 = std::chrono::steady_clock::now();
            const auto b = cli::run_scenario(cfg, cmd, {threads, std::nullopt});
            others += std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
            same = same && b.files.size() == base.files.size();
            for (std::size_t k = 0; same && k < b.files.size(); ++k)
                same = b.files[k].name == base.files[k].name && b.files[k].contents == base.files[k].contents;
        }
        // three runs in total against a budget of three scenario costs
        const bool timely = cost + others < 3.0 * cost + 1.0;
        ok = ok && same && timely;
        os << file << ": " << base.files.size() << " files " << (same ? "identical" : "DIFFER")
           << " across 1/2/8 threads, cost " << fmt(cost) << "s, total " << fmt(cost + others) << "s; ";
    }
    return {ok, os.str()};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "reflection algebra", 1, reflection_algebra},
        {2, "weight lemma suite", 5, weight_lemma},
        {3, "free-flow exactness", 30, free_flow_exactness},
        {4, "deterministic billiard", 1, deterministic_billiard},
        {5, "Maxwellian super/sub classification", 5, maxwellian_classification},
        {6, "inflow energy identity and L1 estimate", 120, inflow_energy_ladder},
        {7, "specular grid solver", 120, specular_solver},
        {8, "Picard scheme and Maxwellian sandwich", 300, picard_scheme},
        {9, "semigroup L2 contraction", 60, semigroup_contraction},
        {10, "particle-grid cross-validation", 300, particle_grid},
        {11, "particle no-permeability", 10, particle_no_permeability},
        {12, "reproducibility across thread counts", 600, reproducibility},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::printf("%s [%2d] %s (%.2fs of %.0fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                    in_time ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
