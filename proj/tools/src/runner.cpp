#include "cvfp_cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cvfp/csv.hpp"
#include "cvfp/error.hpp"
#include "cvfp/parallel.hpp"
#include "cvfp/picard.hpp"

#ifndef CVFP_VERSION
#define CVFP_VERSION "0.0.0"
#endif

namespace cvfp::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::string> axis_columns(const std::string& prefix, int d) {
    std::vector<std::string> out;
    for (int k = 0; k < d; ++k) out.push_back(prefix + std::to_string(k));
    return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

void put(CsvWriter& w, const Vec& v) {
    for (int k = 0; k < v.dim(); ++k) w.cell(v[k]);
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double tol_grid(const PhaseGrid& g) { return 10.0 * (g.dx() + g.du() + g.dt()); }

std::string hits_csv(const std::vector<ParticleHit>& hits, int d, const char* id_column) {
    std::ostringstream os;
    CsvWriter w(os, concat(concat(concat({id_column, "tau"}, axis_columns("x", d)), axis_columns("u_pre", d)),
                           axis_columns("u_post", d)));
    for (const auto& h : hits) {
        w.cell(h.particle).cell(h.event.time);
        put(w, h.event.location);
        put(w, h.event.pre_velocity);
        put(w, h.event.post_velocity);
        w.end_row();
    }
    return os.str();
}

// Reflection bookkeeping and wall-side statistics shared by both particle
// pipelines.
void particle_diagnostics(const ScenarioConfig& cfg, const std::vector<ParticleHit>& hits,
                          const std::vector<Ensemble>* snapshots, double worst_excursion,
                          DiagnosticsReport& rep, const std::string& prefix) {
    const TimeWindow window{0.0, cfg.run.horizon};
    const double eps = cfg.run.eps_shell * cfg.domain_size();
    const FluxBalance fb = flux_balance_particles(cfg.domain, hits, window, snapshots, eps);
    rep.add(prefix + "confinement", std::max(0.0, worst_excursion), cfg.step.eps_hit,
            "max signed distance over recorded states");
    if (fb.skipped) {
        rep.add_skipped(prefix + "specular_antisymmetry", "no wall hits in the window");
        rep.add_skipped(prefix + "windowed_flux", "no wall hits in the window");
    } else {
        rep.add(prefix + "specular_antisymmetry", fb.max_antisymmetry, 1e-12,
                "max |u_post.n + u_pre.n| per event");
        rep.add(prefix + "windowed_flux", std::abs(fb.windowed_flux), 1e-12 * static_cast<double>(fb.events),
                "sum of u_pre.n + u_post.n over " + std::to_string(fb.events) + " events");
    }
    const HitSymmetry sym = hit_side_symmetry(cfg.domain, hits);
    rep.add_flag(prefix + "hit_count_stats", static_cast<double>(sym.first + sym.second), 0.0, true,
                 "first=" + std::to_string(sym.first) + " second=" + std::to_string(sym.second) +
                     " chi2=" + format_double(sym.chi2) + " p=" + format_double(sym.p_value));
    if (fb.shell) {
        const ShellEstimate& s = *fb.shell;
        if (s.samples < 2 || !(s.std_error > 0.0)) {
            rep.add_skipped(prefix + "shell_normal_velocity", "too few particles in the wall shell");
        } else {
            rep.add(prefix + "shell_normal_velocity", std::abs(s.mean) / s.std_error, 4.0,
                    "|E[U.n | shell]| in standard errors; mean=" + format_double(s.mean) +
                        " se=" + format_double(s.std_error) + " n=" + std::to_string(s.samples));
        }
    }
}

struct Pipeline {
    const ScenarioConfig& cfg;
    const RunOptions& opts;
    std::uint64_t seed;
    OutputBundle& out;

    void emit(std::string name, std::string contents) {
        out.files.push_back({std::move(name), std::move(contents)});
    }

    void simulate_linear() {
        const int d = cfg.dim();
        const std::size_t n = cfg.run.paths;
        const InitialSampler sampler = initial_sampler(cfg);
        std::vector<PathResult> paths(n);
        parallel_blocks(n, 16, opts.threads, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                RngStream rng(seed, i);
                const PhaseState s0 = sampler(rng);
                paths[i] = simulate_path(cfg.domain, s0, cfg.run.horizon, cfg.step, cfg.model.sigma, rng);
            }
        });
        std::ostringstream ps;
        CsvWriter pw(ps, concat(concat({"path_id", "t"}, axis_columns("x", d)), axis_columns("u", d)));
        std::vector<ParticleHit> hits;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < paths[i].times.size(); ++k) {
                pw.cell(i).cell(paths[i].times[k]);
                put(pw, paths[i].trajectory[k].x);
                put(pw, paths[i].trajectory[k].u);
                pw.end_row();
                worst = std::max(worst, signed_distance(cfg.domain, paths[i].trajectory[k].x));
            }
            for (const auto& ev : paths[i].events) hits.push_back({i, ev});
        }
        emit("paths.csv", ps.str());
        emit("events.csv", hits_csv(hits, d, "path_id"));
        particle_diagnostics(cfg, hits, nullptr, worst, out.report, "linear.");
    }

    std::vector<Vec> probes() const {
        const int d = cfg.dim();
        const int m = cfg.run.drift_probes;
        std::vector<Vec> p;
        const Vec lo = cfg.domain.box_lo(), hi = cfg.domain.box_hi();
        for (int k = 0; k < m; ++k) {
            // probes along the first axis through the middle of the box
            Vec x(d);
            for (int c = 0; c < d; ++c) x[c] = 0.5 * (lo[c] + hi[c]);
            x[0] = lo[0] + (k + 0.5) * (hi[0] - lo[0]) / m;
            p.push_back(x);
        }
        return p;
    }

    McKeanRun simulate_mckean() {
        const int d = cfg.dim();
        McKeanRunConfig rc;
        rc.horizon = cfg.run.horizon;
        rc.particles = cfg.run.particles;
        rc.seed = seed;
        rc.output_times = cfg.run.output_times;
        rc.drift_probes = probes();
        rc.threads = opts.threads;
        McKeanRun run = run_mckean(cfg.domain, initial_sampler(cfg), cfg.model, cfg.estimator, cfg.step, rc);

        std::ostringstream ss;
        CsvWriter sw(ss, concat(concat({"step", "particle_id"}, axis_columns("x", d)), axis_columns("u", d)));
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& snap : run.snapshots) {
            const auto step = static_cast<std::int64_t>(std::llround(snap.time / cfg.step.h));
            for (std::size_t i = 0; i < snap.states.size(); ++i) {
                sw.cell(step).cell(i);
                put(sw, snap.states[i].x);
                put(sw, snap.states[i].u);
                sw.end_row();
                worst = std::max(worst, signed_distance(cfg.domain, snap.states[i].x));
            }
        }
        emit("snapshots.csv", ss.str());

        std::ostringstream ds;
        CsvWriter dw(ds, concat(concat({"t", "probe_id"}, axis_columns("x", d)), axis_columns("b", d)));
        for (const auto& dp : run.drift) {
            for (std::size_t k = 0; k < dp.values.size(); ++k) {
                dw.cell(dp.time).cell(k);
                put(dw, run.probes[k]);
                put(dw, dp.values[k]);
                dw.end_row();
            }
        }
        emit("drift.csv", ds.str());
        emit("hits.csv", hits_csv(run.hits, d, "particle_id"));
        particle_diagnostics(cfg, run.hits, &run.snapshots, worst, out.report, "mckean.");
        return run;
    }

    struct GridOutcome {
        PhaseGrid grid;
        PicardResult result;
    };

    std::optional<GridOutcome> solve_vfp() {
        DiagnosticsReport& rep = out.report;
        if (cfg.dim() != 1) fail(ErrorKind::ConstraintViolation, "solve-vfp needs an interval domain (d = 1)");
        const PhaseGrid grid = make_grid(cfg);
        const DensityField rho0 = initial_density(cfg, grid);
        PicardOptions po;
        po.tol = cfg.run.picard_tol;
        po.max_iter = cfg.run.picard_max_iter;
        po.alpha = cfg.weight_alpha();
        po.solver.trace_order = cfg.grid.trace_order;
        po.solver.threads = opts.threads;
        po.throw_on_failure = false;
        PicardResult res = picard_nonlinear(grid, rho0, cfg.model, po);
        const GridSolution& sol = res.solution;

        std::vector<int> levels;
        for (double t : cfg.run.output_times)
            levels.push_back(std::clamp(static_cast<int>(std::lround(t / grid.dt())), 0, grid.steps()));
        levels.push_back(grid.steps());
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

        std::ostringstream fs;
        CsvWriter fw(fs, {"t", "x", "u", "rho"});
        for (int n : levels) {
            const DensityField& f = sol.history[static_cast<std::size_t>(n)];
            for (int i = 0; i < grid.nx(); ++i)
                for (int j = 0; j < grid.nu(); ++j) {
                    fw.cell(grid.time(n)).cell(grid.x(i)).cell(grid.u(j)).cell(f.at(i, j));
                    fw.end_row();
                }
        }
        emit("field.csv", fs.str());

        std::ostringstream ts;
        CsvWriter tw(ts, {"t", "wall", "u", "gamma"});
        for (const auto& tr : sol.traces)
            for (int w : {kLeftWall, kRightWall})
                for (int j = 0; j < grid.nu(); ++j) {
                    tw.cell(tr.time).cell(std::string(w == kLeftWall ? "left" : "right")).cell(grid.u(j));
                    tw.cell(tr.gamma(w, j));
                    tw.end_row();
                }
        emit("traces.csv", ts.str());
        emit("picard.json", res.report.to_json());

        const double last = res.report.distances.empty() ? 0.0 : res.report.distances.back();
        rep.add_flag("picard_converged", last, res.report.tol, res.report.converged,
                     std::to_string(res.report.iterations) + " iterates");
        rep.add("no_permeability_residual", no_permeability_residual(grid, sol.traces), 1e-10);
        rep.add("mass_conservation", sol.stats.max_step_mass_change, 1e-10, "max relative change per step");
        const double tg = tol_grid(grid);
        if (cfg.upper && cfg.lower) {
            const SandwichResult sw = sandwich_check(grid, sol.history, lower_envelope(cfg), upper_envelope(cfg));
            rep.add("sandwich_violation", sw.relative, tg, "relative to max upper envelope");
        } else {
            rep.add_skipped("sandwich_violation", "no envelopes configured");
        }
        const EnergyBalance eb = specular_weighted_energy(grid, sol, res.drift, cfg.model.sigma, cfg.weight_alpha());
        rep.add("energy_residual", eb.relative, tg, "weighted energy identity, relative");

        const DensityField psi = sample_field(grid, [&](double x, double u) {
            const double s = std::sin(std::numbers::pi * x / grid.length());
            return s * s * std::exp(-u * u);
        });
        DensityField bump = psi;
        for (int i = 0; i < grid.nx(); ++i)
            for (int j = 0; j < grid.nu(); ++j)
                if (i == 0 || i == grid.nx() - 1 || j == 0 || j == grid.nu() - 1) bump.at(i, j) = 0.0;
        SolverOptions so;
        so.trace_order = cfg.grid.trace_order;
        so.threads = opts.threads;
        const SemigroupCheck sg = semigroup_l2_check(grid, bump, cfg.model.sigma, so);
        rep.add("semigroup_l2_margin", std::max(0.0, -sg.margin) / sg.psi_norm2, tg,
                "margin=" + format_double(sg.margin) + " split_relative=" + format_double(sg.split_relative));
        return GridOutcome{grid, std::move(res)};
    }

    void validate() {
        simulate_linear();
        McKeanRun run = simulate_mckean();
        if (cfg.dim() != 1) {
            out.report.add_skipped("mc_grid_L1", "grid solver needs an interval domain");
            return;
        }
        auto grid = solve_vfp();
        const double dist = mc_grid_distance(cfg.domain, run.snapshots.back(), grid->grid,
                                             grid->result.solution.history.back(), cfg.run.coarsen_x,
                                             cfg.run.coarsen_u);
        out.report.add("mc_grid_L1", dist, cfg.run.mc_grid_tol, "particle histogram vs Picard solution at T");
    }
};

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
    if (name == "simulate-linear") return Subcommand::SimulateLinear;
    if (name == "simulate-mckean") return Subcommand::SimulateMcKean;
    if (name == "solve-vfp") return Subcommand::SolveVfp;
    if (name == "validate") return Subcommand::Validate;
    return std::nullopt;
}

std::string_view to_string(Subcommand s) noexcept {
    switch (s) {
        case Subcommand::SimulateLinear: return "simulate-linear";
        case Subcommand::SimulateMcKean: return "simulate-mckean";
        case Subcommand::SolveVfp: return "solve-vfp";
        case Subcommand::Validate: return "validate";
    }
    return "?";
}

const OutputFile* OutputBundle::find(std::string_view name) const noexcept {
    for (const auto& f : files)
        if (f.name == name) return &f;
    return nullptr;
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

PhaseGrid make_grid(const ScenarioConfig& cfg) {
    require(cfg.dim() == 1, ErrorKind::ConstraintViolation, "grid solver needs an interval domain");
    const double horizon = cfg.run.horizon;
    double vmax = 0.0;
    if (cfg.grid.vmax) {
        vmax = *cfg.grid.vmax;
    } else if (cfg.upper) {
        vmax = velocity_cutoff(upper_envelope(cfg), horizon, cfg.grid.cutoff_rel);
    } else {
        MaxwellianParams heat;
        heat.core = {1.0, cfg.initial.s};
        heat.sigma = cfg.model.sigma;
        vmax = std::abs(cfg.initial.shift) + cfg.model.b.b_norm(1) * horizon +
               velocity_cutoff(heat, horizon, cfg.grid.cutoff_rel);
    }
    const double len = cfg.domain_size();
    const double dt = cfg.grid.dt ? *cfg.grid.dt : cfg.grid.cfl * (len / cfg.grid.nx) / vmax;
    return PhaseGrid(len, cfg.grid.nx, cfg.grid.nu, vmax, dt, horizon);
}

DensityField initial_density(const ScenarioConfig& cfg, const PhaseGrid& grid) {
    const double len = grid.length();
    const double m = cfg.initial.modulation, s = cfg.initial.s, v = cfg.initial.shift;
    return sample_field(grid, [&](double x, double u) {
        return (1.0 + m * std::cos(std::numbers::pi * x / len)) / len * heat_kernel_1d(s, u - v);
    });
}

InitialSampler initial_sampler(const ScenarioConfig& cfg) {
    const Domain dom = cfg.domain;
    const InitialSpec ini = cfg.initial;
    const double len = cfg.domain_size();
    return [dom, ini, len](RngStream& rng) {
        const int d = dom.dimension();
        PhaseState s{Vec(d), Vec(d)};
        if (d == 1) {
            // rejection against the cosine modulation
            const double bound = 1.0 + std::abs(ini.modulation);
            do {
                s.x[0] = len * rng.uniform();
            } while (bound * rng.uniform() > 1.0 + ini.modulation * std::cos(std::numbers::pi * s.x[0] / len));
        } else {
            const Vec lo = dom.box_lo(), hi = dom.box_hi();
            do {
                for (int c = 0; c < d; ++c) s.x[c] = lo[c] + (hi[c] - lo[c]) * rng.uniform();
            } while (!(signed_distance(dom, s.x) < 0.0));
        }
        const double sd = std::sqrt(ini.s);
        for (int c = 0; c < d; ++c) s.u[c] = sd * rng.normal();
        s.u[0] += ini.shift;
        return s;
    };
}

OutputBundle run_scenario(const ScenarioConfig& cfg_in, Subcommand cmd, const RunOptions& opts) {
    ScenarioConfig cfg = cfg_in;
    if (opts.seed) cfg.run.seed = *opts.seed;
    validate_config(cfg);

    OutputBundle out;
    out.report.scenario = cfg.name;
    const std::string canonical = serialize_config(cfg);
    out.files.push_back({"config.json", canonical});

    Pipeline p{cfg, opts, cfg.run.seed, out};
    switch (cmd) {
        case Subcommand::SimulateLinear: p.simulate_linear(); break;
        case Subcommand::SimulateMcKean: p.simulate_mckean(); break;
        case Subcommand::SolveVfp: p.solve_vfp(); break;
        case Subcommand::Validate: p.validate(); break;
    }
    out.files.push_back({"diagnostics.json", out.report.to_json()});

    ojson m;
    m["scenario"] = cfg.name;
    m["subcommand"] = std::string(to_string(cmd));
    m["seed"] = cfg.run.seed;
    m["version"] = CVFP_VERSION;
    m["input_fnv1a"] = hex64(fnv1a(canonical + "\n" + std::string(to_string(cmd))));
    m["all_pass"] = out.report.all_pass();
    ojson files = ojson::array();
    for (const auto& f : out.files)
        files.push_back({{"name", f.name}, {"bytes", f.contents.size()}, {"fnv1a", hex64(fnv1a(f.contents))}});
    m["files"] = files;
    out.files.push_back({"manifest.json", m.dump(2) + "\n"});
    return out;
}

void write_bundle(const OutputBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& f : bundle.files) {
        std::ofstream os(dir / f.name, std::ios::binary | std::ios::trunc);
        os.write(f.contents.data(), static_cast<std::streamsize>(f.contents.size()));
        if (!os) fail(ErrorKind::InvalidArgument, "cannot write " + (dir / f.name).string());
    }
}

}  // namespace cvfp::cli
