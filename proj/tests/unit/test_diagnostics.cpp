#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "cvfp/diagnostics.hpp"
#include "cvfp/error.hpp"

using namespace cvfp;

namespace {

TraceField blank(const PhaseGrid& g) {
    TraceField t;
    for (int w : {0, 1}) {
        t.gamma_plus[w].assign(g.nu(), 0.0);
        t.gamma_minus[w].assign(g.nu(), 0.0);
    }
    return t;
}

ParticleHit hit(double t, Vec loc, Vec pre, Vec post) { return {0, HitEvent{t, loc, pre, post}}; }

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("report bookkeeping") {
    DiagnosticsReport r;
    r.scenario = "demo";
    r.add("a", 0.5, 1.0);
    r.add_skipped("b", "no events");
    CHECK(r.all_pass());
    r.add("c", 2.0, 1.0);
    CHECK_FALSE(r.all_pass());
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["scenario"] == "demo");
    CHECK(r.summary_table().find("FAIL") != std::string::npos);
}

TEST_CASE("no-permeability residual examples") {
    const PhaseGrid g(1.0, 8, 8, 2.0, 0.1, 0.1);
    TraceField even = blank(g);
    for (int w : {0, 1})
        for (int j = 0; j < g.nu(); ++j) {
            const double v = std::exp(-g.u(j) * g.u(j));
            (g.u(j) * wall_normal(w) > 0 ? even.gamma_plus : even.gamma_minus)[w][j] = v;
        }
    CHECK(no_permeability_residual(g, even) == 0.0);

    TraceField one_sided = blank(g);
    for (int w : {0, 1})
        for (int j = 0; j < g.nu(); ++j)
            if (g.u(j) * wall_normal(w) > 0) one_sided.gamma_plus[w][j] = 1.0;
    CHECK(no_permeability_residual(g, one_sided) == doctest::Approx(1.0));

    try {
        no_permeability_residual(g, blank(g));
        FAIL("expected DegenerateTrace");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateTrace);
    }
}

TEST_CASE("particle flux balance") {
    const Domain iv = Domain::interval(1.0);
    std::vector<ParticleHit> hits{hit(0.1, Vec{1.0}, Vec{2.0}, Vec{-2.0}),
                                  hit(0.6, Vec{0.0}, Vec{-0.5}, Vec{0.5})};
    const auto fb = flux_balance_particles(iv, hits, {0.0, 1.0});
    CHECK(fb.events == 2);
    CHECK(fb.max_antisymmetry == 0.0);
    CHECK(fb.windowed_flux == 0.0);
    CHECK_FALSE(fb.skipped);
    CHECK(flux_balance_particles(iv, hits, {0.7, 0.9}).skipped);
    const auto sym = hit_side_symmetry(iv, hits);
    CHECK(sym.first == 1);
    CHECK(sym.second == 1);
    CHECK(sym.p_value == doctest::Approx(1.0));
}

TEST_CASE("shell estimate on a symmetric ensemble") {
    const Domain iv = Domain::interval(1.0);
    Ensemble e;
    e.time = 0.5;
    for (double u : {-1.0, 1.0, -2.0, 2.0}) {
        e.states.push_back({Vec{0.995}, Vec{u}});
        e.states.push_back({Vec{0.005}, Vec{u}});
    }
    e.states.push_back({Vec{0.5}, Vec{9.0}});  // outside the shell
    const auto s = shell_normal_velocity(iv, {e}, 0.01, {0.0, 1.0});
    CHECK(s.samples == 8);
    CHECK(s.mean == 0.0);
}

TEST_CASE("sandwich examples") {
    const PhaseGrid g(1.0, 8, 40, 6.0, 0.1, 0.2);
    MaxwellianParams up;
    up.core = {1.0, 0.5};
    MaxwellianParams lo = up;
    lo.core.kappa = 0.5;
    const auto lower = sample_field(g, [&](double, double u) { return maxwellian_eval_1d(lo, 0.0, u); });
    CHECK(sandwich_check(g, lower, lo, up).absolute == 0.0);
    const auto above = sample_field(g, [&](double, double u) { return 1.1 * maxwellian_eval_1d(up, 0.0, u); });
    const auto r = sandwich_check(g, above, lo, up);
    double node_peak = 0;
    for (int j = 0; j < g.nu(); ++j) node_peak = std::max(node_peak, maxwellian_eval_1d(up, 0.0, g.u(j)));
    CHECK(r.absolute == doctest::Approx(0.1 * node_peak).epsilon(1e-9));
    CHECK(r.relative == doctest::Approx(0.1 * node_peak / maxwellian_peak(up, 0.0)).epsilon(1e-9));
}

TEST_CASE("particle grid distance") {
    const PhaseGrid g(1.0, 8, 16, 4.0, 0.05, 0.1);
    const Domain iv = Domain::interval(1.0);
    DensityField f(g, 0.1);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j) f.at(i, j) = 1.0;  // left half, negative velocities
    Ensemble far;
    far.time = 0.1;
    far.states.assign(100, PhaseState{Vec{0.9}, Vec{3.0}});
    CHECK(mc_grid_distance(iv, far, g, f) == doctest::Approx(2.0));

    Ensemble same;
    same.time = 0.1;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j) same.states.push_back({Vec{g.x(i)}, Vec{g.u(j)}});
    CHECK(mc_grid_distance(iv, same, g, f) == doctest::Approx(0.0).epsilon(1e-12));

    Ensemble sampled;
    sampled.time = 0.1;
    RngStream r(1, 0);
    for (int k = 0; k < 200000; ++k)
        sampled.states.push_back({Vec{0.5 * r.uniform()}, Vec{-4.0 * r.uniform()}});
    CHECK(mc_grid_distance(iv, sampled, g, f, 2, 2) <= 0.02);

    Ensemble late = same;
    late.time = 0.2;
    CHECK_THROWS_AS(mc_grid_distance(iv, late, g, f), Error);
    CHECK_THROWS_AS(mc_grid_distance(Domain::interval(2.0), same, g, f), Error);
}

TEST_CASE("semigroup check scales quadratically") {
    const PhaseGrid g(1.0, 16, 32, 5.0, 1.0 / 80, 0.1);
    const auto psi = sample_field(g, [&](double x, double u) {
        return std::pow(std::sin(M_PI * x), 2) * std::exp(-u * u);
    });
    DensityField bump = psi;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.nu(); ++j)
            if (i == 0 || i == g.nx() - 1 || j == 0 || j == g.nu() - 1) bump.at(i, j) = 0.0;
    const auto a = semigroup_l2_check(g, bump, 1.0);
    CHECK(a.margin >= 0.0);
    DensityField twice = bump;
    for (auto& v : twice.values) v *= 2;
    const auto b = semigroup_l2_check(g, twice, 1.0);
    CHECK(b.psi_norm2 == doctest::Approx(4 * a.psi_norm2));
    CHECK(b.gamma_norm2 == doctest::Approx(4 * a.gamma_norm2));
    const auto z = semigroup_l2_check(g, DensityField(g), 1.0);
    CHECK(z.margin == 0.0);
    CHECK_THROWS_AS(semigroup_l2_check(g, psi, 1.0), Error);
}

}
