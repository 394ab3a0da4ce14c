#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvfp/diagnostics.hpp"
#include "cvfp/error.hpp"
#include "cvfp/vfp_solver.hpp"

using namespace cvfp;

namespace {

double gauss(double var, double u) { return std::exp(-u * u / (2 * var)) / std::sqrt(2 * M_PI * var); }

PhaseGrid make_grid(int n, double vmax, double horizon, double length = 1.0) {
    const double dx = length / n;
    return PhaseGrid(length, n, 2 * n, vmax, dx / vmax, horizon);
}

// Uniform-in-x Gaussian in u: the specular problem reduces to the heat
// equation in u with variance s0 + sigma^2 t.
double analytic_error(int n) {
    const double s0 = 0.25, sigma = 1.0, T = 0.2;
    const PhaseGrid g = make_grid(n, 6.0, T);
    const auto f0 = sample_field(g, [&](double, double u) { return gauss(s0, u); });
    const auto sol = solve_specular_linear(g, f0, {}, sigma);
    const auto& fT = sol.history.back();
    double err = 0;
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.nu(); ++j)
            err = std::max(err, std::abs(fT.at(i, j) - gauss(s0 + sigma * sigma * T, g.u(j))));
    return err;
}

}  // namespace

TEST_SUITE("vfp_grid") {

TEST_CASE("velocity nodes come in exact mirror pairs") {
    const PhaseGrid g(1.0, 10, 38, 7.3, 0.01, 0.5);
    for (int j = 0; j < g.nu(); ++j) CHECK(g.u(g.mirror(j)) == -g.u(j));
    CHECK(g.u(0) == doctest::Approx(-7.3 + g.du() / 2));
    CHECK(g.steps() == 50);
    CHECK(g.time(g.steps()) == 0.5);
    CHECK_THROWS_AS(PhaseGrid(1.0, 10, 37, 1.0, 0.01, 1.0), Error);
    CHECK_THROWS_AS(PhaseGrid(-1.0, 10, 38, 1.0, 0.01, 1.0), Error);
}

TEST_CASE("CFL check") {
    PhaseGrid ok(1.0, 10, 20, 5.0, 0.02, 0.1);
    CHECK_NOTHROW(ok.check_cfl());
    PhaseGrid bad(1.0, 10, 20, 5.0, 0.03, 0.09);
    try {
        bad.check_cfl();
        FAIL("expected CFLViolated");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CFLViolated);
    }
    const DensityField f(bad);
    CHECK_THROWS_AS(solve_specular_linear(bad, f, {}, 1.0), Error);
}

TEST_CASE("velocity cutoff bounds the envelope tail") {
    MaxwellianParams p;
    p.core = {1.0, 0.5};
    const double v = velocity_cutoff(p, 1.0);
    // the tail peaks at T (variance 1.5), the centre at t = 0 (variance 0.5)
    CHECK(v == doctest::Approx(std::sqrt(3.0 * std::log(1e10 / std::sqrt(3.0)))).epsilon(2e-3));
}

TEST_CASE("zero data stays zero") {
    const PhaseGrid g = make_grid(16, 4.0, 0.1);
    const DensityField f0(g);
    const auto a = solve_specular_linear(g, f0, {}, 1.0);
    const auto b = solve_linear_inflow(g, f0, [](double, int, double) { return 0.0; }, 1.0);
    for (const auto& s : {a, b})
        for (const auto& h : s.history) CHECK(h.max() == 0.0);
}

TEST_CASE("specular solver conserves mass with drift and keeps traces even") {
    // the box edge sits far enough out that diffusion leaks nothing measurable
    const PhaseGrid g = make_grid(32, 9.0, 0.3);
    const auto f0 = sample_field(g, [](double x, double u) {
        return (1 + 0.5 * std::cos(M_PI * x)) * gauss(0.3, u - 0.8);
    });
    const KineticModel m{1.0, DriftFunction::tanh(1.0)};
    DriftHistory drift;
    for (int n = 0; n <= g.steps(); ++n) drift.push_back(drift_from_density(g, f0, m));
    const auto sol = solve_specular_linear(g, f0, drift, 1.0);
    REQUIRE(sol.history.size() == static_cast<std::size_t>(g.steps() + 1));
    const double m0 = f0.mass(g);
    for (const auto& h : sol.history) CHECK(std::abs(h.mass(g) - m0) <= 1e-10 * m0);
    CHECK(sol.stats.max_step_mass_change <= 1e-10);
    CHECK(sol.stats.min_value >= 0.0);
    for (const auto& tr : sol.traces)
        for (int w : {kLeftWall, kRightWall})
            for (int j = 0; j < g.nu(); ++j) CHECK(tr.gamma(w, j) == tr.gamma(w, g.mirror(j)));
    CHECK(no_permeability_residual(g, sol.traces) <= 1e-10);
}

TEST_CASE("uniform Gaussian solution converges") {
    const double e32 = analytic_error(32), e64 = analytic_error(64), e128 = analytic_error(128);
    CHECK(e64 < e32);
    CHECK(e128 < e64);
    CHECK(e128 <= 5e-3);
}

TEST_CASE("drift from density examples") {
    const PhaseGrid g(1.0, 8, 8, 2.0, 0.1, 0.1);
    const KineticModel m{1.0, DriftFunction::tanh(1.0)};
    DensityField f(g);
    f.at(0, 6) = 2.0;  // single positive velocity
    f.at(1, 2) = 1.0;  // even column
    f.at(1, g.mirror(2)) = 1.0;
    const auto b = drift_from_density(g, f, m);
    CHECK(b[0] == doctest::Approx(std::tanh(g.u(6))).epsilon(1e-14));
    CHECK(b[1] == 0.0);
    for (int i = 2; i < g.nx(); ++i) CHECK(b[i] == 0.0);
}

TEST_CASE("weighted norms of a separable field") {
    const PhaseGrid g(2.0, 8, 400, 10.0, 0.01, 0.01);
    const auto f = sample_field(g, [](double, double u) { return gauss(1.0, u); });
    // alpha = 0: omega = 1, int f^2 = L / (2 sqrt(pi))
    CHECK(weighted_l2_squared(g, f, 0.0) == doctest::Approx(2.0 / (2 * std::sqrt(M_PI))).epsilon(1e-6));
    // int (d_u f)^2 = L / (4 sqrt(pi)) for unit variance
    CHECK(weighted_grad_squared(g, f, 0.0) == doctest::Approx(2.0 / (4 * std::sqrt(M_PI))).epsilon(1e-3));
    const std::vector<DensityField> hist{f, f};
    const auto wn = weighted_norms(g, hist, 0.0);
    CHECK(wn.sup_l2 == doctest::Approx(weighted_l2_squared(g, f, 0.0)));
    CHECK(wn.grad_integral == doctest::Approx(0.01 * weighted_grad_squared(g, f, 0.0)));
    CHECK(v1_distance(g, hist, hist, 3.0) == 0.0);
}

TEST_CASE("positivity and monotone mass for the inflow problem") {
    const PhaseGrid g = make_grid(32, 5.0, 0.2);
    const auto f0 = sample_field(g, [](double x, double u) { return std::sin(M_PI * x) * gauss(0.5, u); });
    const InflowData q = [](double t, int, double u) { return (1 + t) * gauss(0.4, u); };
    const auto sol = solve_linear_inflow(g, f0, q, 1.0);
    for (const auto& h : sol.history) CHECK(h.min() >= 0.0);
    const auto mb = inflow_mass_balance(g, sol);
    CHECK(mb.excess <= 1e-10 * mb.rhs);
    const auto eb = inflow_energy_balance(g, sol, 1.0);
    CHECK(eb.relative <= 5e-2);
    // outgoing traces carry the boundary data
    const auto& tr = sol.traces.back();
    for (int j = 0; j < g.nu(); ++j) {
        if (g.u(j) > 0) CHECK(tr.gamma_plus[kRightWall][j] == doctest::Approx(q(g.horizon(), kRightWall, g.u(j))));
        if (g.u(j) < 0) CHECK(tr.gamma_plus[kLeftWall][j] == doctest::Approx(q(g.horizon(), kLeftWall, g.u(j))));
    }
}

TEST_CASE("backward energy identity and threads") {
    const PhaseGrid g = make_grid(32, 5.0, 0.2);
    const auto psi = sample_field(g, [](double x, double u) {
        return std::sin(M_PI * x) * std::sin(M_PI * x) * std::exp(-u * u);
    });
    const auto a = solve_specular_backward(g, psi, 1.0);
    const auto eb = backward_energy_balance(g, a, 1.0);
    CHECK(eb.relative <= 5e-2);
    CHECK(a.history.back().mass(g) <= psi.mass(g) * (1 + 1e-10));
    SolverOptions opts;
    opts.threads = 3;
    const auto b = solve_specular_backward(g, psi, 1.0, opts);
    CHECK(a.history.back().values == b.history.back().values);
}

}
