#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cvfp/geometry.hpp"
#include "cvfp/langevin.hpp"
#include "cvfp/maxwellian.hpp"
#include "cvfp/mckean.hpp"

namespace cvfp::cli {

/// rho0(x, u) = c(x) G(s, u - shift e_1) with c uniform on the domain; on an
/// interval c(x) is proportional to 1 + modulation cos(pi x / L).
struct InitialSpec {
    double s = 0.5;
    double shift = 0.0;
    double modulation = 0.0;
};

/// Either explicit {kappa, s} or a spread (s_wide for the upper envelope,
/// s_narrow for the lower) from which the core is fitted to the initial data.
struct EnvelopeSpec {
    double mu = 1.0;
    double a = 0.0;
    std::optional<double> kappa;
    std::optional<double> s;
    std::optional<double> spread;
};

struct GridSpec {
    int nx = 64;
    int nu = 128;
    /// Unset: cutoff of the upper envelope (or of the free Gaussian).
    std::optional<double> vmax;
    /// Unset: dt = cfl * dx / vmax.
    std::optional<double> dt;
    double cfl = 1.0;
    double cutoff_rel = 1e-10;
    int trace_order = 1;
};

struct RunSpec {
    double horizon = 0.5;
    std::size_t particles = 10000;
    std::size_t paths = 16;
    std::uint64_t seed = 0;
    std::vector<double> output_times;
    int drift_probes = 33;
    double picard_tol = 1e-6;
    int picard_max_iter = 20;
    /// Shell half-width as a fraction of the domain size (L or outer radius).
    double eps_shell = 0.01;
    int coarsen_x = 8;
    int coarsen_u = 8;
    double mc_grid_tol = 0.05;
    std::string out = "out";
};

struct ScenarioConfig {
    std::string name = "scenario";
    Domain domain = Domain::interval(1.0);
    KineticModel model;
    InitialSpec initial;
    StepParams step = StepParams::with_defaults(0.01);
    GridSpec grid;
    DriftEstimatorConfig estimator;
    std::optional<double> alpha;
    std::optional<EnvelopeSpec> upper;
    std::optional<EnvelopeSpec> lower;
    RunSpec run;

    int dim() const noexcept { return domain.dimension(); }
    double weight_alpha() const;
    /// Characteristic size: L for an interval, the (outer) radius otherwise.
    double domain_size() const;
};

/// Parses and validates a JSON document. Throws ParseError for malformed
/// input, wrong types or unknown keys, ConstraintViolation for values outside
/// their admissible range.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Canonical JSON: fixed key order, every default spelled out.
std::string serialize_config(const ScenarioConfig& cfg);

/// Checks the cross-field constraints (weight exponent, envelope exponents
/// and rates, grid shape).
void validate_config(const ScenarioConfig& cfg);

/// Envelopes resolved against the initial data; only defined for intervals.
MaxwellianParams upper_envelope(const ScenarioConfig& cfg);
MaxwellianParams lower_envelope(const ScenarioConfig& cfg);

}  // namespace cvfp::cli
