#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cvfp/geometry.hpp"
#include "cvfp/rng.hpp"
#include "cvfp/vec.hpp"

namespace cvfp {

struct PhaseState {
    Vec x;
    Vec u;
};

/// One specular collision: position on the boundary, velocity just before and
/// just after the jump.
struct HitEvent {
    double time = 0.0;
    Vec location;
    Vec pre_velocity;
    Vec post_velocity;
};

struct StepParams {
    double h = 1e-2;
    double h_min = 1e-2 / 256.0;
    double eps_hit = 1e-10;
    /// Distance from the wall below which a macro step is refined. Unset means
    /// the three-sigma free-flight reach |u| h + 3 sigma h^(3/2) of the state.
    std::optional<double> delta_near;
    int max_hits = 10000;

    /// h_min = h / 2^8, reach-based delta_near, watchdog 10^4.
    static StepParams with_defaults(double h);
    void validate() const;
};

/// Exact draw of the free flow dx = u dt, du = sigma dW over a step h.
PhaseState free_step(const PhaseState& s, double h, double sigma, RngStream& rng);

/// Moments of the free flow used by free_step and by the bridge.
struct FreeFlowCovariance {
    double xx, xu, uu;
};
FreeFlowCovariance free_flow_covariance(double h, double sigma) noexcept;

/// Midpoint of the integrated-Brownian pair conditioned on both endpoints.
PhaseState bridge_midpoint(const PhaseState& a, const PhaseState& b, double h, double sigma,
                           RngStream& rng);

struct BridgeMoments {
    double mean_x, mean_u;  ///< conditional mean of one component
    double cxx, cxu, cuu;   ///< conditional covariance of one component
};
/// Conditional law of one component at t + h/2 given (x_a, u_a) and (x_b, u_b).
BridgeMoments bridge_moments(double xa, double ua, double xb, double ub, double h,
                             double sigma) noexcept;

struct ConfinedStepResult {
    PhaseState state;
    std::vector<HitEvent> hits;
};

/// Advances one macro step of length params.h from time t0, detecting wall
/// hits by bridge refinement and reflecting specularly.
ConfinedStepResult confined_step(const Domain& domain, const PhaseState& state,
                                 const StepParams& params, double sigma, RngStream& rng,
                                 double t0 = 0.0);

/// Same as confined_step but over an explicit duration (used for the last,
/// possibly shorter, step of a horizon).
ConfinedStepResult confined_advance(const Domain& domain, const PhaseState& state, double duration,
                                    const StepParams& params, double sigma, RngStream& rng,
                                    double t0 = 0.0);

struct PathResult {
    std::vector<double> times;
    std::vector<PhaseState> trajectory;
    std::vector<HitEvent> events;
};

/// Throws InvalidStart for exterior starts or boundary starts whose velocity
/// is not incoming (outgoing starts must be pre-reflected by the caller).
void check_admissible_start(const Domain& domain, const PhaseState& s, double eps_hit);

PathResult simulate_path(const Domain& domain, const PhaseState& initial, double horizon,
                         const StepParams& params, double sigma, RngStream& rng);

using PhaseFunction = std::function<double(const Vec& x, const Vec& u)>;

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of E[psi(X_t, U_t)] for the confined process started
/// at `initial`. Sample i uses RngStream(seed, i).
MonteCarloEstimate semigroup_estimate(const Domain& domain, const PhaseFunction& psi, double t,
                                      const PhaseState& initial, std::size_t samples,
                                      const StepParams& params, double sigma, std::uint64_t seed,
                                      int threads = 1);

}  // namespace cvfp
