#pragma once

#include <functional>
#include <vector>

#include "cvfp/mckean.hpp"
#include "cvfp/phase_grid.hpp"

namespace cvfp {

struct SolverOptions {
    /// Wall extrapolation order for outgoing traces: 0 (cell value) or 1
    /// (one-sided linear, clamped at zero).
    int trace_order = 1;
    int threads = 1;
};

struct SolverStats {
    std::vector<double> mass;      ///< total mass per time level
    std::vector<double> mass_in;   ///< cumulative wall inflow per level (inflow problem)
    std::vector<double> mass_out;  ///< cumulative wall outflow per level (inflow problem)
    double max_step_mass_change = 0.0;  ///< max relative change between levels
    double clamped_total = 0.0;         ///< sum of |negative round-off| set to zero
    double min_value = 0.0;
};

struct GridSolution {
    std::vector<DensityField> history;  ///< levels 0..steps
    std::vector<TraceField> traces;     ///< levels 0..steps
    SolverStats stats;
};

/// Wall data q(t, wall, u) prescribed on the outgoing set.
using InflowData = std::function<double(double t, int wall, double u)>;

/// Per-level drift on x-nodes: drift[n][i] = B(t_n, x_i). An empty history
/// means B = 0.
using DriftHistory = std::vector<std::vector<double>>;

/// d_t f - u d_x f - sigma^2/2 d_uu f = 0 with f = q on the outgoing set and
/// traces read on the incoming set.
GridSolution solve_linear_inflow(const PhaseGrid& grid, const DensityField& f0,
                                 const InflowData& q, double sigma,
                                 const SolverOptions& opts = {});

/// d_t f + u d_x f + B d_u f - sigma^2/2 d_uu f = 0 with specular walls.
GridSolution solve_specular_linear(const PhaseGrid& grid, const DensityField& rho0,
                                   const DriftHistory& drift, double sigma,
                                   const SolverOptions& opts = {});

/// Backward semigroup d_t G - u d_x G - sigma^2/2 d_uu G = 0 with specular
/// walls and G(0) = psi.
GridSolution solve_specular_backward(const PhaseGrid& grid, const DensityField& psi, double sigma,
                                     const SolverOptions& opts = {});

/// Wall traces of one field. Outgoing nodes (relative to transport velocity
/// `sign * u`) are extrapolated from the interior; incoming nodes take the
/// specular image or, when `inflow` is set, the prescribed data.
TraceField trace_extract(const PhaseGrid& grid, const DensityField& f, double sign,
                         int trace_order, const InflowData* inflow = nullptr);

/// B(x_i) = sum_j b(u_j) rho_ij / sum_j rho_ij; zero for columns below the
/// mass floor. Sums run over mirror pairs.
std::vector<double> drift_from_density(const PhaseGrid& grid, const DensityField& field,
                                       const KineticModel& model);

struct WeightedNorms {
    double sup_l2 = 0.0;        ///< max_t of int omega f^2
    double grad_integral = 0.0; ///< int_0^T int omega |d_u f|^2
    double v1 = 0.0;            ///< sqrt(sup_l2 + grad_integral)
};

/// Weighted L2 of one field, int omega f^2 dx du.
double weighted_l2_squared(const PhaseGrid& grid, const DensityField& f, double alpha);
/// int omega |d_u f|^2 dx du with centred differences and zero ghosts.
double weighted_grad_squared(const PhaseGrid& grid, const DensityField& f, double alpha);
WeightedNorms weighted_norms(const PhaseGrid& grid, const std::vector<DensityField>& history,
                             double alpha);
/// Discrete V1(omega) distance between two histories on the same grid.
double v1_distance(const PhaseGrid& grid, const std::vector<DensityField>& a,
                   const std::vector<DensityField>& b, double alpha);

struct EnergyBalance {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  ///< |lhs - rhs|
    double relative = 0.0;  ///< residual / rhs
};

/// Discrete form of ||f(T)||^2 + ||f||^2_{S-} + sigma^2 ||d_u f||^2
///   = ||f0||^2 + ||q||^2_{S+}; boundary and gradient terms by the trapezoid
/// rule over the time levels.
EnergyBalance inflow_energy_balance(const PhaseGrid& grid, const GridSolution& sol,
                                    double sigma);

struct MassBalance {
    double lhs = 0.0;     ///< ||f(T)||_1 + outflow
    double rhs = 0.0;     ///< ||f0||_1 + inflow
    double excess = 0.0;  ///< max over levels of (lhs - rhs), <= 0 up to round-off
};
MassBalance inflow_mass_balance(const PhaseGrid& grid, const GridSolution& sol);

/// Weighted identity for the specular problem:
/// ||f(T)||^2_w + sigma^2 int ||d_u f||^2_w
///   = ||f0||^2_w + int (sigma^2/2 w'' + w' B) f^2.
EnergyBalance specular_weighted_energy(const PhaseGrid& grid, const GridSolution& sol,
                                       const DriftHistory& drift, double sigma, double alpha);

/// ||G(T)||^2 + sigma^2 int ||d_u G||^2 = ||psi||^2 for the backward problem.
EnergyBalance backward_energy_balance(const PhaseGrid& grid, const GridSolution& sol,
                                      double sigma);

}  // namespace cvfp
