#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvfp/mckean.hpp"
#include "cvfp/vfp_solver.hpp"

namespace cvfp {

struct DiagnosticEntry {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

struct DiagnosticsReport {
    std::string scenario;
    std::vector<DiagnosticEntry> entries;

    /// value <= tolerance decides the flag; skipped entries count as passing.
    void add(std::string name, double value, double tolerance, std::string note = {});
    void add_flag(std::string name, double value, double tolerance, bool pass,
                  std::string note = {});
    void add_skipped(std::string name, std::string note);
    bool all_pass() const noexcept;
    std::string to_json() const;
    /// Fixed-width table for terminals.
    std::string summary_table() const;
};

/// max over levels and walls of |int u n gamma du| / int |u| gamma du.
/// Throws DegenerateTrace if some trace carries no flux mass.
double no_permeability_residual(const PhaseGrid& grid, const std::vector<TraceField>& traces);
double no_permeability_residual(const PhaseGrid& grid, const TraceField& trace);

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

struct ShellEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    std::size_t batches = 0;
};

/// E[(U . n) | -2 eps_shell <= signed distance <= 0] pooled over snapshots
/// whose time lies in the window. The standard error uses batch means over
/// snapshots when at least two contribute, otherwise the i.i.d. formula.
ShellEstimate shell_normal_velocity(const Domain& domain, const std::vector<Ensemble>& snapshots,
                                    double eps_shell, TimeWindow window);

struct FluxBalance {
    std::size_t events = 0;         ///< events inside the window
    double max_antisymmetry = 0.0;  ///< max |u_post.n + u_pre.n| over all events
    double windowed_flux = 0.0;     ///< sum of (u_pre.n + u_post.n) in the window
    bool skipped = false;           ///< empty window
    std::optional<ShellEstimate> shell;
};

FluxBalance flux_balance_particles(const Domain& domain, const std::vector<ParticleHit>& hits,
                                   TimeWindow window, const std::vector<Ensemble>* snapshots = nullptr,
                                   double eps_shell = 0.01);

struct HitSymmetry {
    std::size_t first = 0;   ///< hits with normal component n_0 < 0
    std::size_t second = 0;  ///< hits with n_0 > 0
    double chi2 = 0.0;
    double p_value = 1.0;
};

/// Two-sided comparison of hit counts on opposite sides (sign of the first
/// normal component); chi^2 with one degree of freedom.
HitSymmetry hit_side_symmetry(const Domain& domain, const std::vector<ParticleHit>& hits);

struct SemigroupCheck {
    double psi_norm2 = 0.0;    ///< ||psi||^2
    double gamma_norm2 = 0.0;  ///< ||G(T)||^2
    double margin = 0.0;       ///< psi_norm2 - gamma_norm2
    double dissipation = 0.0;  ///< sigma^2 int ||d_u G||^2
    double split_residual = 0.0;
    double split_relative = 0.0;
};

/// Evolves psi by the backward specular problem to the grid horizon.
/// psi must vanish on wall-adjacent cells and on the outer velocity cells.
SemigroupCheck semigroup_l2_check(const PhaseGrid& grid, const DensityField& psi, double sigma,
                                  const SolverOptions& opts = {});

struct SandwichResult {
    double absolute = 0.0;
    double relative = 0.0;  ///< absolute / max over t of max_u upper
    double upper_peak = 0.0;
};

/// max over nodes and levels of max(lower - rho, rho - upper, 0).
SandwichResult sandwich_check(const PhaseGrid& grid, const std::vector<DensityField>& history,
                              const MaxwellianParams& lower, const MaxwellianParams& upper);
SandwichResult sandwich_check(const PhaseGrid& grid, const DensityField& field,
                              const MaxwellianParams& lower, const MaxwellianParams& upper);

/// L1 distance between the normalised particle histogram and the normalised
/// grid density on bins of (coarsen_x x coarsen_u) cells. Particles outside
/// the velocity box count fully toward the distance. Throws BoxMismatch if the
/// domain is not the grid interval or the times disagree.
double mc_grid_distance(const Domain& domain, const Ensemble& particles, const PhaseGrid& grid,
                        const DensityField& field, int coarsen_x = 1, int coarsen_u = 1);

}  // namespace cvfp
