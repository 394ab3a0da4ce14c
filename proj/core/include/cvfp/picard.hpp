#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cvfp/error.hpp"
#include "cvfp/vfp_solver.hpp"

namespace cvfp {

struct PicardReport {
    int iterations = 0;              ///< index n of the last computed iterate
    std::vector<double> distances;   ///< distances[k] = |rho^(k+1) - rho^(k)| in V1(omega)
    bool converged = false;
    double tol = 0.0;

    /// {"iterates": [{"n": 1, "distance": ...}, ...], "converged": ..., "tol": ...}
    std::string to_json() const;
};

/// Raised when max_iter is reached; the partial report is attached.
class PicardNotConverged : public Error {
  public:
    explicit PicardNotConverged(PicardReport report);
    const PicardReport& report() const noexcept { return report_; }

  private:
    PicardReport report_;
};

struct PicardOptions {
    double tol = 1e-6;
    int max_iter = 20;
    double alpha = 3.0;  ///< weight exponent of the V1(omega) distance
    SolverOptions solver;
    bool throw_on_failure = true;
    /// Called with (n, iterate) after each solve.
    std::function<void(int, const GridSolution&)> observer;
};

struct PicardResult {
    GridSolution solution;  ///< last iterate
    DriftHistory drift;     ///< drift that produced the last iterate
    PicardReport report;
};

/// rho^(0) = rho0 at every level; rho^(n) solves the specular problem with the
/// drift of rho^(n-1) frozen level by level.
PicardResult picard_nonlinear(const PhaseGrid& grid, const DensityField& rho0,
                              const KineticModel& model, const PicardOptions& opts = {});

}  // namespace cvfp
