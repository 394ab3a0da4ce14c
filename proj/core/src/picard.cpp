#include "cvfp/picard.hpp"

#include <nlohmann/json.hpp>

namespace cvfp {

std::string PicardReport::to_json() const {
    nlohmann::ordered_json j;
    j["iterates"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < distances.size(); ++k)
        j["iterates"].push_back({{"n", k + 1}, {"distance", distances[k]}});
    j["converged"] = converged;
    j["tol"] = tol;
    return j.dump(2);
}

PicardNotConverged::PicardNotConverged(PicardReport report)
    : Error(ErrorKind::NotConverged,
            "Picard iteration stopped after " + std::to_string(report.iterations) +
                " iterates without reaching tol"),
      report_(std::move(report)) {}

PicardResult picard_nonlinear(const PhaseGrid& grid, const DensityField& rho0,
                              const KineticModel& model, const PicardOptions& opts) {
    model.validate();
    require(opts.tol > 0.0, ErrorKind::InvalidArgument, "tol must be positive");
    require(opts.max_iter >= 1, ErrorKind::InvalidArgument, "max_iter must be at least 1");
    bool nonzero = false;
    for (double v : rho0.values) nonzero = nonzero || v > 0.0;
    require(nonzero, ErrorKind::InvalidInitial, "initial density vanishes identically");

    const int levels = grid.steps() + 1;
    std::vector<DensityField> prev(static_cast<std::size_t>(levels), rho0);
    for (int n = 0; n < levels; ++n) prev[n].time = grid.time(n);

    PicardResult res;
    res.report.tol = opts.tol;
    const bool linear = model.b.kind() == DriftFunction::Kind::Zero;
    for (int it = 1; it <= opts.max_iter; ++it) {
        DriftHistory drift;
        if (!linear) {
            drift.reserve(static_cast<std::size_t>(levels));
            for (const auto& f : prev) drift.push_back(drift_from_density(grid, f, model));
        }
        GridSolution sol = solve_specular_linear(grid, rho0, drift, model.sigma, opts.solver);
        if (opts.observer) opts.observer(it, sol);
        const double dist = v1_distance(grid, sol.history, prev, opts.alpha);
        res.report.distances.push_back(dist);
        res.report.iterations = it;
        prev = sol.history;
        res.solution = std::move(sol);
        res.drift = std::move(drift);
        if (dist < opts.tol) {
            res.report.converged = true;
            break;
        }
    }
    if (!res.report.converged && opts.throw_on_failure) throw PicardNotConverged(res.report);
    return res;
}

}  // namespace cvfp
