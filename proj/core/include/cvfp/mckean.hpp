#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvfp/geometry.hpp"
#include "cvfp/langevin.hpp"
#include "cvfp/rng.hpp"
#include "cvfp/vec.hpp"

namespace cvfp {

/// Bounded velocity field b from a small catalog. Componentwise members act
/// on each coordinate separately.
class DriftFunction {
  public:
    enum class Kind { Zero, Constant, Tanh, Sign, ClippedLinear };

    static DriftFunction zero() { return DriftFunction(Kind::Zero, 0.0, 0.0); }
    /// b(u) = (c, ..., c).
    static DriftFunction constant(double c) { return DriftFunction(Kind::Constant, c, 0.0); }
    /// b_k(u) = tanh(scale * u_k).
    static DriftFunction tanh(double scale) { return DriftFunction(Kind::Tanh, scale, 0.0); }
    static DriftFunction sign() { return DriftFunction(Kind::Sign, 0.0, 0.0); }
    /// b_k(u) = clamp(slope * u_k, -cap, cap).
    static DriftFunction clipped_linear(double slope, double cap) {
        return DriftFunction(Kind::ClippedLinear, slope, cap);
    }

    /// Parses "zero", "constant(c)", "tanh(s)", "sign", "clipped_linear(m, c)".
    static DriftFunction parse(std::string_view text);
    /// Canonical text accepted by parse().
    std::string name() const;

    Kind kind() const noexcept { return kind_; }
    double p1() const noexcept { return p1_; }
    double p2() const noexcept { return p2_; }

    Vec operator()(const Vec& u) const noexcept;
    double component(double u) const noexcept;
    /// sup |b| over R^dim (Euclidean norm).
    double b_norm(int dim) const noexcept;
    /// b(-u) = -b(u) for every u.
    bool is_odd() const noexcept { return kind_ != Kind::Constant || p1_ == 0.0; }

  private:
    DriftFunction(Kind k, double p1, double p2);
    Kind kind_;
    double p1_, p2_;
};

struct KineticModel {
    double sigma = 1.0;
    DriftFunction b = DriftFunction::zero();
    void validate() const;
};

enum class KernelKind { Gaussian, Epanechnikov };

struct DriftEstimatorConfig {
    /// Per-axis bandwidth; unset selects 1.06 std(X_k) N^(-1/5).
    std::optional<double> bandwidth;
    KernelKind kernel = KernelKind::Gaussian;
    /// Unset selects 1e-6 N K(0).
    std::optional<double> min_mass;
    /// Ensembles up to this size use the exact O(N) sum per query; larger
    /// ones use linear binning with a separable convolution.
    std::size_t exact_max_particles = 2000;
    /// Bin spacing as a fraction of the bandwidth for the binned estimator.
    double bins_per_bandwidth = 4.0;
    void validate() const;
};

/// One-dimensional kernel profile with unit integral; the d-dimensional
/// kernel is the product over axes.
double kernel_1d(KernelKind kind, double z) noexcept;
double kernel_support(KernelKind kind) noexcept;

struct Ensemble {
    std::vector<PhaseState> states;
    double time = 0.0;
};

/// Bandwidths and mass floor after defaults are applied to an ensemble.
struct ResolvedEstimator {
    Vec bandwidth;
    double min_mass = 0.0;
    KernelKind kernel = KernelKind::Gaussian;
};
ResolvedEstimator resolve_estimator(const Domain& domain, const std::vector<PhaseState>& states,
                                    const DriftEstimatorConfig& cfg);

/// Exact Nadaraya-Watson estimate of E[b(U) | X = x]; zero below min_mass.
Vec conditional_drift(const Ensemble& ensemble, const KineticModel& model,
                      const DriftEstimatorConfig& cfg, const Vec& x, const Domain& domain);
Vec conditional_drift(const std::vector<PhaseState>& states, const KineticModel& model,
                      const ResolvedEstimator& est, const Vec& x);

/// Drift estimate frozen on a snapshot of the ensemble. Every query is a
/// convex combination of b values, so its norm never exceeds b_norm.
class DriftField {
  public:
    DriftField(const Domain& domain, const std::vector<PhaseState>& snapshot,
               const KineticModel& model, const DriftEstimatorConfig& cfg);
    Vec operator()(const Vec& x) const;
    const ResolvedEstimator& estimator() const noexcept { return est_; }
    bool binned() const noexcept { return binned_; }

  private:
    int dim_ = 1;
    ResolvedEstimator est_;
    bool binned_ = false;
    // exact mode
    std::vector<PhaseState> snapshot_;
    KineticModel model_;
    // binned mode: node lattice, convolved mass and numerator per node
    Vec lo_, step_;
    std::array<int, kMaxDim> nodes_{};
    std::vector<double> den_;
    std::vector<double> num_;  // dim_ values per node
};

struct ParticleHit {
    std::size_t particle = 0;
    HitEvent event;
};

struct McKeanStepResult {
    std::vector<ParticleHit> hits;
};

/// Synchronous step over `duration` (default params.h): drift frozen on the
/// snapshot at step start, kick u += duration * B(x_i), then a confined step.
McKeanStepResult mckean_step(const Domain& domain, Ensemble& ensemble, const KineticModel& model,
                             const DriftEstimatorConfig& cfg, const StepParams& params,
                             std::vector<RngStream>& streams, int threads = 1,
                             std::optional<double> duration = std::nullopt);

using InitialSampler = std::function<PhaseState(RngStream&)>;

struct DriftProbeSnapshot {
    double time = 0.0;
    std::vector<Vec> values;
};

struct McKeanRun {
    std::vector<Ensemble> snapshots;
    std::vector<ParticleHit> hits;
    std::vector<DriftProbeSnapshot> drift;
    std::vector<Vec> probes;
};

struct McKeanRunConfig {
    double horizon = 1.0;
    std::size_t particles = 1000;
    std::uint64_t seed = 0;
    /// Snapshot times; each is taken at the first step end reaching it.
    /// The final time is always included.
    std::vector<double> output_times;
    std::vector<Vec> drift_probes;
    int threads = 1;
};

/// Particle i draws its initial state and its noise from RngStream(seed, i).
McKeanRun run_mckean(const Domain& domain, const InitialSampler& sampler,
                     const KineticModel& model, const DriftEstimatorConfig& cfg,
                     const StepParams& params, const McKeanRunConfig& run);

}  // namespace cvfp
