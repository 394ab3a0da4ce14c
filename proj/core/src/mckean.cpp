#include "cvfp/mckean.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "cvfp/error.hpp"
#include "cvfp/parallel.hpp"

namespace cvfp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view s, std::string_view context) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        fail(ErrorKind::ParseError,
             "bad number '" + std::string(s) + "' in drift '" + std::string(context) + "'");
    return v;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Vec clamp_to_norm(Vec v, double bound) {
    const double n = norm(v);
    if (n > bound && n > 0.0) v *= bound / n;
    return v;
}

constexpr double kGaussianSupport = 6.0;

}  // namespace

DriftFunction::DriftFunction(Kind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {
    require(std::isfinite(p1) && std::isfinite(p2), ErrorKind::InvalidArgument,
            "drift parameters must be finite");
    if (k == Kind::ClippedLinear)
        require(p2 >= 0.0, ErrorKind::InvalidArgument, "clipped_linear cap must be >= 0");
}

DriftFunction DriftFunction::parse(std::string_view text) {
    const std::string_view t = trim(text);
    const auto open = t.find('(');
    const std::string_view head = trim(t.substr(0, open));
    std::vector<double> args;
    if (open != std::string_view::npos) {
        if (t.back() != ')')
            fail(ErrorKind::ParseError, "unbalanced parentheses in drift '" + std::string(t) + "'");
        std::string_view inner = t.substr(open + 1, t.size() - open - 2);
        while (true) {
            const auto comma = inner.find(',');
            args.push_back(parse_number(inner.substr(0, comma), t));
            if (comma == std::string_view::npos) break;
            inner.remove_prefix(comma + 1);
        }
    }
    const auto want = [&](std::size_t n) {
        if (args.size() != n)
            fail(ErrorKind::ParseError, "drift '" + std::string(head) + "' takes " +
                                            std::to_string(n) + " argument(s)");
    };
    if (head == "zero") return want(0), zero();
    if (head == "sign") return want(0), sign();
    if (head == "constant") return want(1), constant(args[0]);
    if (head == "tanh") return want(1), tanh(args[0]);
    if (head == "clipped_linear") return want(2), clipped_linear(args[0], args[1]);
    fail(ErrorKind::ParseError, "unknown drift '" + std::string(t) + "'");
}

std::string DriftFunction::name() const {
    switch (kind_) {
        case Kind::Zero: return "zero";
        case Kind::Sign: return "sign";
        case Kind::Constant: return "constant(" + format_number(p1_) + ")";
        case Kind::Tanh: return "tanh(" + format_number(p1_) + ")";
        case Kind::ClippedLinear:
            return "clipped_linear(" + format_number(p1_) + ", " + format_number(p2_) + ")";
    }
    return "zero";
}

double DriftFunction::component(double u) const noexcept {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return p1_;
        case Kind::Tanh: return std::tanh(p1_ * u);
        case Kind::Sign: return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
        case Kind::ClippedLinear: return std::clamp(p1_ * u, -p2_, p2_);
    }
    return 0.0;
}

Vec DriftFunction::operator()(const Vec& u) const noexcept {
    Vec out(u.dim());
    for (int k = 0; k < u.dim(); ++k) out[k] = component(u[k]);
    return out;
}

double DriftFunction::b_norm(int dim) const noexcept {
    const double rd = std::sqrt(static_cast<double>(dim));
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return std::abs(p1_) * rd;
        case Kind::Tanh: return p1_ == 0.0 ? 0.0 : rd;
        case Kind::Sign: return rd;
        case Kind::ClippedLinear: return p1_ == 0.0 ? 0.0 : p2_ * rd;
    }
    return 0.0;
}

void KineticModel::validate() const {
    require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::ConstraintViolation,
            "sigma must be positive");
}

void DriftEstimatorConfig::validate() const {
    require(!bandwidth || *bandwidth > 0.0, ErrorKind::ConstraintViolation,
            "bandwidth must be positive");
    require(!min_mass || *min_mass >= 0.0, ErrorKind::ConstraintViolation,
            "min_mass must be nonnegative");
    require(bins_per_bandwidth >= 1.0, ErrorKind::ConstraintViolation,
            "bins_per_bandwidth must be at least 1");
}

double kernel_1d(KernelKind kind, double z) noexcept {
    if (kind == KernelKind::Gaussian) return std::exp(-0.5 * z * z) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
    const double a = 1.0 - z * z;
    return a > 0.0 ? 0.75 * a : 0.0;
}

double kernel_support(KernelKind kind) noexcept {
    return kind == KernelKind::Gaussian ? kGaussianSupport : 1.0;
}

ResolvedEstimator resolve_estimator(const Domain& domain, const std::vector<PhaseState>& states,
                                    const DriftEstimatorConfig& cfg) {
    cfg.validate();
    require(!states.empty(), ErrorKind::InvalidArgument, "ensemble is empty");
    const int d = domain.dimension();
    const double n = static_cast<double>(states.size());
    ResolvedEstimator est;
    est.kernel = cfg.kernel;
    est.bandwidth = Vec(d);
    const Vec extent = domain.box_hi() - domain.box_lo();
    for (int k = 0; k < d; ++k) {
        double bw;
        if (cfg.bandwidth) {
            bw = *cfg.bandwidth;
        } else {
            double mean = 0.0;
            for (const auto& s : states) mean += s.x[k];
            mean /= n;
            double var = 0.0;
            for (const auto& s : states) var += (s.x[k] - mean) * (s.x[k] - mean);
            bw = 1.06 * std::sqrt(var / n) * std::pow(n, -0.2);
            bw = std::max(bw, 1e-3 * extent[k]);
        }
        est.bandwidth[k] = bw;
    }
    est.min_mass = cfg.min_mass ? *cfg.min_mass : 1e-6 * n * std::pow(kernel_1d(cfg.kernel, 0.0), d);
    return est;
}

Vec conditional_drift(const std::vector<PhaseState>& states, const KineticModel& model,
                      const ResolvedEstimator& est, const Vec& x) {
    const int d = x.dim();
    double den = 0.0;
    Vec num(d);
    for (const auto& s : states) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) w *= kernel_1d(est.kernel, (x[k] - s.x[k]) / est.bandwidth[k]);
        if (w == 0.0) continue;
        den += w;
        num += model.b(s.u) * w;
    }
    if (!(den > 0.0) || den < est.min_mass) return Vec(d);
    return clamp_to_norm(num * (1.0 / den), model.b.b_norm(d));
}

Vec conditional_drift(const Ensemble& ensemble, const KineticModel& model,
                      const DriftEstimatorConfig& cfg, const Vec& x, const Domain& domain) {
    return conditional_drift(ensemble.states, model, resolve_estimator(domain, ensemble.states, cfg),
                             x);
}

DriftField::DriftField(const Domain& domain, const std::vector<PhaseState>& snapshot,
                       const KineticModel& model, const DriftEstimatorConfig& cfg)
    : dim_(domain.dimension()), est_(resolve_estimator(domain, snapshot, cfg)), model_(model) {
    if (snapshot.size() <= cfg.exact_max_particles) {
        snapshot_ = snapshot;
        return;
    }
    binned_ = true;
    const int d = dim_;
    const int cap = d == 1 ? 4096 : (d == 2 ? 512 : 96);
    lo_ = domain.box_lo();
    step_ = Vec(d);
    const Vec extent = domain.box_hi() - lo_;
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        const double target = est_.bandwidth[k] / cfg.bins_per_bandwidth;
        const int n = std::clamp(static_cast<int>(std::ceil(extent[k] / target)) + 1, 16, cap);
        nodes_[k] = n;
        step_[k] = extent[k] / (n - 1);
        total *= static_cast<std::size_t>(n);
    }
    std::vector<double> mass(total, 0.0);
    std::vector<double> numer(total * d, 0.0);

    // Linear binning, sequential in particle order.
    const int corners = 1 << d;
    for (const auto& s : snapshot) {
        std::array<int, kMaxDim> base{};
        std::array<double, kMaxDim> frac{};
        for (int k = 0; k < d; ++k) {
            const double p = std::clamp((s.x[k] - lo_[k]) / step_[k], 0.0, nodes_[k] - 1.0);
            base[k] = std::min(static_cast<int>(p), nodes_[k] - 2);
            frac[k] = p - base[k];
        }
        const Vec bv = model.b(s.u);
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            std::size_t idx = 0;
            for (int k = 0; k < d; ++k) {
                const int bit = (c >> k) & 1;
                w *= bit ? frac[k] : 1.0 - frac[k];
                idx = idx * nodes_[k] + static_cast<std::size_t>(base[k] + bit);
            }
            mass[idx] += w;
            for (int k = 0; k < d; ++k) numer[idx * d + k] += w * bv[k];
        }
    }

    // Separable convolution along each axis; `width` values per node.
    const auto convolve = [&](std::vector<double>& field, int width) {
        for (int axis = 0; axis < d; ++axis) {
            const int n = nodes_[axis];
            const int taps = static_cast<int>(
                std::ceil(kernel_support(est_.kernel) * est_.bandwidth[axis] / step_[axis]));
            std::vector<double> kern(2 * taps + 1);
            for (int j = -taps; j <= taps; ++j)
                kern[j + taps] = kernel_1d(est_.kernel, j * step_[axis] / est_.bandwidth[axis]);
            std::size_t stride = static_cast<std::size_t>(width);
            for (int k = d - 1; k > axis; --k) stride *= nodes_[k];
            const std::size_t outer = total / (stride / width * n);
            std::vector<double> line(n), out(n);
            std::vector<double> result(field.size());
            for (std::size_t o = 0; o < outer; ++o) {
                for (std::size_t inner = 0; inner < stride; ++inner) {
                    const std::size_t base = o * n * stride + inner;
                    for (int i = 0; i < n; ++i) line[i] = field[base + i * stride];
                    for (int i = 0; i < n; ++i) {
                        double acc = 0.0;
                        const int j0 = std::max(-taps, -i), j1 = std::min(taps, n - 1 - i);
                        for (int j = j0; j <= j1; ++j) acc += kern[j + taps] * line[i + j];
                        out[i] = acc;
                    }
                    for (int i = 0; i < n; ++i) result[base + i * stride] = out[i];
                }
            }
            field.swap(result);
        }
    };
    convolve(mass, 1);
    convolve(numer, d);
    den_ = std::move(mass);
    num_ = std::move(numer);
}

Vec DriftField::operator()(const Vec& x) const {
    const int d = dim_;
    if (!binned_) return conditional_drift(snapshot_, model_, est_, x);
    std::array<int, kMaxDim> base{};
    std::array<double, kMaxDim> frac{};
    for (int k = 0; k < d; ++k) {
        const double p = std::clamp((x[k] - lo_[k]) / step_[k], 0.0, nodes_[k] - 1.0);
        base[k] = std::min(static_cast<int>(p), nodes_[k] - 2);
        frac[k] = p - base[k];
    }
    double den = 0.0;
    Vec num(d);
    for (int c = 0; c < (1 << d); ++c) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) {
            const int bit = (c >> k) & 1;
            w *= bit ? frac[k] : 1.0 - frac[k];
            idx = idx * nodes_[k] + static_cast<std::size_t>(base[k] + bit);
        }
        den += w * den_[idx];
        for (int k = 0; k < d; ++k) num[k] += w * num_[idx * d + k];
    }
    if (!(den > 0.0) || den < est_.min_mass) return Vec(d);
    return clamp_to_norm(num * (1.0 / den), model_.b.b_norm(d));
}

McKeanStepResult mckean_step(const Domain& domain, Ensemble& ensemble, const KineticModel& model,
                             const DriftEstimatorConfig& cfg, const StepParams& params,
                             std::vector<RngStream>& streams, int threads,
                             std::optional<double> duration) {
    const std::size_t n = ensemble.states.size();
    require(streams.size() == n, ErrorKind::InvalidArgument, "one stream per particle required");
    const double h = duration ? *duration : params.h;
    const double t0 = ensemble.time;
    const bool has_drift = model.b.kind() != DriftFunction::Kind::Zero;
    std::optional<DriftField> field;
    if (has_drift) field.emplace(domain, ensemble.states, model, cfg);

    constexpr std::size_t kBlock = 2048;
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<std::vector<ParticleHit>> block_hits(nblocks);
    std::vector<PhaseState> next(n);
    parallel_blocks(n, kBlock, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            PhaseState s = ensemble.states[i];
            if (field) s.u += (*field)(s.x) * h;
            ConfinedStepResult r = confined_advance(domain, s, h, params, model.sigma, streams[i], t0);
            next[i] = r.state;
            for (auto& e : r.hits) block_hits[b].push_back(ParticleHit{i, std::move(e)});
        }
    });
    McKeanStepResult res;
    for (auto& bh : block_hits) res.hits.insert(res.hits.end(), bh.begin(), bh.end());
    ensemble.states = std::move(next);
    ensemble.time = t0 + h;
    return res;
}

McKeanRun run_mckean(const Domain& domain, const InitialSampler& sampler,
                     const KineticModel& model, const DriftEstimatorConfig& cfg,
                     const StepParams& params, const McKeanRunConfig& run) {
    model.validate();
    cfg.validate();
    params.validate();
    require(run.particles >= 1, ErrorKind::InvalidArgument, "need at least one particle");
    require(run.horizon >= 0.0, ErrorKind::InvalidArgument, "horizon must be nonnegative");

    const std::size_t n = run.particles;
    std::vector<RngStream> streams(n);
    Ensemble ens;
    ens.states.resize(n);
    parallel_blocks(n, 4096, run.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            streams[i] = RngStream(run.seed, i);
            ens.states[i] = sampler(streams[i]);
            if (!(signed_distance(domain, ens.states[i].x) < 0.0))
                fail(ErrorKind::InvalidInitial,
                     "initial sampler produced a point outside the open domain (particle " +
                         std::to_string(i) + ")");
        }
    });

    McKeanRun out;
    out.probes = run.drift_probes;
    std::vector<double> times = run.output_times;
    times.push_back(run.horizon);
    std::sort(times.begin(), times.end());
    std::size_t next_out = 0;
    const double slack = 1e-9 * params.h;

    const auto record = [&] {
        out.snapshots.push_back(ens);
        DriftProbeSnapshot dp;
        dp.time = ens.time;
        if (!run.drift_probes.empty()) {
            if (model.b.kind() == DriftFunction::Kind::Zero) {
                dp.values.assign(run.drift_probes.size(), Vec(domain.dimension()));
            } else {
                const DriftField field(domain, ens.states, model, cfg);
                for (const auto& p : run.drift_probes) dp.values.push_back(field(p));
            }
        }
        out.drift.push_back(std::move(dp));
    };
    const auto flush = [&] {
        bool due = false;
        while (next_out < times.size() && times[next_out] <= ens.time + slack) {
            due = true;
            ++next_out;
        }
        if (due) record();
    };

    flush();
    const auto steps = static_cast<long>(std::ceil(run.horizon / params.h - 1e-9));
    for (long k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(k) * params.h;
        const double t1 = k + 1 == steps ? run.horizon : t0 + params.h;
        ens.time = t0;
        McKeanStepResult r = mckean_step(domain, ens, model, cfg, params, streams, run.threads, t1 - t0);
        ens.time = t1;
        out.hits.insert(out.hits.end(), r.hits.begin(), r.hits.end());
        flush();
    }
    return out;
}

}  // namespace cvfp
