#include "cvfp/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvfp/error.hpp"
#include "cvfp/parallel.hpp"

namespace cvfp {

namespace {

constexpr double kInvSqrt3 = 0.57735026918962576451;
constexpr int kMaxBisection = 200;

struct Sym2 {
    double a, b, c;  // [[a, b], [b, c]]
};

// Lower Cholesky factor of a 2x2 covariance; tiny negative pivots from
// round-off are clamped to zero.
void cholesky2(const Sym2& s, double& l11, double& l21, double& l22) {
    l11 = std::sqrt(std::max(s.a, 0.0));
    l21 = l11 > 0.0 ? s.b / l11 : 0.0;
    l22 = std::sqrt(std::max(s.c - l21 * l21, 0.0));
}

double reach(const PhaseState& a, const PhaseState& b, double tau, double sigma) {
    return std::max(norm(a.u), norm(b.u)) * tau + 3.0 * sigma * tau * std::sqrt(tau);
}

struct Outcome {
    bool restart = false;  // path interrupted at local time `time`
    double time = 0.0;
    PhaseState state;
    std::optional<HitEvent> hit;
};

struct Search {
    const Domain& domain;
    const StepParams& params;
    double sigma;
    RngStream& rng;

    bool safe(const PhaseState& a, const PhaseState& b, double tau) const {
        const double r = reach(a, b, tau, sigma);
        return -signed_distance(domain, a.x) > r && -signed_distance(domain, b.x) > r;
    }

    Outcome locate(const PhaseState& a, const PhaseState& b, double tau, double offset) const {
        Outcome out;
        out.state = b;
        if (!(signed_distance(domain, b.x) > 0.0)) return out;

        // Chord bisection keeping x(hi) outside.
        const Vec dx = b.x - a.x;
        const double len = norm(dx);
        const double tol = 1e-3 * params.eps_hit;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < kMaxBisection && (hi - lo) * len > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (signed_distance(domain, a.x + dx * mid) > 0.0)
                hi = mid;
            else
                lo = mid;
        }
        const Vec p = project_to_boundary(domain, a.x + dx * hi);
        const Vec n = outward_normal(domain, p);
        const Vec u_pre = a.u + (b.u - a.u) * hi;
        out.restart = true;
        if (dot(u_pre, n) > kDefaultTangentialTolerance * norm(u_pre)) {
            out.time = offset + hi * tau;
            out.state = PhaseState{p, reflect(u_pre, n)};
            out.hit = HitEvent{out.time, p, u_pre, out.state.u};
            return out;
        }
        // The crossing velocity is not outgoing: the excursion is a grazing
        // artefact of the chord. Pull the end point back onto the wall.
        const Vec pb = project_to_boundary(domain, b.x);
        const Vec nb = outward_normal(domain, pb);
        out.time = offset + tau;
        out.state = PhaseState{pb, b.u};
        if (dot(b.u, nb) > kDefaultTangentialTolerance * norm(b.u)) {
            out.state.u = reflect(b.u, nb);
            out.hit = HitEvent{out.time, pb, b.u, out.state.u};
        }
        return out;
    }

    Outcome refine(const PhaseState& a, const PhaseState& b, double tau, double offset) const {
        if (safe(a, b, tau)) return Outcome{false, 0.0, b, std::nullopt};
        if (tau <= params.h_min) return locate(a, b, tau, offset);
        const double half = 0.5 * tau;
        const PhaseState m = bridge_midpoint(a, b, tau, sigma, rng);
        Outcome first = refine(a, m, half, offset);
        if (first.restart) return first;
        return refine(m, b, half, offset + half);
    }
};

}  // namespace

StepParams StepParams::with_defaults(double h) {
    StepParams p;
    p.h = h;
    p.h_min = h / 256.0;
    return p;
}

void StepParams::validate() const {
    require(h > 0.0 && std::isfinite(h), ErrorKind::InvalidArgument, "step h must be positive");
    require(h_min > 0.0 && h_min <= h, ErrorKind::InvalidArgument, "require 0 < h_min <= h");
    require(eps_hit > 0.0, ErrorKind::InvalidArgument, "eps_hit must be positive");
    require(!delta_near || *delta_near > 0.0, ErrorKind::InvalidArgument,
            "delta_near must be positive");
    require(max_hits >= 1, ErrorKind::InvalidArgument, "max_hits must be at least 1");
}

FreeFlowCovariance free_flow_covariance(double h, double sigma) noexcept {
    const double s2 = sigma * sigma;
    return {s2 * h * h * h / 3.0, s2 * h * h / 2.0, s2 * h};
}

PhaseState free_step(const PhaseState& s, double h, double sigma, RngStream& rng) {
    PhaseState out = s;
    const double sh = sigma * std::sqrt(h);
    const double sh3 = sh * h;
    for (int k = 0; k < s.x.dim(); ++k) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        out.x[k] = s.x[k] + h * s.u[k] + sh3 * (0.5 * z1 + 0.5 * kInvSqrt3 * z2);
        out.u[k] = s.u[k] + sh * z1;
    }
    return out;
}

BridgeMoments bridge_moments(double xa, double ua, double xb, double ub, double h,
                             double sigma) noexcept {
    const double s = 0.5 * h;
    const double r = h;
    const Sym2 s11{s * s * s / 3.0, s * s / 2.0, s};
    const Sym2 s22{r * r * r / 3.0, r * r / 2.0, r};
    // Cov((I_s, W_s), (I_r, W_r)) for s <= r.
    const double c11 = s * s * r / 2.0 - s * s * s / 6.0;
    const double c12 = s * s / 2.0;
    const double c21 = r * s - s * s / 2.0;
    const double c22 = s;

    const double det = s22.a * s22.c - s22.b * s22.b;
    const double i11 = s22.c / det, i12 = -s22.b / det, i22 = s22.a / det;
    // K = C * inv(S22)
    const double k11 = c11 * i11 + c12 * i12;
    const double k12 = c11 * i12 + c12 * i22;
    const double k21 = c21 * i11 + c22 * i12;
    const double k22 = c21 * i12 + c22 * i22;

    const double rx = xb - (xa + r * ua);
    const double ru = ub - ua;
    BridgeMoments m;
    m.mean_x = xa + s * ua + k11 * rx + k12 * ru;
    m.mean_u = ua + k21 * rx + k22 * ru;
    const double s2 = sigma * sigma;
    m.cxx = s2 * (s11.a - (k11 * c11 + k12 * c12));
    m.cxu = s2 * (s11.b - (k11 * c21 + k12 * c22));
    m.cuu = s2 * (s11.c - (k21 * c21 + k22 * c22));
    return m;
}

PhaseState bridge_midpoint(const PhaseState& a, const PhaseState& b, double h, double sigma,
                           RngStream& rng) {
    require(h > 0.0, ErrorKind::InvalidArgument, "bridge requires h > 0");
    PhaseState out = a;
    for (int k = 0; k < a.x.dim(); ++k) {
        const BridgeMoments m = bridge_moments(a.x[k], a.u[k], b.x[k], b.u[k], h, sigma);
        double l11, l21, l22;
        cholesky2({m.cxx, m.cxu, m.cuu}, l11, l21, l22);
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        out.x[k] = m.mean_x + l11 * z1;
        out.u[k] = m.mean_u + l21 * z1 + l22 * z2;
    }
    return out;
}

ConfinedStepResult confined_advance(const Domain& domain, const PhaseState& state, double duration,
                                    const StepParams& params, double sigma, RngStream& rng,
                                    double t0) {
    ConfinedStepResult res;
    res.state = state;
    const Search search{domain, params, sigma, rng};
    double t = 0.0;
    int interruptions = 0;
    while (t < duration) {
        const double remaining = duration - t;
        const PhaseState a = res.state;
        const PhaseState b = free_step(a, remaining, sigma, rng);
        const double delta = params.delta_near ? *params.delta_near : reach(a, b, remaining, sigma);
        if (signed_distance(domain, a.x) <= -delta && signed_distance(domain, b.x) <= -delta) {
            res.state = b;
            break;
        }
        const Outcome o = search.refine(a, b, remaining, 0.0);
        res.state = o.state;
        if (!o.restart) break;
        if (o.hit) {
            HitEvent e = *o.hit;
            e.time = t0 + t + o.time;
            res.hits.push_back(e);
            if (static_cast<int>(res.hits.size()) > params.max_hits)
                fail(ErrorKind::WatchdogExceeded,
                     "more than " + std::to_string(params.max_hits) + " reflections in one step");
        }
        if (++interruptions > 2 * params.max_hits + 2)
            fail(ErrorKind::WatchdogExceeded, "boundary search did not terminate");
        t += o.time;
        if (o.time >= remaining) break;
    }
    return res;
}

ConfinedStepResult confined_step(const Domain& domain, const PhaseState& state,
                                 const StepParams& params, double sigma, RngStream& rng,
                                 double t0) {
    return confined_advance(domain, state, params.h, params, sigma, rng, t0);
}

void check_admissible_start(const Domain& domain, const PhaseState& s, double eps_hit) {
    const double sd = signed_distance(domain, s.x);
    require(sd <= eps_hit, ErrorKind::InvalidStart,
            "start lies outside the domain (signed distance " + std::to_string(sd) + ")");
    if (sd >= -eps_hit) {
        const BoundaryClass c = classify(domain, s.x, s.u, eps_hit);
        require(c == BoundaryClass::Incoming, ErrorKind::InvalidStart,
                "boundary start must have incoming velocity; pre-reflect outgoing starts");
    }
}

PathResult simulate_path(const Domain& domain, const PhaseState& initial, double horizon,
                         const StepParams& params, double sigma, RngStream& rng) {
    params.validate();
    require(horizon >= 0.0, ErrorKind::InvalidArgument, "horizon must be nonnegative");
    check_admissible_start(domain, initial, params.eps_hit);
    PathResult out;
    out.times.push_back(0.0);
    out.trajectory.push_back(initial);
    PhaseState s = initial;
    const auto steps = static_cast<long>(std::ceil(horizon / params.h - 1e-9));
    for (long k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(k) * params.h;
        const double t1 = k + 1 == steps ? horizon : t0 + params.h;
        ConfinedStepResult r = confined_advance(domain, s, t1 - t0, params, sigma, rng, t0);
        s = r.state;
        out.events.insert(out.events.end(), r.hits.begin(), r.hits.end());
        out.times.push_back(t1);
        out.trajectory.push_back(s);
    }
    return out;
}

MonteCarloEstimate semigroup_estimate(const Domain& domain, const PhaseFunction& psi, double t,
                                      const PhaseState& initial, std::size_t samples,
                                      const StepParams& params, double sigma, std::uint64_t seed,
                                      int threads) {
    require(samples >= 1, ErrorKind::InvalidArgument, "need at least one sample");
    params.validate();
    check_admissible_start(domain, initial, params.eps_hit);
    std::vector<double> values(samples);
    parallel_blocks(samples, 1024, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            RngStream rng(seed, i);
            PhaseState s = initial;
            if (t > 0.0) s = simulate_path(domain, initial, t, params, sigma, rng).trajectory.back();
            values[i] = psi(s.x, s.u);
        }
    });
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(samples);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    MonteCarloEstimate est;
    est.mean = mean;
    est.std_error = samples > 1 ? std::sqrt(ss / static_cast<double>(samples - 1) /
                                            static_cast<double>(samples))
                                : 0.0;
    return est;
}

}  // namespace cvfp
