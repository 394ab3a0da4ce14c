#include "cvfp_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cvfp/error.hpp"
#include "cvfp/phase_grid.hpp"

namespace cvfp::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void parse_error(const std::string& key, const std::string& what) {
    fail(ErrorKind::ParseError, key + ": " + what);
}

[[noreturn]] void constraint(const std::string& key, const std::string& what) {
    fail(ErrorKind::ConstraintViolation, key + ": " + what);
}

// Re-tags library validation failures with the offending config key.
template <class F>
auto guarded(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError) parse_error(key, e.what());
        constraint(key, e.what());
    }
}

/// Object reader that remembers which keys were consumed so leftovers can be
/// reported as unknown.
class Obj {
  public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) parse_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& k) const { return j_.contains(k); }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const json& raw(const std::string& k) {
        seen_.insert(k);
        return j_.at(k);
    }

    double num(const std::string& k, std::optional<double> dflt = std::nullopt) {
        if (!has(k)) {
            if (!dflt) parse_error(key(k), "missing required number");
            return *dflt;
        }
        const json& v = raw(k);
        if (!v.is_number()) parse_error(key(k), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) parse_error(key(k), "must be finite");
        return d;
    }

    std::optional<double> opt_num(const std::string& k) {
        if (!has(k) || j_.at(k).is_null()) {
            if (has(k)) seen_.insert(k);
            return std::nullopt;
        }
        return num(k);
    }

    std::int64_t integer(const std::string& k, std::int64_t dflt) {
        if (!has(k)) return dflt;
        const json& v = raw(k);
        if (!v.is_number_integer()) parse_error(key(k), "expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& k, std::uint64_t dflt) {
        if (!has(k)) return dflt;
        const json& v = raw(k);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            parse_error(key(k), "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    std::string str(const std::string& k, std::optional<std::string> dflt = std::nullopt) {
        if (!has(k)) {
            if (!dflt) parse_error(key(k), "missing required string");
            return *dflt;
        }
        const json& v = raw(k);
        if (!v.is_string()) parse_error(key(k), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> nums(const std::string& k) {
        if (!has(k)) return {};
        const json& v = raw(k);
        if (!v.is_array()) parse_error(key(k), "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) parse_error(key(k), "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    Obj sub(const std::string& k) { return Obj(raw(k), key(k)); }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) parse_error(key(k), "unknown key");
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Vec to_vec(const std::vector<double>& xs, const std::string& key) {
    if (xs.empty() || xs.size() > static_cast<std::size_t>(kMaxDim))
        constraint(key, "center needs 1 to 3 coordinates");
    Vec v(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<int>(i)] = xs[i];
    return v;
}

Domain parse_domain(Obj o) {
    const std::string kind = o.str("kind");
    Domain d = Domain::interval(1.0);
    if (kind == "interval") {
        const double len = o.num("length", 1.0);
        d = guarded(o.key("length"), [&] { return Domain::interval(len); });
    } else if (kind == "ball") {
        const Vec c = to_vec(o.nums("center").empty() ? std::vector<double>{0.0, 0.0} : o.nums("center"),
                             o.key("center"));
        const double r = o.num("radius", 1.0);
        d = guarded(o.key("radius"), [&] { return Domain::ball(c, r); });
    } else if (kind == "annulus") {
        const Vec c = to_vec(o.nums("center").empty() ? std::vector<double>{0.0, 0.0} : o.nums("center"),
                             o.key("center"));
        const double ri = o.num("inner_radius");
        const double ro = o.num("outer_radius");
        d = guarded(o.key("inner_radius"), [&] { return Domain::annulus(c, ri, ro); });
    } else {
        parse_error(o.key("kind"), "unknown domain kind '" + kind + "'");
    }
    o.finish();
    return d;
}

EnvelopeSpec parse_envelope(Obj o, const char* spread_key, double model_sigma) {
    EnvelopeSpec e;
    e.mu = o.num("mu");
    e.a = o.num("a");
    e.kappa = o.opt_num("kappa");
    e.s = o.opt_num("s");
    e.spread = o.opt_num(spread_key);
    if (o.has("sigma") && o.num("sigma") != model_sigma)
        constraint(o.key("sigma"), "envelope sigma must equal model.sigma");
    if (e.kappa.has_value() != e.s.has_value())
        parse_error(o.key("kappa"), "kappa and s must be given together");
    if (e.kappa.has_value() == e.spread.has_value())
        parse_error(o.key(spread_key), std::string("give either {kappa, s} or ") + spread_key);
    o.finish();
    return e;
}

ojson vec_json(const Vec& v) {
    ojson a = ojson::array();
    for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
    return a;
}

ojson envelope_json(const EnvelopeSpec& e, const char* spread_key) {
    ojson j;
    j["mu"] = e.mu;
    j["a"] = e.a;
    if (e.kappa) {
        j["kappa"] = *e.kappa;
        j["s"] = *e.s;
    } else {
        j[spread_key] = *e.spread;
    }
    return j;
}

std::string kernel_name(KernelKind k) { return k == KernelKind::Gaussian ? "gaussian" : "epanechnikov"; }

}  // namespace

double ScenarioConfig::weight_alpha() const {
    return alpha ? *alpha : static_cast<double>(std::max(dim(), 2) + 1);
}

double ScenarioConfig::domain_size() const {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>)
                return s.length;
            else if constexpr (std::is_same_v<T, Ball>)
                return s.radius;
            else
                return s.outer_radius;
        },
        domain.shape());
}

ScenarioConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        parse_error("<document>", e.what());
    }
    ScenarioConfig cfg;
    Obj o(root, "");
    cfg.name = o.str("name", cfg.name);
    if (o.has("domain")) cfg.domain = parse_domain(o.sub("domain"));

    if (o.has("model")) {
        Obj m = o.sub("model");
        cfg.model.sigma = m.num("sigma", 1.0);
        const std::string b = m.str("b", "zero");
        cfg.model.b = guarded(m.key("b"), [&] { return DriftFunction::parse(b); });
        m.finish();
    }

    if (o.has("initial")) {
        Obj m = o.sub("initial");
        cfg.initial.s = m.num("s", cfg.initial.s);
        cfg.initial.shift = m.num("shift", cfg.initial.shift);
        cfg.initial.modulation = m.num("modulation", cfg.initial.modulation);
        m.finish();
    }

    if (o.has("numerics")) {
        Obj n = o.sub("numerics");
        if (n.has("step")) {
            Obj s = n.sub("step");
            const double h = s.num("h", 0.01);
            StepParams p = StepParams::with_defaults(h);
            p.h_min = s.num("h_min", p.h_min);
            p.eps_hit = s.num("eps_hit", p.eps_hit);
            p.delta_near = s.opt_num("delta_near");
            const auto mh = s.integer("max_hits", static_cast<std::int64_t>(p.max_hits));
            if (mh < 1) constraint(s.key("max_hits"), "must be at least 1");
            p.max_hits = static_cast<std::size_t>(mh);
            s.finish();
            cfg.step = p;
        }
        if (n.has("grid")) {
            Obj g = n.sub("grid");
            cfg.grid.nx = static_cast<int>(g.integer("nx", cfg.grid.nx));
            cfg.grid.nu = static_cast<int>(g.integer("nu", cfg.grid.nu));
            cfg.grid.vmax = g.opt_num("vmax");
            cfg.grid.dt = g.opt_num("dt");
            cfg.grid.cfl = g.num("cfl", cfg.grid.cfl);
            cfg.grid.cutoff_rel = g.num("cutoff_rel", cfg.grid.cutoff_rel);
            cfg.grid.trace_order = static_cast<int>(g.integer("trace_order", cfg.grid.trace_order));
            g.finish();
        }
        if (n.has("estimator")) {
            Obj e = n.sub("estimator");
            cfg.estimator.bandwidth = e.opt_num("bandwidth");
            const std::string k = e.str("kernel", "gaussian");
            if (k == "gaussian")
                cfg.estimator.kernel = KernelKind::Gaussian;
            else if (k == "epanechnikov")
                cfg.estimator.kernel = KernelKind::Epanechnikov;
            else
                parse_error(e.key("kernel"), "unknown kernel '" + k + "'");
            cfg.estimator.min_mass = e.opt_num("min_mass");
            const auto em = e.integer("exact_max_particles",
                                      static_cast<std::int64_t>(cfg.estimator.exact_max_particles));
            if (em < 0) constraint(e.key("exact_max_particles"), "must be nonnegative");
            cfg.estimator.exact_max_particles = static_cast<std::size_t>(em);
            cfg.estimator.bins_per_bandwidth = e.num("bins_per_bandwidth", cfg.estimator.bins_per_bandwidth);
            e.finish();
        }
        cfg.alpha = n.opt_num("alpha");
        if (n.has("envelope")) {
            Obj e = n.sub("envelope");
            if (e.has("upper")) cfg.upper = parse_envelope(e.sub("upper"), "s_wide", cfg.model.sigma);
            if (e.has("lower")) cfg.lower = parse_envelope(e.sub("lower"), "s_narrow", cfg.model.sigma);
            e.finish();
        }
        n.finish();
    }

    if (o.has("run")) {
        Obj r = o.sub("run");
        RunSpec& run = cfg.run;
        run.horizon = r.num("horizon", run.horizon);
        run.particles = r.unsigned_integer("particles", run.particles);
        run.paths = r.unsigned_integer("paths", run.paths);
        run.seed = r.unsigned_integer("seed", run.seed);
        run.output_times = r.nums("output_times");
        run.drift_probes = static_cast<int>(r.integer("drift_probes", run.drift_probes));
        run.picard_tol = r.num("picard_tol", run.picard_tol);
        run.picard_max_iter = static_cast<int>(r.integer("picard_max_iter", run.picard_max_iter));
        run.eps_shell = r.num("eps_shell", run.eps_shell);
        run.coarsen_x = static_cast<int>(r.integer("coarsen_x", run.coarsen_x));
        run.coarsen_u = static_cast<int>(r.integer("coarsen_u", run.coarsen_u));
        run.mc_grid_tol = r.num("mc_grid_tol", run.mc_grid_tol);
        run.out = r.str("out", run.out);
        r.finish();
    }
    o.finish();
    validate_config(cfg);
    return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::ParseError, "cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void validate_config(const ScenarioConfig& cfg) {
    guarded("model", [&] { cfg.model.validate(); });
    guarded("numerics.step", [&] { cfg.step.validate(); });
    guarded("numerics.estimator", [&] { cfg.estimator.validate(); });
    const int d = cfg.dim();
    if (cfg.alpha && !(*cfg.alpha > std::max(d, 2)))
        constraint("numerics.alpha", "weight exponent requires alpha > max(d, 2) = " +
                                         std::to_string(std::max(d, 2)));
    const InitialSpec& ini = cfg.initial;
    if (!(ini.s > 0.0)) constraint("initial.s", "variance must be positive");
    if (!(std::abs(ini.modulation) < 1.0)) constraint("initial.modulation", "require |modulation| < 1");
    if (ini.modulation != 0.0 && d != 1)
        constraint("initial.modulation", "spatial modulation is only defined on an interval");

    const GridSpec& g = cfg.grid;
    if (g.nx < 8 || g.nu < 8 || g.nu % 2 != 0)
        constraint("numerics.grid", "need nx >= 8 and an even nu >= 8");
    if (g.vmax && !(*g.vmax > 0.0)) constraint("numerics.grid.vmax", "must be positive");
    if (g.dt && !(*g.dt > 0.0)) constraint("numerics.grid.dt", "must be positive");
    if (!(g.cfl > 0.0 && g.cfl <= 1.0)) constraint("numerics.grid.cfl", "must lie in (0, 1]");
    if (!(g.cutoff_rel > 0.0 && g.cutoff_rel < 1.0)) constraint("numerics.grid.cutoff_rel", "must lie in (0, 1)");
    if (g.trace_order != 0 && g.trace_order != 1) constraint("numerics.grid.trace_order", "must be 0 or 1");

    const double bn = cfg.model.b.b_norm(d);
    if (cfg.upper) {
        const EnvelopeSpec& e = *cfg.upper;
        if (!(e.mu > 0.5 && e.mu < 1.0))
            constraint("numerics.envelope.upper.mu",
                       "a super-solution envelope needs 1/2 < mu < 1 (mu = 1 is excluded)");
        const double amin = super_solution_min_rate(e.mu, cfg.model.sigma, bn);
        if (!(e.a >= amin))
            constraint("numerics.envelope.upper.a", "rate must be >= " + std::to_string(amin));
        if (e.spread && !(*e.spread > ini.s))
            constraint("numerics.envelope.upper.s_wide", "must exceed initial.s");
    }
    if (cfg.lower) {
        const EnvelopeSpec& e = *cfg.lower;
        if (!(e.mu > 1.0))
            constraint("numerics.envelope.lower.mu", "a sub-solution envelope needs mu > 1 (mu = 1 is excluded)");
        const double amax = sub_solution_max_rate(e.mu, cfg.model.sigma, bn);
        if (!(e.a <= amax))
            constraint("numerics.envelope.lower.a", "rate must be <= " + std::to_string(amax));
        if (e.spread && !(*e.spread > 0.0 && *e.spread < ini.s))
            constraint("numerics.envelope.lower.s_narrow", "must lie in (0, initial.s)");
    }
    if ((cfg.upper || cfg.lower) && d != 1)
        constraint("numerics.envelope", "envelopes are only used by the d = 1 grid solver");

    const RunSpec& r = cfg.run;
    if (!(r.horizon > 0.0)) constraint("run.horizon", "must be positive");
    if (r.particles < 1) constraint("run.particles", "need at least one particle");
    for (double t : r.output_times)
        if (!(t >= 0.0 && t <= r.horizon)) constraint("run.output_times", "times must lie in [0, horizon]");
    if (r.drift_probes < 0) constraint("run.drift_probes", "must be nonnegative");
    if (!(r.picard_tol > 0.0)) constraint("run.picard_tol", "must be positive");
    if (r.picard_max_iter < 1) constraint("run.picard_max_iter", "must be at least 1");
    if (!(r.eps_shell > 0.0 && r.eps_shell < 0.25)) constraint("run.eps_shell", "must lie in (0, 0.25)");
    if (r.coarsen_x < 1 || r.coarsen_u < 1) constraint("run.coarsen", "bin sizes must be >= 1");
    if (!(r.mc_grid_tol > 0.0)) constraint("run.mc_grid_tol", "must be positive");
}

std::string serialize_config(const ScenarioConfig& cfg) {
    ojson j;
    j["name"] = cfg.name;
    ojson dom;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                dom["kind"] = "interval";
                dom["length"] = s.length;
            } else if constexpr (std::is_same_v<T, Ball>) {
                dom["kind"] = "ball";
                dom["center"] = vec_json(s.center);
                dom["radius"] = s.radius;
            } else {
                dom["kind"] = "annulus";
                dom["center"] = vec_json(s.center);
                dom["inner_radius"] = s.inner_radius;
                dom["outer_radius"] = s.outer_radius;
            }
        },
        cfg.domain.shape());
    j["domain"] = dom;
    j["model"] = {{"sigma", cfg.model.sigma}, {"b", cfg.model.b.name()}};
    j["initial"] = {{"s", cfg.initial.s}, {"shift", cfg.initial.shift}, {"modulation", cfg.initial.modulation}};

    ojson n;
    ojson step;
    step["h"] = cfg.step.h;
    step["h_min"] = cfg.step.h_min;
    step["eps_hit"] = cfg.step.eps_hit;
    step["delta_near"] = cfg.step.delta_near ? ojson(*cfg.step.delta_near) : ojson(nullptr);
    step["max_hits"] = cfg.step.max_hits;
    n["step"] = step;
    ojson grid;
    grid["nx"] = cfg.grid.nx;
    grid["nu"] = cfg.grid.nu;
    grid["vmax"] = cfg.grid.vmax ? ojson(*cfg.grid.vmax) : ojson(nullptr);
    grid["dt"] = cfg.grid.dt ? ojson(*cfg.grid.dt) : ojson(nullptr);
    grid["cfl"] = cfg.grid.cfl;
    grid["cutoff_rel"] = cfg.grid.cutoff_rel;
    grid["trace_order"] = cfg.grid.trace_order;
    n["grid"] = grid;
    ojson est;
    est["bandwidth"] = cfg.estimator.bandwidth ? ojson(*cfg.estimator.bandwidth) : ojson(nullptr);
    est["kernel"] = kernel_name(cfg.estimator.kernel);
    est["min_mass"] = cfg.estimator.min_mass ? ojson(*cfg.estimator.min_mass) : ojson(nullptr);
    est["exact_max_particles"] = cfg.estimator.exact_max_particles;
    est["bins_per_bandwidth"] = cfg.estimator.bins_per_bandwidth;
    n["estimator"] = est;
    n["alpha"] = cfg.weight_alpha();
    if (cfg.upper || cfg.lower) {
        ojson env;
        if (cfg.upper) env["upper"] = envelope_json(*cfg.upper, "s_wide");
        if (cfg.lower) env["lower"] = envelope_json(*cfg.lower, "s_narrow");
        n["envelope"] = env;
    }
    j["numerics"] = n;

    const RunSpec& r = cfg.run;
    ojson run;
    run["horizon"] = r.horizon;
    run["particles"] = r.particles;
    run["paths"] = r.paths;
    run["seed"] = r.seed;
    run["output_times"] = r.output_times;
    run["drift_probes"] = r.drift_probes;
    run["picard_tol"] = r.picard_tol;
    run["picard_max_iter"] = r.picard_max_iter;
    run["eps_shell"] = r.eps_shell;
    run["coarsen_x"] = r.coarsen_x;
    run["coarsen_u"] = r.coarsen_u;
    run["mc_grid_tol"] = r.mc_grid_tol;
    run["out"] = r.out;
    j["run"] = run;
    return j.dump(2) + "\n";
}

namespace {

MaxwellianParams resolve(const ScenarioConfig& cfg, const EnvelopeSpec& e, bool upper) {
    require(cfg.dim() == 1, ErrorKind::ConstraintViolation, "envelopes need an interval domain");
    if (e.kappa) {
        MaxwellianParams p;
        p.a = e.a;
        p.mu = e.mu;
        p.core = {*e.kappa, *e.s};
        p.sigma = cfg.model.sigma;
        p.dim = 1;
        p.validate();
        return p;
    }
    const double len = cfg.domain_size();
    const double m = std::abs(cfg.initial.modulation);
    const double shift = std::abs(cfg.initial.shift);
    if (upper)
        return dominating_envelope((1.0 + m) / len, cfg.initial.s, shift, *e.spread, e.mu, e.a,
                                   cfg.model.sigma, 1);
    return dominated_envelope((1.0 - m) / len, cfg.initial.s, shift, *e.spread, e.mu, e.a,
                              cfg.model.sigma, 1);
}

}  // namespace

MaxwellianParams upper_envelope(const ScenarioConfig& cfg) {
    require(cfg.upper.has_value(), ErrorKind::ConstraintViolation, "no upper envelope configured");
    return resolve(cfg, *cfg.upper, true);
}

MaxwellianParams lower_envelope(const ScenarioConfig& cfg) {
    require(cfg.lower.has_value(), ErrorKind::ConstraintViolation, "no lower envelope configured");
    return resolve(cfg, *cfg.lower, false);
}

}  // namespace cvfp::cli
