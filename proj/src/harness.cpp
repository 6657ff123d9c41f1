#include "gnwaves/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fftw3.h>
#include <fmt/format.h>
#include <json.hpp>

#include "gnwaves/errors.hpp"
#include "gnwaves/scalar_models.hpp"

namespace gnwaves {

namespace {

std::string key_of(std::string_view s) {
    std::string out;
    for (char ch : s)
        if (ch != '-' && ch != '_' && ch != ' ')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return out;
}

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<E, const char*>, N>& names, const char* what) {
    const std::string k = key_of(s);
    for (const auto& [e, n] : names)
        if (key_of(n) == k) return e;
    throw ConfigError(fmt::format("unknown {} '{}'", what, s));
}

template <class E, std::size_t N>
std::string name_of(E e, const std::array<std::pair<E, const char*>, N>& names) {
    for (const auto& [v, n] : names)
        if (v == e) return n;
    return "unknown";
}

constexpr std::array<std::pair<Regime, const char*>, 2> kRegimes{{
    {Regime::LongWave, "long-wave"},
    {Regime::CamassaHolm, "camassa-holm"},
}};
constexpr std::array<std::pair<RatioPreset, const char*>, 3> kRatios{{
    {RatioPreset::Critical, "critical"},
    {RatioPreset::NonCritical, "non-critical"},
    {RatioPreset::Custom, "custom"},
}};
constexpr std::array<std::pair<DataKind, const char*>, 3> kData{{
    {DataKind::GaussianLocalized, "gaussian-localized"},
    {DataKind::AlgebraicNonlocalized, "algebraic-nonlocalized"},
    {DataKind::Unidirectional, "unidirectional-compatible"},
}};
constexpr std::array<std::pair<Checkpoint, const char*>, 3> kCheckpoints{{
    {Checkpoint::T10, "t10"},
    {Checkpoint::InvEps, "inv-eps"},
    {Checkpoint::EpsM32, "eps-m32"},
}};

}  // namespace

std::string to_string(Regime r) { return name_of(r, kRegimes); }
std::string to_string(RatioPreset r) { return name_of(r, kRatios); }
std::string to_string(DataKind d) { return name_of(d, kData); }
std::string to_string(Checkpoint c) { return name_of(c, kCheckpoints); }
Regime parse_regime(std::string_view s) { return parse_enum(s, kRegimes, "regime"); }
RatioPreset parse_ratio(std::string_view s) { return parse_enum(s, kRatios, "ratio preset"); }
DataKind parse_data_kind(std::string_view s) { return parse_enum(s, kData, "data kind"); }
Checkpoint parse_checkpoint(std::string_view s) { return parse_enum(s, kCheckpoints, "checkpoint"); }

double checkpoint_time(Checkpoint c, double epsilon) {
    switch (c) {
        case Checkpoint::T10: return 10.0;
        case Checkpoint::InvEps: return 1.0 / epsilon;
        case Checkpoint::EpsM32: return std::pow(epsilon, -1.5);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Configuration

RegimeParams ExperimentConfig::params(double eps) const {
    RegimeParams p;
    p.epsilon = eps;
    p.mu = regime == Regime::LongWave ? eps : eps * eps;
    switch (ratio) {
        case RatioPreset::Critical:
            p.gamma = 0.64;
            p.delta = 0.8;
            break;
        case RatioPreset::NonCritical:
            p.gamma = 0.9;
            p.delta = 0.5;
            break;
        case RatioPreset::Custom:
            p.gamma = gamma;
            p.delta = delta;
            break;
    }
    p.theta = theta;
    p.lambda = lambda;
    return p;
}

double ExperimentConfig::horizon(double eps) const {
    if (t_end > 0.0) return t_end;
    double t = 0.0;
    for (Checkpoint c : checkpoints) t = std::max(t, checkpoint_time(c, eps));
    return t > 0.0 ? t : 1.0 / eps;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (epsilons.empty()) fail("epsilons must not be empty");
    for (double e : epsilons)
        if (!(e > 0.0) || !std::isfinite(e)) fail(fmt::format("epsilon {} must be positive", e));
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon must be >= 0");
    if (epsilon == 0.0 && !(t_end > 0.0)) fail("epsilon = 0 needs an explicit t_end");
    if (samples < 1) fail("samples must be >= 1");
    if (!(s_err >= 0.0)) fail("s_err must be >= 0");
    if (!(grid.dx > 0.0)) fail("grid dx must be positive");
    if (!(grid.margin >= 0.0)) fail("grid margin must be >= 0");
    if (!(cfl > 0.0)) fail("cfl must be positive");
    if (dt < 0.0) fail("dt must be >= 0");
    if (t_end < 0.0) fail("t_end must be >= 0");
    if (!(blowup_threshold > 0.0)) fail("blowup_threshold must be positive");
    if (!(solver.tol > 0.0) || solver.max_iterations < 1) fail("invalid elliptic solver settings");
    if (models.empty()) fail("no models selected");
    if (std::find(models.begin(), models.end(), ModelKind::GN) == models.end())
        fail("models must include GN (the reference)");
    try {
        params(epsilon).validate();
        for (double e : epsilons) params(e).validate();
    } catch (const DomainError& e) {
        fail(e.what());
    }
}

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    boost::split(parts, s, boost::is_any_of(", \t"), boost::token_compress_on);
    parts.erase(std::remove_if(parts.begin(), parts.end(), [](const std::string& x) { return x.empty(); }),
                parts.end());
    return parts;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d)) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string k = key_of(v);
    if (k == "true" || k == "yes" || k == "on" || k == "1") return true;
    if (k == "false" || k == "no" || k == "off" || k == "0") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    const std::string v = boost::trim_copy(value);
    if (key == "regime.regime") c.regime = parse_regime(v);
    else if (key == "regime.ratio") c.ratio = parse_ratio(v);
    else if (key == "regime.gamma") c.gamma = to_double(key, v);
    else if (key == "regime.delta") c.delta = to_double(key, v);
    else if (key == "regime.theta") c.theta = to_double(key, v);
    else if (key == "regime.lambda") c.lambda = to_double(key, v);
    else if (key == "data.kind") c.data = parse_data_kind(v);
    else if (key == "sweep.epsilons") {
        c.epsilons.clear();
        for (const auto& s : split_list(v)) c.epsilons.push_back(to_double(key, s));
    } else if (key == "sweep.epsilon") c.epsilon = to_double(key, v);
    else if (key == "sweep.checkpoints") {
        c.checkpoints.clear();
        for (const auto& s : split_list(v)) c.checkpoints.push_back(parse_checkpoint(s));
    } else if (key == "sweep.t_end") c.t_end = to_double(key, v);
    else if (key == "sweep.samples") c.samples = to_int(key, v);
    else if (key == "sweep.threads") c.threads = to_int(key, v);
    else if (key == "error.s_err") c.s_err = to_double(key, v);
    else if (key == "grid.dx") c.grid.dx = to_double(key, v);
    else if (key == "grid.margin") c.grid.margin = to_double(key, v);
    else if (key == "grid.dealias") c.grid.dealias = to_bool(key, v);
    else if (key == "integrator.method") c.method = parse_method(v);
    else if (key == "integrator.cfl") c.cfl = to_double(key, v);
    else if (key == "integrator.dt") c.dt = to_double(key, v);
    else if (key == "integrator.blowup_threshold") c.blowup_threshold = to_double(key, v);
    else if (key == "integrator.solver_tol") c.solver.tol = to_double(key, v);
    else if (key == "integrator.solver_max_iterations") c.solver.max_iterations = to_int(key, v);
    else if (key == "models.models") {
        c.models.clear();
        for (const auto& s : split_list(v)) c.models.push_back(parse_model_kind(s));
    } else {
        throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
}

ExperimentConfig parse_config(std::istream& in, const std::vector<std::string>& overrides) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config parse error: {}", e.what()));
    }
    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(fmt::format("key '{}' outside a section", section));
        for (const auto& [raw_key, node] : body) set_config_value(c, section + "." + raw_key, node.data());
    }
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not section.key=value", o));
        set_config_value(c, boost::trim_copy(o.substr(0, eq)), o.substr(eq + 1));
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    if (path.empty()) {
        std::istringstream empty;
        return parse_config(empty, overrides);
    }
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
    return parse_config(in, overrides);
}

namespace {

// Shortest decimal that round-trips.
std::string short_number(double v) { return fmt::format("{}", v); }

std::string join_numbers(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + short_number(v[i]);
    return out;
}

template <class T, class F>
std::string join_names(const std::vector<T>& v, F name) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + name(v[i]);
    return out;
}

}  // namespace

std::string render_config(const ExperimentConfig& c) {
    std::string s;
    s += "[regime]\n";
    s += fmt::format("regime = {}\nratio = {}\ngamma = {}\ndelta = {}\ntheta = {}\nlambda = {}\n", to_string(c.regime),
                     to_string(c.ratio), short_number(c.gamma), short_number(c.delta), short_number(c.theta),
                     short_number(c.lambda));
    s += "\n[data]\n";
    s += fmt::format("kind = {}\n", to_string(c.data));
    s += "\n[sweep]\n";
    s += fmt::format("epsilons = {}\nepsilon = {}\ncheckpoints = {}\nt_end = {}\nsamples = {}\nthreads = {}\n",
                     join_numbers(c.epsilons), short_number(c.epsilon),
                     join_names(c.checkpoints, [](Checkpoint k) { return to_string(k); }), short_number(c.t_end),
                     c.samples, c.threads);
    s += "\n[error]\n";
    s += fmt::format("s_err = {}\n", short_number(c.s_err));
    s += "\n[grid]\n";
    s += fmt::format("dx = {}\nmargin = {}\ndealias = {}\n", short_number(c.grid.dx), short_number(c.grid.margin),
                     c.grid.dealias ? "true" : "false");
    s += "\n[integrator]\n";
    s += fmt::format("method = {}\ncfl = {}\ndt = {}\nblowup_threshold = {}\nsolver_tol = {}\nsolver_max_iterations = {}\n",
                     to_string(c.method), short_number(c.cfl), short_number(c.dt), short_number(c.blowup_threshold),
                     short_number(c.solver.tol), c.solver.max_iterations);
    s += "\n[models]\n";
    s += fmt::format("models = {}\n", join_names(c.models, [](ModelKind k) { return to_string(k); }));
    return s;
}

std::string seed_config() {
    std::string s =
        "# Experiment configuration. Every key is optional; the values below are the defaults.\n"
        "#\n"
        "# [regime]   regime: long-wave (mu = eps) | camassa-holm (mu = eps^2)\n"
        "#            ratio: critical (gamma 0.64, delta 0.8) | non-critical (gamma 0.9, delta 0.5) | custom\n"
        "#            gamma, delta: used only with ratio = custom\n"
        "#            theta, lambda: BBM-trick and change-of-variable weights\n"
        "# [data]     kind: gaussian-localized | algebraic-nonlocalized | unidirectional-compatible\n"
        "# [sweep]    epsilons: sweep values; epsilon: single-run value\n"
        "#            checkpoints: any of t10, inv-eps, eps-m32\n"
        "#            t_end: run horizon, 0 = latest checkpoint; samples: uniform sample intervals\n"
        "#            threads: sweep workers, 0 = one per core\n"
        "# [error]    s_err: Sobolev index of the primary error (H^1 is always recorded too)\n"
        "# [grid]     dx: spacing; margin: L >= 2 (horizon + margin); dealias: 3/2-padded products\n"
        "# [integrator] method: abm4 | rk4; cfl: dt = cfl dx / c_max; dt: fixed step, 0 = automatic\n"
        "#            blowup_threshold: max-norm cap; solver_tol, solver_max_iterations: elliptic solve\n"
        "# [models]   models: GN (required), iB, KdV, eKdV, CL, weakly-coupled, unidirectional\n"
        "\n";
    return s + render_config(ExperimentConfig{});
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : render_config(cfg)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

// ---------------------------------------------------------------------------
// Grid, data, errors

GridPtr make_grid(const ExperimentConfig& cfg, double eps) {
    const double min_length = 2.0 * (cfg.horizon(eps) + cfg.grid.margin);
    return Grid::with_spacing(cfg.grid.dx, min_length, cfg.grid.dealias);
}

WaveField make_initial_data(DataKind kind, const GridPtr& grid, const RegimeParams& p) {
    const double s = p.gamma + p.delta;
    Field g;
    if (kind == DataKind::AlgebraicNonlocalized) {
        const double edge = 0.5 * grid->length();
        const double width = std::min(10.0, 0.25 * edge);
        // Smooth taper to zero over the last `width` before the seam.
        g = Field::from_function(grid, [edge, width](double x) {
            const double taper = 1.0 - smooth_step((std::abs(x) - (edge - 1.0 - width)) / width);
            return taper * std::cbrt(1.0 / (1.0 + 10.0 * x * x));
        });
    } else {
        g = Field::from_function(grid, [](double x) { return std::exp(-0.25 * x * x); });
    }

    WaveField w;
    if (kind == DataKind::Unidirectional) {
        w.zeta = g;
        w.vbar = reconstruct_vbar_from_zeta(g, p);
    } else {
        const Field vp = g;
        const Field vm = (2.0 / 3.0) * g;
        w.zeta = vp + vm;
        w.vbar = s * (vp - vm);
    }
    if (kind != DataKind::AlgebraicNonlocalized) {
        const double tail = std::max(std::abs(w.zeta[0]), std::abs(w.vbar[0]));
        if (tail > 1e-12)
            throw DomainError(fmt::format("grid too small: initial data is {} at the periodic seam", tail));
    }
    return w;
}

double combined_error(const WaveField& ref, const WaveField& approx, double s_err, const RegimeParams& p) {
    require_same_grid(ref.zeta, approx.zeta);
    require_same_grid(ref.vbar, approx.vbar);
    const double a = sobolev_norm(ref.zeta - approx.zeta, s_err);
    const double b = sobolev_norm(ref.vbar - approx.vbar, s_err) / (p.gamma + p.delta);
    return std::sqrt(a * a + b * b);
}

std::optional<std::size_t> ErrorSeries::checkpoint_index(Checkpoint c) const {
    const std::string tag = to_string(c);
    for (std::size_t i = 0; i < tags.size(); ++i) {
        std::vector<std::string> parts;
        boost::split(parts, tags[i], boost::is_any_of("+"));
        if (std::find(parts.begin(), parts.end(), tag) != parts.end()) return i;
    }
    return std::nullopt;
}

std::vector<double> sample_times(const ExperimentConfig& cfg, double eps, std::vector<std::string>* tags) {
    const double T = cfg.horizon(eps);
    std::vector<std::pair<double, std::string>> marks;
    for (int i = 0; i <= cfg.samples; ++i) marks.emplace_back(T * i / cfg.samples, "");
    for (Checkpoint c : cfg.checkpoints) {
        const double t = checkpoint_time(c, eps);
        if (t <= T * (1.0 + 1e-12)) marks.emplace_back(std::min(t, T), to_string(c));
    }
    std::stable_sort(marks.begin(), marks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> times;
    std::vector<std::string> out_tags;
    for (const auto& [t, tag] : marks) {
        if (!times.empty() && std::abs(times.back() - t) <= 1e-12 * std::max(1.0, t)) {
            if (!tag.empty()) out_tags.back() += (out_tags.back().empty() ? "" : "+") + tag;
            continue;
        }
        times.push_back(t);
        out_tags.push_back(tag);
    }
    if (tags) *tags = out_tags;
    return times;
}

double run_dt(const ExperimentConfig& cfg, const Grid& grid, const RegimeParams& p, double u_max) {
    if (cfg.dt > 0.0) return cfg.dt;
    double dt = std::numeric_limits<double>::infinity();
    for (ModelKind m : cfg.models) dt = std::min(dt, pick_dt(grid, p, m, u_max, cfg.cfl));
    return dt;
}

// ---------------------------------------------------------------------------
// Pipelines

namespace {

RhsFn gn_system(const RegimeParams& p, const SolverOptions& opts) {
    return [p, opts](double, const State& y) {
        const GnRates r = gn_rhs({y[0], y[1]}, p, opts);
        return State{r.dzeta_dt, r.dq_dt};
    };
}

struct Pipeline {
    RhsFn rhs;
    State y0;
    std::function<WaveField(double t, const State&)> observe;
};

Pipeline make_pipeline(ModelKind kind, const WaveField& data, const RegimeParams& p, const SolverOptions& opts) {
    switch (kind) {
        case ModelKind::GN: {
            const GnState s = make_gn_state(data.zeta, data.vbar, p);
            return {gn_system(p, opts), {s.zeta, s.q},
                    [p, opts](double, const State& y) { return WaveField{y[0], recover_vbar(y[0], y[1], p, opts)}; }};
        }
        case ModelKind::Unidirectional:
            return {unidirectional_system(p), {data.zeta}, [p](double, const State& y) {
                        return WaveField{y[0], reconstruct_vbar_from_zeta(y[0], p)};
                    }};
        case ModelKind::WeaklyCoupled: {
            const DecoupledState d = split_initial(data.zeta, data.vbar, p);
            const Field zero(data.zeta.grid_ptr());
            return {weakly_coupled_system(p), {d.v_plus_lambda, d.v_minus_lambda, zero, zero},
                    [p](double t, const State& y) {
                        return weakly_coupled_state({y[0], y[1], t}, {y[2], y[3], t}, p);
                    }};
        }
        default: {
            const DecoupledState d = split_initial(data.zeta, data.vbar, p);
            return {decoupled_system(p, kind), {d.v_plus_lambda, d.v_minus_lambda},
                    [p](double t, const State& y) { return reconstruct_state({y[0], y[1], t}, p); }};
        }
    }
}

struct RunSetup {
    RegimeParams p;
    GridPtr grid;
    WaveField data;
    IntegratorConfig ic;
    std::vector<double> times;
    std::vector<std::string> tags;
};

RunSetup prepare(const ExperimentConfig& cfg, double eps, const std::vector<ModelKind>& models) {
    cfg.validate();
    RunSetup r;
    r.p = cfg.params(eps);
    r.p.validate();
    r.grid = make_grid(cfg, eps);
    r.data = make_initial_data(cfg.data, r.grid, r.p);
    const double u_max = std::max(r.data.zeta.max_abs(), r.data.vbar.max_abs() / (r.p.gamma + r.p.delta));
    r.times = sample_times(cfg, eps, &r.tags);
    r.ic.method = cfg.method;
    r.ic.t_end = r.times.back();
    r.ic.blowup_threshold = cfg.blowup_threshold;
    ExperimentConfig sub = cfg;
    sub.models = models;
    r.ic.dt = run_dt(sub, *r.grid, r.p, u_max);
    for (ModelKind m : models) r.ic.omega_max = std::max(r.ic.omega_max, omega_bound(*r.grid, r.p, m, u_max));
    check_step(r.ic);
    return r;
}

// Runs GN, converting depth loss and non-finite states into a blow-up at the last time reached.
template <class F>
void run_reference(const RunSetup& r, const SolverOptions& opts, F&& on_sample) {
    Pipeline gn = make_pipeline(ModelKind::GN, r.data, r.p, opts);
    double t_reached = 0.0;
    RhsFn rhs = [&](double t, const State& y) {
        t_reached = std::max(t_reached, t);
        return gn.rhs(t, y);
    };
    std::size_t idx = 0;
    try {
        integrate(rhs, gn.y0, r.ic, r.times, [&](double t, const State& y) { on_sample(idx++, gn.observe(t, y)); });
    } catch (const DepthError& e) {
        throw BlowUpError(fmt::format("GN reference broke down: {}", e.what()), t_reached);
    } catch (const NonFiniteError& e) {
        throw BlowUpError(fmt::format("GN reference broke down: {}", e.what()), t_reached);
    }
}

}  // namespace

ErrorSeries run_comparison(const ExperimentConfig& cfg, double eps) {
    const RunSetup r = prepare(cfg, eps, cfg.models);
    ErrorSeries out;
    out.epsilon = eps;
    out.params = r.p;
    out.n_points = r.grid->size();
    out.length = r.grid->length();
    out.dt = r.ic.dt;
    out.config_hash = config_hash(cfg);
    out.times = r.times;
    out.tags = r.tags;

    std::vector<WaveField> ref(r.times.size());
    run_reference(r, cfg.solver, [&](std::size_t i, WaveField w) { ref[i] = std::move(w); });

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (ModelKind kind : cfg.models) {
        ModelSeries& ms = out.models[kind];
        ms.error_l2.assign(r.times.size(), nan);
        ms.error_h1.assign(r.times.size(), nan);
        if (kind == ModelKind::GN) {
            std::fill(ms.error_l2.begin(), ms.error_l2.end(), 0.0);
            std::fill(ms.error_h1.begin(), ms.error_h1.end(), 0.0);
            continue;
        }
        Pipeline pl = make_pipeline(kind, r.data, r.p, cfg.solver);
        std::size_t idx = 0;
        double t_reached = 0.0;
        RhsFn rhs = [&](double t, const State& y) {
            t_reached = std::max(t_reached, t);
            return pl.rhs(t, y);
        };
        auto observe = [&](double t, const State& y) {
            const WaveField w = pl.observe(t, y);
            ms.error_l2[idx] = combined_error(ref[idx], w, cfg.s_err, r.p);
            ms.error_h1[idx] = combined_error(ref[idx], w, 1.0, r.p);
            ++idx;
        };
        try {
            integrate(rhs, pl.y0, r.ic, r.times, observe);
        } catch (const BlowUpError& e) {
            ms.blowup_time = e.time();
            ms.failure = e.what();
        } catch (const DepthError& e) {
            ms.blowup_time = t_reached;
            ms.failure = e.what();
        } catch (const NonFiniteError& e) {
            ms.blowup_time = t_reached;
            ms.failure = e.what();
        }
    }
    return out;
}

std::optional<double> SweepTable::error(double eps, ModelKind m, Checkpoint c, bool h1) const {
    for (const SweepEntry& e : entries)
        if (e.epsilon == eps && e.model == m && e.checkpoint == c) return h1 ? e.error_h1 : e.error_l2;
    return std::nullopt;
}

RateFit convergence_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw DomainError("convergence_rate needs at least two points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [e, err] : points) {
        if (!(e > 0.0) || !(err > 0.0) || !std::isfinite(err))
            throw DomainError(fmt::format("convergence_rate: non-positive value ({}, {})", e, err));
        sx += std::log(e);
        sy += std::log(err);
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [e, err] : points) {
        const double dx = std::log(e) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(err) - my);
    }
    if (sxx == 0.0) throw DomainError("convergence_rate: all epsilons equal");
    RateFit f;
    f.slope = sxy / sxx;
    f.points = static_cast<int>(points.size());
    if (points.size() > 2) {
        double ssr = 0.0;
        for (const auto& [e, err] : points) {
            const double r = std::log(err) - (my + f.slope * (std::log(e) - mx));
            ssr += r * r;
        }
        f.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
    }
    return f;
}

void fit_slopes(SweepTable& t, bool use_h1) {
    t.slopes.clear();
    std::map<std::pair<ModelKind, Checkpoint>, std::vector<std::pair<double, double>>> groups;
    for (const SweepEntry& e : t.entries) {
        const double v = use_h1 ? e.error_h1 : e.error_l2;
        if (e.model == ModelKind::GN || !(v > 0.0) || !std::isfinite(v)) continue;
        groups[{e.model, e.checkpoint}].emplace_back(e.epsilon, v);
    }
    for (const auto& [key, pts] : groups) {
        if (pts.size() < 2) continue;
        try {
            t.slopes[key] = convergence_rate(pts);
        } catch (const DomainError&) {
        }
    }
}

SweepTable sweep_epsilon(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.epsilons.size() < 3) throw ConfigError("an epsilon sweep needs at least three values");
    const std::size_t n = cfg.epsilons.size();
    std::vector<std::optional<ErrorSeries>> results(n);
    std::vector<std::string> errors(n);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = run_comparison(cfg, cfg.epsilons[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SweepTable t;
    t.epsilons = cfg.epsilons;
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = cfg.epsilons[i];
        if (!results[i]) {
            t.failures[eps] = errors[i];
            continue;
        }
        const ErrorSeries& s = *results[i];
        for (Checkpoint c : cfg.checkpoints) {
            const auto idx = s.checkpoint_index(c);
            if (!idx) continue;
            for (ModelKind m : cfg.models) {
                const ModelSeries& ms = s.models.at(m);
                t.entries.push_back({eps, c, m, ms.error_l2[*idx], ms.error_h1[*idx]});
            }
        }
    }
    fit_slopes(t);
    return t;
}

ErrorSeries run_ztov_probe(const ExperimentConfig& cfg, double eps) {
    const RunSetup r = prepare(cfg, eps, {ModelKind::GN});
    ErrorSeries out;
    out.epsilon = eps;
    out.params = r.p;
    out.n_points = r.grid->size();
    out.length = r.grid->length();
    out.dt = r.ic.dt;
    out.config_hash = config_hash(cfg);
    out.times = r.times;
    out.tags = r.tags;
    ModelSeries& ms = out.models[ModelKind::GN];
    ms.error_l2.resize(r.times.size());
    ms.error_h1.resize(r.times.size());
    run_reference(r, cfg.solver, [&](std::size_t i, const WaveField& w) {
        ms.error_l2[i] = ztov_residual(w, Side::Right, r.p, cfg.s_err);
        ms.error_h1[i] = ztov_residual(w, Side::Right, r.p, 1.0);
    });
    return out;
}

PlateauSummary summarize_plateau(const std::vector<double>& times, const std::vector<double>& residual) {
    if (times.size() != residual.size() || times.size() < 2)
        throw DomainError("summarize_plateau: need matching series of length >= 2");
    const auto first = std::min_element(residual.begin(), residual.end());
    std::vector<double> late(first, residual.end());
    std::sort(late.begin(), late.end());
    const std::size_t m = late.size();
    PlateauSummary s;
    s.onset_time = times[static_cast<std::size_t>(first - residual.begin())];
    s.level = m % 2 ? late[m / 2] : 0.5 * (late[m / 2 - 1] + late[m / 2]);
    return s;
}

// ---------------------------------------------------------------------------
// Output

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

void write_series_csv(std::ostream& out, const ErrorSeries& s) {
    out << "time,model,error_L2,error_H1,checkpoint_tag\n";
    for (std::size_t i = 0; i < s.times.size(); ++i)
        for (const auto& [m, ms] : s.models)
            out << format_number(s.times[i]) << ',' << to_string(m) << ',' << format_number(ms.error_l2[i]) << ','
                << format_number(ms.error_h1[i]) << ',' << s.tags[i] << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepTable& t) {
    out << "epsilon,model,error_L2,error_H1,checkpoint_tag\n";
    for (const SweepEntry& e : t.entries)
        out << format_number(e.epsilon) << ',' << to_string(e.model) << ',' << format_number(e.error_l2) << ','
            << format_number(e.error_h1) << ',' << to_string(e.checkpoint) << '\n';
}

void write_series_dat(std::ostream& out, const ErrorSeries& s) {
    out << "# time";
    for (const auto& [m, ms] : s.models) out << ' ' << to_string(m);
    out << '\n';
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        out << format_number(s.times[i]);
        for (const auto& [m, ms] : s.models) out << ' ' << format_number(ms.error_l2[i]);
        out << '\n';
    }
}

namespace {

nlohmann::ordered_json environment_json() {
    nlohmann::ordered_json env;
#if defined(__VERSION__)
    env["compiler"] = __VERSION__;
#endif
    env["cxx_standard"] = static_cast<long>(__cplusplus);
    env["fft"] = std::string(fftw_version);
    env["hardware_threads"] = std::thread::hardware_concurrency();
    return env;
}

nlohmann::ordered_json params_json(const RegimeParams& p) {
    return {{"epsilon", p.epsilon}, {"mu", p.mu},        {"delta", p.delta},
            {"gamma", p.gamma},     {"theta", p.theta}, {"lambda", p.lambda}};
}

nlohmann::ordered_json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string series_json(const ExperimentConfig& cfg, const ErrorSeries& s) {
    nlohmann::ordered_json j;
    j["config"] = render_config(cfg);
    j["config_hash"] = s.config_hash;
    j["environment"] = environment_json();
    j["epsilon"] = s.epsilon;
    j["params"] = params_json(s.params);
    j["grid"] = {{"n_points", s.n_points}, {"length", s.length}, {"dx", s.length / s.n_points}};
    j["dt"] = s.dt;
    auto& models = j["models"];
    models = nlohmann::ordered_json::object();
    for (const auto& [m, ms] : s.models) {
        nlohmann::ordered_json e;
        e["blowup_time"] = ms.blowup_time ? nlohmann::ordered_json(*ms.blowup_time) : nlohmann::ordered_json(nullptr);
        if (!ms.failure.empty()) e["failure"] = ms.failure;
        for (Checkpoint c : {Checkpoint::T10, Checkpoint::InvEps, Checkpoint::EpsM32})
            if (auto idx = s.checkpoint_index(c))
                e["checkpoints"][to_string(c)] = {{"time", s.times[*idx]},
                                                  {"error_L2", number_or_null(ms.error_l2[*idx])},
                                                  {"error_H1", number_or_null(ms.error_h1[*idx])}};
        models[to_string(m)] = e;
    }
    return j.dump(2) + "\n";
}

std::string sweep_json(const ExperimentConfig& cfg, const SweepTable& t) {
    nlohmann::ordered_json j;
    j["config"] = render_config(cfg);
    j["config_hash"] = config_hash(cfg);
    j["environment"] = environment_json();
    j["epsilons"] = t.epsilons;
    auto& fails = j["failures"];
    fails = nlohmann::ordered_json::object();
    for (const auto& [e, msg] : t.failures) fails[format_number(e)] = msg;
    auto& slopes = j["slopes"];
    slopes = nlohmann::ordered_json::array();
    for (const auto& [key, fit] : t.slopes)
        slopes.push_back({{"model", to_string(key.first)},
                          {"checkpoint", to_string(key.second)},
                          {"slope", fit.slope},
                          {"stderr", fit.stderr_},
                          {"points", fit.points}});
    return j.dump(2) + "\n";
}

SweepTable read_sweep_csv(std::istream& in) {
    SweepTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty sweep file");
    boost::trim(line);
    if (line != "epsilon,model,error_L2,error_H1,checkpoint_tag")
        throw ConfigError("not a sweep table (unexpected header)");
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        boost::trim(line);
        if (line.empty()) continue;
        std::vector<std::string> cols;
        boost::split(cols, line, boost::is_any_of(","));
        if (cols.size() != 5) throw ConfigError(fmt::format("sweep row {}: expected 5 columns", row));
        SweepEntry e;
        e.epsilon = to_double("epsilon", cols[0]);
        e.model = parse_model_kind(cols[1]);
        e.error_l2 = cols[2] == "nan" ? std::numeric_limits<double>::quiet_NaN() : to_double("error_L2", cols[2]);
        e.error_h1 = cols[3] == "nan" ? std::numeric_limits<double>::quiet_NaN() : to_double("error_H1", cols[3]);
        e.checkpoint = parse_checkpoint(cols[4]);
        if (std::find(t.epsilons.begin(), t.epsilons.end(), e.epsilon) == t.epsilons.end())
            t.epsilons.push_back(e.epsilon);
        t.entries.push_back(e);
    }
    fit_slopes(t);
    return t;
}

}  // namespace gnwaves
