#include "gnwaves/timeint.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>

#include <fmt/format.h>

#include "gnwaves/errors.hpp"
#include "gnwaves/gn_model.hpp"
#include "gnwaves/scalar_models.hpp"

namespace gnwaves {

std::string to_string(Method m) { return m == Method::ABM4 ? "abm4" : "rk4"; }

Method parse_method(std::string_view name) {
    std::string key;
    for (char ch : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (key == "abm4") return Method::ABM4;
    if (key == "rk4") return Method::RK4;
    throw ConfigError(fmt::format("unknown integrator '{}'", name));
}

double stability_limit(Method m) {
    // ABM4 PECE grows by ~2% per step at omega*dt = 0.75; RK4 is neutral to 2*sqrt(2).
    return m == Method::ABM4 ? 0.75 : 2.8;
}

void check_step(const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw DomainError(fmt::format("time step {} must be positive", cfg.dt));
    if (!(cfg.t_end >= 0.0)) throw DomainError("t_end must be >= 0");
    if (cfg.omega_max > 0.0 && cfg.omega_max * cfg.dt > stability_limit(cfg.method))
        throw DomainError(fmt::format("dt = {} rejected: omega_max*dt = {:.3g} exceeds {} limit {}",
                                      cfg.dt, cfg.omega_max * cfg.dt, to_string(cfg.method),
                                      stability_limit(cfg.method)));
}

State axpy(double a, const State& x, const State& y) {
    State out = y;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto o = out[i].values();
        const auto xv = x[i].values();
        for (std::size_t j = 0; j < o.size(); ++j) o[j] += a * xv[j];
    }
    return out;
}

double max_abs(const State& y) {
    double m = 0.0;
    for (const Field& f : y) m = std::max(m, f.max_abs());
    return m;
}

namespace {

// y + dt * sum_i w_i f_i
State combine(const State& y, double dt, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (std::size_t c = 0; c < out.size(); ++c) {
        auto o = out[c].values();
        for (const auto& [w, f] : terms) {
            const auto fv = (*f)[c].values();
            const double s = dt * w;
            for (std::size_t j = 0; j < o.size(); ++j) o[j] += s * fv[j];
        }
    }
    return out;
}

void check_blowup(const State& y, double t, double threshold) {
    const double m = max_abs(y);
    if (!std::isfinite(m) || m > threshold)
        throw BlowUpError(fmt::format("solution blew up at t = {} (max norm {})", t, m), t);
}

}  // namespace

State rk4_step(const RhsFn& rhs, double t, const State& y, double dt) {
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + 0.5 * dt, combine(y, dt, {{0.5, &k1}}));
    const State k3 = rhs(t + 0.5 * dt, combine(y, dt, {{0.5, &k2}}));
    const State k4 = rhs(t + dt, combine(y, dt, {{1.0, &k3}}));
    return combine(y, dt, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}});
}

State integrate(const RhsFn& rhs, const State& y0, const IntegratorConfig& cfg,
                const std::vector<double>& stops, const Observer& observe) {
    check_step(cfg);
    std::vector<double> marks;
    for (double s : stops)
        if (s > 0.0 && s < cfg.t_end) marks.push_back(s);
    marks.push_back(cfg.t_end);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
                marks.end());

    State y = y0;
    double t = 0.0;
    if (observe) observe(t, y);
    if (cfg.t_end == 0.0) return y;

    // f_n, f_{n-1}, f_{n-2}, f_{n-3} (front = newest)
    std::deque<State> history;
    double h_prev = 0.0;

    for (double stop : marks) {
        const double span = stop - t;
        if (span <= 0.0) continue;
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt * (1.0 - 1e-12))));
        const double h = span / static_cast<double>(steps);
        if (std::abs(h - h_prev) > 1e-12 * h) history.clear();
        h_prev = h;
        const double t0 = t;

        for (long i = 1; i <= steps; ++i) {
            const double t_next = (i == steps) ? stop : t0 + static_cast<double>(i) * h;
            if (cfg.method == Method::RK4) {
                y = rk4_step(rhs, t, y, h);
            } else {
                if (history.empty()) history.push_front(rhs(t, y));
                if (history.size() < 4) {
                    y = rk4_step(rhs, t, y, h);
                    history.push_front(rhs(t_next, y));
                } else {
                    const State& f0 = history[0];
                    const State& f1 = history[1];
                    const State& f2 = history[2];
                    const State& f3 = history[3];
                    const State pred =
                        combine(y, h, {{55.0 / 24.0, &f0}, {-59.0 / 24.0, &f1}, {37.0 / 24.0, &f2}, {-9.0 / 24.0, &f3}});
                    const State fp = rhs(t_next, pred);
                    y = combine(y, h, {{9.0 / 24.0, &fp}, {19.0 / 24.0, &f0}, {-5.0 / 24.0, &f1}, {1.0 / 24.0, &f2}});
                    history.pop_back();
                    history.push_front(rhs(t_next, y));
                }
            }
            t = t_next;
            check_blowup(y, t, cfg.blowup_threshold);
        }
        if (observe) observe(t, y);
    }
    return y;
}

namespace {

double nonlinear_margin(const RegimeParams& p, double u_max) {
    return p.epsilon * std::abs(base_coeffs(p).alpha1) * u_max;
}

}  // namespace

double pick_dt(const Grid& grid, const RegimeParams& p, ModelKind kind, double u_max, double cfl) {
    if (!(cfl > 0.0)) throw DomainError("cfl must be positive");
    double c_max = 0.0;
    const auto ks = grid.wavenumbers();
    if (kind == ModelKind::GN) {
        const double c = gn_dispersion_constant(p);
        for (double k : ks) c_max = std::max(c_max, std::pow(1.0 + p.mu * c * k * k, -1.5));
    } else {
        const ScalarCoeffs sc = model_coeffs(p, kind, Direction::Right);
        const double mb = p.mu * sc.beta;
        const double mn = p.mu * sc.nu;
        for (double k : ks) {
            const double den = 1.0 + mb * k * k;
            const double group = ((1.0 - 3.0 * mn * k * k) * den - (k - mn * k * k * k) * 2.0 * mb * k) / (den * den);
            c_max = std::max(c_max, std::abs(group));
        }
        if (kind == ModelKind::WeaklyCoupled) c_max = std::max(c_max, 1.0);
    }
    c_max += nonlinear_margin(p, u_max);
    return cfl * grid.dx() / c_max;
}

double omega_bound(const Grid& grid, const RegimeParams& p, ModelKind kind, double u_max) {
    double w = 0.0;
    const auto ks = grid.wavenumbers();
    if (kind == ModelKind::GN) {
        for (double k : ks) w = std::max(w, dispersion_omega(k, p));
    } else {
        const ScalarCoeffs sc = model_coeffs(p, kind, Direction::Right);
        for (double k : ks) w = std::max(w, std::abs(scalar_linear_omega(k, sc, p, true)));
        if (kind == ModelKind::WeaklyCoupled) w = std::max(w, grid.k_max());
    }
    return w + grid.k_max() * nonlinear_margin(p, u_max);
}

}  // namespace gnwaves
