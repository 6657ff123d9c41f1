#include "gnwaves/gn_model.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gnwaves/errors.hpp"

namespace gnwaves {

namespace {

double dot(const Field& a, const Field& b) {
    double s = 0.0;
    for (int j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

Field cube(const Field& f) { return f * f * f; }

struct Brackets {
    Field a;   // dx(h1 V / H)
    Field b;   // dx(h2 V / H)
    Field p1;  // dx(h2^3 a)
    Field p2;  // dx(h1^3 b)
};

Brackets brackets(const Field& h1, const Field& h2, const Field& V, const RegimeParams& p) {
    const Field H = h1 + p.gamma * h2;
    Brackets br;
    br.a = derivative(h1 * V / H);
    br.b = derivative(h2 * V / H);
    br.p1 = derivative(cube(h2) * br.a);
    br.p2 = derivative(cube(h1) * br.b);
    return br;
}

void check_inputs(const Field& h1, const Field& h2, const Field& V) {
    require_same_grid(h1, h2);
    require_same_grid(h1, V);
    for (int j = 0; j < h1.size(); ++j)
        if (!(h1[j] >= kDepthFloor) || !(h2[j] >= kDepthFloor))
            throw DepthError(fmt::format("layer depth below floor at x = {}", h1.grid().x(j)));
}

}  // namespace

Depths layer_depths(const Field& zeta, const RegimeParams& p) {
    if (!zeta.all_finite()) throw NonFiniteError("interface deformation is not finite");
    Depths d{(-p.epsilon) * zeta + 1.0, p.epsilon * zeta + 1.0 / p.delta};
    for (int j = 0; j < zeta.size(); ++j) {
        if (d.h1[j] < kDepthFloor || d.h2[j] < kDepthFloor)
            throw DepthError(fmt::format("layer depth below {} at x = {} (h1 = {}, h2 = {})", kDepthFloor,
                                         zeta.grid().x(j), d.h1[j], d.h2[j]));
    }
    return d;
}

Field qbar_apply(const Field& h1, const Field& h2, const Field& V, const RegimeParams& p) {
    check_inputs(h1, h2, V);
    const Brackets br = brackets(h1, h2, V, p);
    Field num = h1 * br.p1 + p.gamma * (h2 * br.p2);
    return (-1.0 / 3.0) * (num / (h1 * h2));
}

Field rbar_apply(const Field& h1, const Field& h2, const Field& V, const RegimeParams& p) {
    check_inputs(h1, h2, V);
    const Brackets br = brackets(h1, h2, V, p);
    const Field H = h1 + p.gamma * h2;
    const Field s1 = h2 * br.a;
    const Field s2 = h1 * br.b;
    Field quad = 0.5 * (s1 * s1 - p.gamma * (s2 * s2));
    Field inner = (h1 / h2) * br.p1 - p.gamma * ((h2 / h1) * br.p2);
    return quad + (1.0 / 3.0) * ((V / H) * inner);
}

Field gn_momentum(const Field& zeta, const Field& vbar, const RegimeParams& p) {
    if (p.mu == 0.0) return vbar;
    const Depths d = layer_depths(zeta, p);
    return vbar + p.mu * qbar_apply(d.h1, d.h2, vbar, p);
}

GnState make_gn_state(const Field& zeta, const Field& vbar, const RegimeParams& p) {
    require_same_grid(zeta, vbar);
    return {zeta, gn_momentum(zeta, vbar, p)};
}

Field recover_vbar(const Field& zeta, const Field& q, const RegimeParams& p, const SolverOptions& opts,
                   SolveStats* stats) {
    require_same_grid(zeta, q);
    if (!(opts.tol > 0.0)) throw DomainError("recover_vbar: tolerance must be positive");
    if (!q.all_finite()) throw NonFiniteError("recover_vbar: non-finite momentum");
    if (p.mu == 0.0) {
        if (stats) *stats = {0, 0.0};
        return q;
    }
    const Depths d = layer_depths(zeta, p);
    const Field& h1 = d.h1;
    const Field& h2 = d.h2;
    const Field H = h1 + p.gamma * h2;
    const Field h12 = h1 * h2;
    const Field diag = h12 * H;
    const Field h1c = cube(h1);
    const Field h2c = cube(h2);
    const double m3 = p.mu / 3.0;

    // Symmetric positive definite form in W = vbar / H.
    auto apply_s = [&](const Field& W) {
        Field t1 = h1 * derivative(h2c * derivative(h1 * W));
        Field t2 = h2 * derivative(h1c * derivative(h2 * W));
        return diag * W - m3 * (t1 + p.gamma * t2);
    };
    const double a0 = (p.gamma + p.delta) / (p.delta * p.delta);
    const double a1 = m3 * (1.0 / (p.delta * p.delta * p.delta) + p.gamma / (p.delta * p.delta));
    auto precondition = [&](const Field& r) {
        return apply_multiplier(r, [a0, a1](double k) { return 1.0 / (a0 + a1 * k * k); });
    };
    // Residual of the original equation: r_S / (h1 h2).
    auto original_residual = [&](const Field& r) {
        double s = 0.0;
        for (int j = 0; j < r.size(); ++j) {
            const double v = r[j] / h12[j];
            s += v * v;
        }
        return std::sqrt(s);
    };

    const double qnorm = std::sqrt(dot(q, q));
    if (qnorm == 0.0) {
        if (stats) *stats = {0, 0.0};
        return Field(q.grid_ptr());
    }
    const Field b = h12 * q;
    Field W = precondition(b);
    Field r = b - apply_s(W);
    double res = original_residual(r) / qnorm;
    int it = 0;
    if (res > opts.tol) {
        Field z = precondition(r);
        Field dir = z;
        double rz = dot(r, z);
        while (res > opts.tol) {
            if (it >= opts.max_iterations)
                throw ConvergenceError(
                    fmt::format("elliptic solve did not converge in {} iterations (residual {:.3e})", it, res), it,
                    res);
            ++it;
            const Field sd = apply_s(dir);
            const double alpha = rz / dot(dir, sd);
            W += alpha * dir;
            r -= alpha * sd;
            res = original_residual(r) / qnorm;
            if (!std::isfinite(res))
                throw ConvergenceError("elliptic solve produced non-finite residual", it, res);
            z = precondition(r);
            const double rz_new = dot(r, z);
            dir = z + (rz_new / rz) * dir;
            rz = rz_new;
        }
    }
    if (stats) *stats = {it, res};
    return H * W;
}

GnRates gn_rhs(const GnState& state, const RegimeParams& p, const SolverOptions& opts, Field* vbar_out) {
    require_same_grid(state.zeta, state.q);
    if (!state.q.all_finite()) throw NonFiniteError("gn_rhs: non-finite momentum");
    const Depths d = layer_depths(state.zeta, p);
    const Field vbar = recover_vbar(state.zeta, state.q, p, opts);
    const Field H = d.h1 + p.gamma * d.h2;

    const Field mass_flux = (d.h1 * d.h2 / H) * vbar;
    Field momentum_flux = (p.gamma + p.delta) * state.zeta;
    if (p.epsilon != 0.0) {
        const Field shape = (d.h1 * d.h1 - p.gamma * (d.h2 * d.h2)) / (H * H);
        momentum_flux += (0.5 * p.epsilon) * (shape * (vbar * vbar));
        if (p.mu != 0.0) momentum_flux -= (p.mu * p.epsilon) * rbar_apply(d.h1, d.h2, vbar, p);
    }
    GnRates rates{-derivative(mass_flux), -derivative(momentum_flux)};
    if (!rates.dzeta_dt.all_finite() || !rates.dq_dt.all_finite())
        throw NonFiniteError("gn_rhs: non-finite rates");
    if (vbar_out) *vbar_out = vbar;
    return rates;
}

GnRates gn_consistency_residual(const Field& zeta, const Field& vbar, const Field& zeta_t, const Field& q_t,
                                const RegimeParams& p) {
    const Depths d = layer_depths(zeta, p);
    const Field H = d.h1 + p.gamma * d.h2;
    Field first = zeta_t + derivative((d.h1 * d.h2 / H) * vbar);
    Field flux = (p.gamma + p.delta) * zeta;
    if (p.epsilon != 0.0) {
        const Field shape = (d.h1 * d.h1 - p.gamma * (d.h2 * d.h2)) / (H * H);
        flux += (0.5 * p.epsilon) * (shape * (vbar * vbar));
        if (p.mu != 0.0) flux -= (p.mu * p.epsilon) * rbar_apply(d.h1, d.h2, vbar, p);
    }
    Field second = q_t + derivative(flux);
    return {std::move(first), std::move(second)};
}

double dispersion_omega(double k, const RegimeParams& p) {
    const double c = gn_dispersion_constant(p);
    return std::abs(k) / std::sqrt(1.0 + p.mu * c * k * k);
}

ShearStability shear_system_stability(double k, const RegimeParams& p) {
    const double c = gn_dispersion_constant(p);
    ShearStability s;
    s.omega2 = k * k - p.mu * k * k * k * k * c;
    s.stable = s.omega2 >= 0.0;
    s.omega = s.stable ? std::sqrt(s.omega2) : 0.0;
    return s;
}

double shear_instability_threshold(const RegimeParams& p) {
    if (p.mu == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(p.mu * gn_dispersion_constant(p));
}

}  // namespace gnwaves
