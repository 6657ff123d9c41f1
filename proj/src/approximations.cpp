#include "gnwaves/approximations.hpp"

#include <cmath>

#include "gnwaves/errors.hpp"
#include "gnwaves/gn_model.hpp"
#include "gnwaves/scalar_models.hpp"

namespace gnwaves {

DecoupledState split_initial(const Field& zeta0, const Field& v0, const RegimeParams& p) {
    require_same_grid(zeta0, v0);
    const double s = p.gamma + p.delta;
    const Field plus = 0.5 * (zeta0 + (1.0 / s) * v0);
    const Field minus = 0.5 * (zeta0 - (1.0 / s) * v0);
    const double a = p.mu * p.lambda;
    // (1 + a dx^2) = helmholtz_apply(., -a), (1 - a dx^2) = helmholtz_apply(., a)
    return {helmholtz_apply(plus, -a), helmholtz_apply(minus, a), 0.0};
}

std::pair<Field, Field> physical_waves(const DecoupledState& d, const RegimeParams& p) {
    require_same_grid(d.v_plus_lambda, d.v_minus_lambda);
    const double a = p.mu * p.lambda;
    return {helmholtz_inverse(d.v_plus_lambda, -a), helmholtz_inverse(d.v_minus_lambda, a)};
}

WaveField reconstruct_state(const DecoupledState& d, const RegimeParams& p) {
    auto [vp, vm] = physical_waves(d, p);
    return {vp + vm, (p.gamma + p.delta) * (vp - vm)};
}

namespace {

// Polynomial and kappa3 flux of f_l, before the outer dx.
Field transport_flux(const Field& a, const Field& b, const Field& axx, const Field& bxx, const Field& ax,
                     const Field& bx, const RegimeParams& p, const BaseCoeffs& c) {
    const double eps = p.epsilon;
    const Field diff = a - b;
    const Field sum = a + b;
    Field flux = (0.5 * eps * c.alpha1) * ((a + (1.0 / 3.0) * b) * diff);
    flux += (eps * eps * c.alpha2 / 3.0) * (diff * a * sum);
    flux += (eps * eps * eps * c.alpha3 / 4.0) * ((a - 0.2 * b) * diff * (sum * sum));
    const Field dx_diff = ax - bx;
    flux += (p.mu * eps * c.kappa3) * ((1.0 / 3.0) * (diff * (axx - bxx)) + 0.5 * (dx_diff * dx_diff));
    return flux;
}

// -mu nu dx^2 dt(a - b) - mu eps dt[ k1(a a_xx - b b_xx) + k2(b a_xx - a b_xx) + (k1 + k2/2)(a_x^2 - b_x^2) ]
Field time_terms(const Field& a, const Field& b, const Field& a_t, const Field& b_t, const Field& axx,
                 const Field& bxx, const Field& ax, const Field& bx, const RegimeParams& p, const BaseCoeffs& c) {
    const Field atxx = derivative(a_t, 2);
    const Field btxx = derivative(b_t, 2);
    const Field atx = derivative(a_t, 1);
    const Field btx = derivative(b_t, 1);
    Field out = (-p.mu * c.nu) * (atxx - btxx);
    const double k1 = c.kappa1;
    const double k2 = c.kappa2;
    Field bracket_t = k1 * (a_t * axx + a * atxx - b_t * bxx - b * btxx);
    bracket_t += k2 * (b_t * axx + b * atxx - a_t * bxx - a * btxx);
    bracket_t += (2.0 * (k1 + 0.5 * k2)) * (ax * atx - bx * btx);
    out -= (p.mu * p.epsilon) * bracket_t;
    return out;
}

}  // namespace

Field coupling_bracket_left(const Field& a, const Field& b, const Field& a_t, const Field& b_t,
                            const RegimeParams& p, const BaseCoeffs& c) {
    const Field ax = derivative(a, 1), bx = derivative(b, 1);
    const Field axx = derivative(a, 2), bxx = derivative(b, 2);
    return derivative(transport_flux(a, b, axx, bxx, ax, bx, p, c)) +
           time_terms(a, b, a_t, b_t, axx, bxx, ax, bx, p, c);
}

Field coupling_bracket_right(const Field& a, const Field& b, const Field& a_t, const Field& b_t,
                             const RegimeParams& p, const BaseCoeffs& c) {
    // f_r(a, b) is f_l(b, a) with the transport part sign-flipped.
    const Field ax = derivative(a, 1), bx = derivative(b, 1);
    const Field axx = derivative(a, 2), bxx = derivative(b, 2);
    return time_terms(b, a, b_t, a_t, bxx, axx, bx, ax, p, c) -
           derivative(transport_flux(b, a, bxx, axx, bx, ax, p, c));
}

Forcing coupling_forcing(const Field& v_plus, const Field& v_minus, const RegimeParams& p, const BaseCoeffs& c) {
    require_same_grid(v_plus, v_minus);
    if (!v_plus.all_finite() || !v_minus.all_finite()) throw NonFiniteError("coupling_forcing: non-finite wave");
    const Field zero(v_plus.grid_ptr());
    const Field vp_t = -derivative(v_plus);
    const Field vm_t = derivative(v_minus);
    Field plus = coupling_bracket_left(v_plus, zero, vp_t, zero, p, c) -
                 coupling_bracket_left(v_plus, v_minus, vp_t, vm_t, p, c);
    Field minus = coupling_bracket_right(zero, v_minus, zero, vm_t, p, c) -
                  coupling_bracket_right(v_plus, v_minus, vp_t, vm_t, p, c);
    return {std::move(plus), std::move(minus)};
}

CorrectorState corrector_rates(const CorrectorState& c, const Forcing& f) {
    require_same_grid(c.w_plus, f.plus);
    require_same_grid(c.w_minus, f.minus);
    if (!f.plus.all_finite() || !f.minus.all_finite()) throw NonFiniteError("corrector: non-finite forcing");
    return {f.plus - derivative(c.w_plus), f.minus + derivative(c.w_minus), c.time};
}

CorrectorState step_corrector(const CorrectorState& c, const ForcingFn& forcing, double dt) {
    if (!(dt > 0.0)) throw DomainError("step_corrector: dt must be positive");
    const RhsFn rhs = [&](double t, const State& y) {
        const CorrectorState s{y[0], y[1], t};
        const CorrectorState r = corrector_rates(s, forcing(t, s));
        return State{r.w_plus, r.w_minus};
    };
    const State next = rk4_step(rhs, c.time, State{c.w_plus, c.w_minus}, dt);
    return {next[0], next[1], c.time + dt};
}

WaveField weakly_coupled_state(const DecoupledState& d, const CorrectorState& c, const RegimeParams& p) {
    if (std::abs(d.time - c.time) > 1e-12 * std::max(1.0, std::abs(d.time)))
        throw DomainError("weakly_coupled_state: decoupled and corrector times differ");
    WaveField w = reconstruct_state(d, p);
    w.zeta += c.w_plus + c.w_minus;
    w.vbar += (p.gamma + p.delta) * (c.w_plus - c.w_minus);
    return w;
}

Field unidirectional_rhs(const Field& zeta, const RegimeParams& p) {
    return scalar_rhs(zeta, unidirectional_coeffs(p), p, true);
}

Field reconstruct_vbar_from_zeta(const Field& zeta, const RegimeParams& p) {
    const ScalarCoeffs c = reconstruction_coeffs(p);
    const Depths d = layer_depths(zeta, p);
    const double eps = p.epsilon;
    const Field z2 = zeta * zeta;
    const Field zxx = derivative(zeta, 2);
    const Field zx = derivative(zeta, 1);
    Field low = zeta;
    low += (eps * c.alpha1 / 2.0) * z2;
    low += (eps * eps * c.alpha2 / 3.0) * (z2 * zeta);
    low += (eps * eps * eps * c.alpha3 / 4.0) * (z2 * z2);
    low += (p.mu * c.nu) * zxx;
    low += (p.mu * eps) * (c.kappa1 * (zeta * zxx) + c.kappa2 * (zx * zx));
    const Field factor = (d.h1 + p.gamma * d.h2) / (d.h1 * d.h2);
    return factor * low;
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

Field half_line_window(const GridPtr& grid, Side side, double width, double x0) {
    if (!(width > 0.0)) throw DomainError("window width must be positive");
    return Field::from_function(grid, [&](double x) {
        const double step = smooth_step((x - x0) / width + 0.5);
        return side == Side::Right ? step : 1.0 - step;
    });
}

double ztov_residual(const WaveField& state, Side side, const RegimeParams& p, double s) {
    require_same_grid(state.zeta, state.vbar);
    const Field chi = half_line_window(state.zeta.grid_ptr(), side);
    const Field diff = state.vbar - reconstruct_vbar_from_zeta(state.zeta, p);
    const double denom = sobolev_norm(chi * state.vbar, s);
    if (denom == 0.0) return 1.0;
    return sobolev_norm(chi * diff, s) / denom;
}

RhsFn decoupled_system(const RegimeParams& p, ModelKind kind) {
    const ScalarCoeffs right = model_coeffs(p, kind, Direction::Right);
    const ScalarCoeffs left = model_coeffs(p, kind, Direction::Left);
    return [p, right, left](double, const State& y) {
        return State{scalar_rhs(y[0], right, p, true), scalar_rhs(y[1], left, p, true)};
    };
}

RhsFn weakly_coupled_system(const RegimeParams& p) {
    const ScalarCoeffs right = decoupled_coeffs(p, Direction::Right);
    const ScalarCoeffs left = decoupled_coeffs(p, Direction::Left);
    const BaseCoeffs base = base_coeffs(p);
    return [p, right, left, base](double t, const State& y) {
        const DecoupledState d{y[0], y[1], t};
        auto [vp, vm] = physical_waves(d, p);
        const Forcing f = coupling_forcing(vp, vm, p, base);
        const CorrectorState r = corrector_rates({y[2], y[3], t}, f);
        return State{scalar_rhs(y[0], right, p, true), scalar_rhs(y[1], left, p, true), r.w_plus, r.w_minus};
    };
}

RhsFn unidirectional_system(const RegimeParams& p) {
    const ScalarCoeffs c = unidirectional_coeffs(p);
    return [p, c](double, const State& y) { return State{scalar_rhs(y[0], c, p, true)}; };
}

}  // namespace gnwaves
