#pragma once

// Approximate solutions built from scalar solves:
//   decoupled   (zeta, vbar) = (v+ + v-, (gamma+delta)(v+ - v-)),
//               v+- = (1 +- mu lambda dx^2)^{-1} v+-^lambda, each v+-^lambda a scalar wave
//   corrector   (dt + dx) w+ = F+, (dt - dx) w- = F-, w+-(0) = 0
//   weakly coupled = decoupled + (w+ + w-, (gamma+delta)(w+ - w-))
//   unidirectional zeta solves one right-going scalar equation, vbar is slaved to it.
// Everything is evolved in lab time on the shared periodic grid.

#include <functional>

#include "gnwaves/params.hpp"
#include "gnwaves/spectral.hpp"
#include "gnwaves/timeint.hpp"

namespace gnwaves {

struct WaveField {
    Field zeta;
    Field vbar;
};

struct DecoupledState {
    Field v_plus_lambda;
    Field v_minus_lambda;
    double time = 0.0;
};

struct CorrectorState {
    Field w_plus;
    Field w_minus;
    double time = 0.0;
};

struct Forcing {
    Field plus;
    Field minus;
};

/// v+-^lambda(0) = (1 +- mu lambda dx^2) (zeta0 +- v0/(gamma+delta)) / 2.
DecoupledState split_initial(const Field& zeta0, const Field& v0, const RegimeParams& p);

/// The physical waves v+- = (1 +- mu lambda dx^2)^{-1} v+-^lambda.
std::pair<Field, Field> physical_waves(const DecoupledState& d, const RegimeParams& p);

WaveField reconstruct_state(const DecoupledState& d, const RegimeParams& p);

/// Coupling bracket of the right-going component, a = u_l, b = u_r, with
/// a_t, b_t their time derivatives (product rule applied to every dt term).
Field coupling_bracket_left(const Field& a, const Field& b, const Field& a_t, const Field& b_t,
                            const RegimeParams& p, const BaseCoeffs& c);
/// Same for the left-going component.
Field coupling_bracket_right(const Field& a, const Field& b, const Field& a_t, const Field& b_t,
                             const RegimeParams& p, const BaseCoeffs& c);

/// F+ = -[f_l(v+, v-) - f_l(v+, 0)], F- = -[f_r(v+, v-) - f_r(0, v-)], time
/// derivatives replaced by dt v+ = -dx v+, dt v- = +dx v-.
Forcing coupling_forcing(const Field& v_plus, const Field& v_minus, const RegimeParams& p, const BaseCoeffs& c);

/// Forcing as a function of time and the corrector state.
using ForcingFn = std::function<Forcing(double t, const CorrectorState& c)>;

/// d/dt (w+, w-) = (-dx w+ + F+, dx w- + F-).
CorrectorState corrector_rates(const CorrectorState& c, const Forcing& f);

/// One RK4 step of the forced transport pair.
CorrectorState step_corrector(const CorrectorState& c, const ForcingFn& forcing, double dt);

WaveField weakly_coupled_state(const DecoupledState& d, const CorrectorState& c, const RegimeParams& p);

/// Scalar right-hand side with the unidirectional coefficients, lab frame.
Field unidirectional_rhs(const Field& zeta, const RegimeParams& p);

/// vbar = (h1 + gamma h2)/(h1 h2) * vlow[zeta] with the theta = lambda = 0
/// reconstruction coefficients.
Field reconstruct_vbar_from_zeta(const Field& zeta, const RegimeParams& p);

enum class Side { Left, Right };

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

/// Smooth C-infinity step equal to 0 for x < x0 - width/2 and 1 for
/// x > x0 + width/2 (Right), or its complement (Left).
Field half_line_window(const GridPtr& grid, Side side, double width = 10.0, double x0 = 0.0);

/// |chi (vbar - reconstruct(zeta))|_{H^s} / |chi vbar|_{H^s}; 1 when the
/// windowed velocity vanishes.
double ztov_residual(const WaveField& state, Side side, const RegimeParams& p, double s = 0.0);

// Semidiscrete systems for the integrator.

/// State {v+^lambda, v-^lambda}; both waves evolve with the masked decoupled coefficients.
RhsFn decoupled_system(const RegimeParams& p, ModelKind kind);
/// State {v+^lambda, v-^lambda, w+, w-}; CL waves plus the corrector.
RhsFn weakly_coupled_system(const RegimeParams& p);
/// State {zeta}.
RhsFn unidirectional_system(const RegimeParams& p);

}  // namespace gnwaves
