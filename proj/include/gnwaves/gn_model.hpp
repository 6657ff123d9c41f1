#pragma once

// Two-layer Green-Naghdi system in shear layer-mean velocity form, evolved
// in the variables (zeta, q) with q = vbar + mu*Qbar[h1,h2] vbar:
//
//   zeta_t + dx( h1 h2 / H vbar ) = 0
//   q_t + (gamma+delta) zeta_x + eps/2 dx( (h1^2 - gamma h2^2)/H^2 vbar^2 ) = mu eps dx( Rbar vbar )
//
// with h1 = 1 - eps zeta, h2 = 1/delta + eps zeta, H = h1 + gamma h2.

#include <utility>

#include "gnwaves/params.hpp"
#include "gnwaves/spectral.hpp"

namespace gnwaves {

inline constexpr double kDepthFloor = 1e-6;

struct Depths {
    Field h1;
    Field h2;
};

/// h1, h2 for a deformation; throws DepthError if either drops below kDepthFloor.
Depths layer_depths(const Field& zeta, const RegimeParams& p);

Field qbar_apply(const Field& h1, const Field& h2, const Field& V, const RegimeParams& p);
Field rbar_apply(const Field& h1, const Field& h2, const Field& V, const RegimeParams& p);

/// q = vbar + mu*Qbar[h1,h2] vbar.
Field gn_momentum(const Field& zeta, const Field& vbar, const RegimeParams& p);

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;  ///< |(I + mu Qbar) vbar - q| / |q|
};

struct SolverOptions {
    double tol = 1e-12;
    int max_iterations = 500;
};

/// Solves (I + mu Qbar[h1,h2]) vbar = q by preconditioned conjugate
/// gradients on the symmetrised operator (vbar = H W). Throws
/// ConvergenceError at the iteration cap.
Field recover_vbar(const Field& zeta, const Field& q, const RegimeParams& p,
                   const SolverOptions& opts = {}, SolveStats* stats = nullptr);

struct GnState {
    Field zeta;
    Field q;
};

struct GnRates {
    Field dzeta_dt;
    Field dq_dt;
};

/// Right-hand side of the system; `vbar_out`, when given, receives the
/// recovered velocity.
GnRates gn_rhs(const GnState& state, const RegimeParams& p, const SolverOptions& opts = {},
               Field* vbar_out = nullptr);

/// Builds (zeta, q) from (zeta, vbar).
GnState make_gn_state(const Field& zeta, const Field& vbar, const RegimeParams& p);

/// Residuals of both equations for a candidate (zeta, vbar) trajectory,
/// given its time derivatives zeta_t and q_t = d/dt(vbar + mu Qbar vbar).
GnRates gn_consistency_residual(const Field& zeta, const Field& vbar, const Field& zeta_t,
                                const Field& q_t, const RegimeParams& p);

/// Positive branch of omega^2 (1 + mu k^2 C) = k^2.
double dispersion_omega(double k, const RegimeParams& p);

struct ShearStability {
    bool stable = true;
    double omega = 0.0;   ///< sqrt(omega2) when stable
    double omega2 = 0.0;  ///< k^2 - mu k^4 C
};

/// Linear analysis of the shear-velocity system: omega^2 = k^2 - mu k^4 C.
ShearStability shear_system_stability(double k, const RegimeParams& p);

/// Smallest |k| at which the shear-velocity system turns unstable (inf if mu = 0).
double shear_instability_threshold(const RegimeParams& p);

}  // namespace gnwaves
