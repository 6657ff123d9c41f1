#pragma once

// The scalar model family
//   (1 - mu*beta dx^2) u_t + dir*[ (u_x) + eps a1 u u_x + eps^2 a2 u^2 u_x + eps^3 a3 u^3 u_x
//                                 + mu nu u_xxx + mu eps dx(k1 u u_xx + k2 u_x^2) ] = 0
// with (u_x) present in the lab frame only. iB, KdV/BBM, eKdV, mKdV and CL
// are coefficient masks of the same right-hand side.

#include "gnwaves/params.hpp"
#include "gnwaves/spectral.hpp"

namespace gnwaves {

/// Zeroes the coefficients a scalar kind does not carry:
///   iB   alpha1 only
///   KdV  alpha1, nu, beta
///   eKdV KdV + alpha2
///   CL   everything
/// Throws DomainError for non-scalar kinds (GN, WeaklyCoupled).
ScalarCoeffs mask_coeffs(ScalarCoeffs c, ModelKind kind);

/// eKdV with the quadratic term removed.
ScalarCoeffs as_mkdv(ScalarCoeffs c);

/// Decoupled coefficients of `kind` moving in `direction`. Unidirectional
/// returns the unidirectional table (direction ignored); CL is used for
/// WeaklyCoupled.
ScalarCoeffs model_coeffs(const RegimeParams& p, ModelKind kind, Direction direction);

/// beta == 0 with nu != 0: the classical KdV form, stiff under explicit stepping.
bool is_stiff(const ScalarCoeffs& c);

/// du/dt for the scalar family; all products pseudospectral, nonlinear
/// terms in divergence form so the mean of u is conserved exactly.
Field scalar_rhs(const Field& u, const ScalarCoeffs& c, const RegimeParams& p, bool lab_frame = true);

/// Linear frequency omega(k) of scalar_rhs: u = exp(i(kx - omega t)).
double scalar_linear_omega(double k, const ScalarCoeffs& c, const RegimeParams& p, bool lab_frame = true);

/// scaled_energy(u, s, mu*beta).
double scalar_energy(const Field& u, double s, const ScalarCoeffs& c, const RegimeParams& p);

}  // namespace gnwaves
