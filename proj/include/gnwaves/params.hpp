#pragma once

// Dimensionless regime parameters of the two-layer rigid-lid system and
// the closed-form coefficient tables of the scalar models built on it.
//
// Everything here is a pure function of (epsilon, mu, delta, gamma, theta,
// lambda); no state, safe from any thread.

#include <string>
#include <string_view>

namespace gnwaves {

/// Admissible parameter box. The lower/upper depth-ratio bounds are
/// not fixed by the model, these are the defaults used for validation.
struct AdmissibleBox {
    double delta_min = 0.1;
    double delta_max = 10.0;
    double gamma_max = 0.99;
    double epsilon_max = 1.0;
    double mu_max = 1.0;
};

struct RegimeParams {
    double epsilon = 0.1;  ///< nonlinearity a/d1
    double mu = 0.01;      ///< shallowness d1^2/lambda^2
    double delta = 0.5;    ///< depth ratio d1/d2
    double gamma = 0.9;    ///< density ratio rho1/rho2
    double theta = 0.5;    ///< BBM-trick weight
    double lambda = 0.0;   ///< near-identity change-of-variable weight

    /// Throws DomainError when outside `box`. epsilon == 0 and mu == 0 are
    /// accepted (degenerate limits used in tests).
    void validate(const AdmissibleBox& box = {}) const;
};

enum class Direction : int { Right = 1, Left = -1 };

/// Every model the harness can evolve. The scalar kinds select coefficient
/// masks of the decoupled family.
enum class ModelKind { GN, iB, KdV, eKdV, CL, WeaklyCoupled, Unidirectional };

std::string to_string(ModelKind kind);
/// Accepts the names produced by to_string (case-insensitive, '-' or '_'
/// ignored). Throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view name);

inline double sign(Direction d) { return static_cast<double>(static_cast<int>(d)); }

/// Coefficients of
///   (1 - mu*beta*dx^2) u_t + dir*[ eps*a1 u u_x + eps^2 a2 u^2 u_x + eps^3 a3 u^3 u_x
///                                  + mu*nu u_xxx + mu*eps dx(k1 u u_xx + k2 u_x^2) ] = 0
struct ScalarCoeffs {
    double beta = 0.0;    ///< nu_t, weight of -mu dx^2 dt
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double nu = 0.0;      ///< nu_x, weight of mu dx^3
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    Direction direction = Direction::Right;
};

/// Constants of the coupled intermediate (u_l, u_r) system, before any
/// BBM trick or change of variables.
struct BaseCoeffs {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double nu = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
};

BaseCoeffs base_coeffs(const RegimeParams& p);

/// Coefficients of the left/right decoupled waves v_pm^lambda.
ScalarCoeffs decoupled_coeffs(const RegimeParams& p, Direction direction);

/// Coefficients of the right-going unidirectional equation for zeta.
ScalarCoeffs unidirectional_coeffs(const RegimeParams& p);

/// Coefficients entering the zeta -> vbar reconstruction. These are the
/// theta = lambda = 0 values regardless of p.theta, p.lambda.
ScalarCoeffs reconstruction_coeffs(const RegimeParams& p);

/// delta^2 - gamma: vanishes at the critical depth ratio.
double critical_defect(const RegimeParams& p);

/// (1 + gamma*delta) / (3*delta*(gamma + delta)): the linear dispersive
/// constant of the Green-Naghdi system.
double gn_dispersion_constant(const RegimeParams& p);

}  // namespace gnwaves
