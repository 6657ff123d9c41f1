#pragma once

// Fixed-step explicit integrators shared by every semidiscrete system:
// Adams-Bashforth-Moulton 4 (PECE, RK4 start-up) and classical RK4.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gnwaves/params.hpp"
#include "gnwaves/spectral.hpp"

namespace gnwaves {

/// A system state is a tuple of fields (zeta, q), (u), (v+, v-, w+, w-), ...
using State = std::vector<Field>;
using RhsFn = std::function<State(double t, const State& y)>;
/// Called at t = 0 and at every stop time.
using Observer = std::function<void(double t, const State& y)>;

enum class Method { ABM4, RK4 };

std::string to_string(Method m);
Method parse_method(std::string_view name);

struct IntegratorConfig {
    Method method = Method::ABM4;
    double dt = 0.02;
    double t_end = 1.0;
    double blowup_threshold = 1e6;
    /// Bound on |omega| of the linearised system, 0 = unknown. When set,
    /// dt is rejected if omega_max*dt leaves the method's stable range.
    double omega_max = 0.0;
};

/// Largest omega*dt accepted on the imaginary axis.
double stability_limit(Method m);

/// Throws DomainError when cfg.dt is non-positive or fails the heuristic.
void check_step(const IntegratorConfig& cfg);

State axpy(double a, const State& x, const State& y);  ///< a*x + y
double max_abs(const State& y);

/// One classical RK4 step.
State rk4_step(const RhsFn& rhs, double t, const State& y, double dt);

/// Integrates from t = 0 to cfg.t_end, stopping exactly at every time in
/// `stops` (values outside (0, t_end] ignored; t_end always included).
/// Between consecutive stops the step is the largest value <= cfg.dt that
/// divides the interval evenly; the multistep history survives a stop
/// unless the step changes. Throws BlowUpError once max|y| exceeds the
/// threshold or turns non-finite. Returns the final state.
State integrate(const RhsFn& rhs, const State& y0, const IntegratorConfig& cfg,
                const std::vector<double>& stops = {}, const Observer& observe = {});

/// Cell-CFL step: cfl*dx/c_max with c_max the maximal linear group speed of
/// `kind` over the resolved modes plus a characteristic-speed margin
/// eps*|alpha1|*u_max.
double pick_dt(const Grid& grid, const RegimeParams& p, ModelKind kind, double u_max = 0.0,
               double cfl = 0.1);

/// max_k |omega(k)| of the linearised model over the resolved modes, with
/// the same nonlinear margin as pick_dt applied as k_max*eps*|alpha1|*u_max.
double omega_bound(const Grid& grid, const RegimeParams& p, ModelKind kind, double u_max = 0.0);

}  // namespace gnwaves
