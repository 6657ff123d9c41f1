#include "gnwaves/scalar_models.hpp"

#include "gnwaves/errors.hpp"

namespace gnwaves {

ScalarCoeffs mask_coeffs(ScalarCoeffs c, ModelKind kind) {
    switch (kind) {
        case ModelKind::iB:
            c.beta = 0.0;
            c.nu = 0.0;
            [[fallthrough]];
        case ModelKind::KdV:
            c.alpha2 = 0.0;
            [[fallthrough]];
        case ModelKind::eKdV:
            c.alpha3 = 0.0;
            c.kappa1 = 0.0;
            c.kappa2 = 0.0;
            [[fallthrough]];
        case ModelKind::CL:
        case ModelKind::Unidirectional:
            return c;
        default:
            throw DomainError("mask_coeffs: " + to_string(kind) + " is not a scalar model");
    }
}

ScalarCoeffs as_mkdv(ScalarCoeffs c) {
    c = mask_coeffs(c, ModelKind::eKdV);
    c.alpha1 = 0.0;
    return c;
}

ScalarCoeffs model_coeffs(const RegimeParams& p, ModelKind kind, Direction direction) {
    switch (kind) {
        case ModelKind::Unidirectional:
            return unidirectional_coeffs(p);
        case ModelKind::WeaklyCoupled:
            return decoupled_coeffs(p, direction);
        default:
            return mask_coeffs(decoupled_coeffs(p, direction), kind);
    }
}

bool is_stiff(const ScalarCoeffs& c) { return c.beta == 0.0 && c.nu != 0.0; }

Field scalar_rhs(const Field& u, const ScalarCoeffs& c, const RegimeParams& p, bool lab_frame) {
    if (!u.all_finite()) throw NonFiniteError("scalar_rhs: non-finite input");
    const double eps = p.epsilon;
    const double mu = p.mu;

    // Flux F with dx F = transport + nonlinear + dispersive terms.
    Field flux(u.grid_ptr());
    if (lab_frame) flux += u;
    const Field u2 = u * u;
    if (c.alpha1 != 0.0) flux += (0.5 * eps * c.alpha1) * u2;
    if (c.alpha2 != 0.0) flux += (eps * eps * c.alpha2 / 3.0) * (u2 * u);
    if (c.alpha3 != 0.0) flux += (eps * eps * eps * c.alpha3 / 4.0) * (u2 * u2);
    if (c.nu != 0.0 || c.kappa1 != 0.0) {
        const Field uxx = derivative(u, 2);
        if (c.nu != 0.0) flux += (mu * c.nu) * uxx;
        if (c.kappa1 != 0.0) flux += (mu * eps * c.kappa1) * (u * uxx);
    }
    if (c.kappa2 != 0.0) {
        const Field ux = derivative(u, 1);
        flux += (mu * eps * c.kappa2) * (ux * ux);
    }

    Field rhs = derivative(flux, 1);
    rhs *= -sign(c.direction);
    return helmholtz_inverse(rhs, mu * c.beta);
}

double scalar_linear_omega(double k, const ScalarCoeffs& c, const RegimeParams& p, bool lab_frame) {
    const double transport = lab_frame ? k : 0.0;
    return sign(c.direction) * (transport - p.mu * c.nu * k * k * k) / (1.0 + p.mu * c.beta * k * k);
}

double scalar_energy(const Field& u, double s, const ScalarCoeffs& c, const RegimeParams& p) {
    return scaled_energy(u, s, p.mu * c.beta);
}

}  // namespace gnwaves
