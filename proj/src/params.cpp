#include "gnwaves/params.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "gnwaves/errors.hpp"

namespace gnwaves {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

void require_nonsingular(const RegimeParams& p) {
    require(p.delta != 0.0, "delta must be nonzero");
    require(p.gamma + p.delta != 0.0, "gamma + delta must be nonzero");
}

}  // namespace

void RegimeParams::validate(const AdmissibleBox& box) const {
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(epsilon) && finite(mu) && finite(delta) && finite(gamma) && finite(theta) &&
                finite(lambda),
            "regime parameters must be finite");
    require(epsilon >= 0.0 && epsilon <= box.epsilon_max,
            fmt::format("epsilon = {} outside [0, {}]", epsilon, box.epsilon_max));
    require(mu >= 0.0 && mu <= box.mu_max, fmt::format("mu = {} outside [0, {}]", mu, box.mu_max));
    require(delta >= box.delta_min && delta <= box.delta_max,
            fmt::format("delta = {} outside [{}, {}]", delta, box.delta_min, box.delta_max));
    require(gamma >= 0.0 && gamma <= box.gamma_max,
            fmt::format("gamma = {} outside [0, {}]", gamma, box.gamma_max));
}

// Factored so the preset critical pair evaluates to exactly 0.
double critical_defect(const RegimeParams& p) {
    if (p.gamma < 0.0) return p.delta * p.delta - p.gamma;
    const double r = std::sqrt(p.gamma);
    return (p.delta - r) * (p.delta + r);
}

double gn_dispersion_constant(const RegimeParams& p) {
    require_nonsingular(p);
    return (1.0 + p.gamma * p.delta) / (3.0 * p.delta * (p.gamma + p.delta));
}

BaseCoeffs base_coeffs(const RegimeParams& p) {
    require_nonsingular(p);
    const double g = p.gamma;
    const double d = p.delta;
    const double s = g + d;
    const double defect = critical_defect(p);

    BaseCoeffs b;
    b.alpha1 = 1.5 * defect / s;
    b.alpha2 = -3.0 * g * d * (d + 1.0) * (d + 1.0) / (s * s);
    b.alpha3 = -5.0 * d * d * (d + 1.0) * (d + 1.0) * g * (1.0 - g) / (s * s * s);
    b.nu = (1.0 + g * d) / (6.0 * d * s);
    b.kappa1 = (1.0 + g * d) * defect / (3.0 * d * s * s);
    b.kappa2 = (1.0 - g) / (3.0 * s);
    b.kappa3 = (g - 1.0) / (2.0 * s);
    return b;
}

ScalarCoeffs decoupled_coeffs(const RegimeParams& p, Direction direction) {
    const BaseCoeffs b = base_coeffs(p);
    const double theta = p.theta;
    const double lambda = p.lambda;

    ScalarCoeffs c;
    c.direction = direction;
    c.alpha1 = b.alpha1;
    c.alpha2 = b.alpha2;
    c.alpha3 = b.alpha3;
    c.beta = theta * b.nu + lambda;
    c.nu = (1.0 - theta) * b.nu - lambda;
    // BBM trick on the O(mu*eps) brackets: kappa{1,2} + kappa3/{3,2} + (1-theta)*alpha1*nu,
    // then the near-identity shift alpha1*lambda on kappa1 only.
    const double bbm = (1.0 - theta) * b.alpha1 * b.nu;
    c.kappa1 = b.kappa1 + b.kappa3 / 3.0 + bbm + lambda * b.alpha1;
    c.kappa2 = b.kappa1 + 0.5 * b.kappa2 + 0.5 * b.kappa3 + bbm;
    return c;
}

ScalarCoeffs unidirectional_coeffs(const RegimeParams& p) {
    require_nonsingular(p);
    const double g = p.gamma;
    const double d = p.delta;
    const double s = g + d;
    const double defect = critical_defect(p);
    const double cubic = d * d * d + g;
    const double lin = (1.0 + g * d) / (6.0 * d * s);
    const double tl = p.theta + p.lambda;
    const double x = defect * (1.0 + g * d) / (d * s * s);

    ScalarCoeffs c;
    c.direction = Direction::Right;
    c.alpha1 = 1.5 * defect / s;
    c.alpha2 = 21.0 * defect * defect / (8.0 * s * s) - 3.0 * cubic / s;
    c.alpha3 = 71.0 * defect * defect * defect / (16.0 * s * s * s) -
               37.0 * defect * cubic / (4.0 * s * s) + 5.0 * (d * d * d * d - g) / s;
    c.nu = (1.0 - tl) * lin;
    c.beta = tl * lin;
    c.kappa1 = (14.0 - 6.0 * tl) * x / 24.0 - (1.0 - g) / (6.0 * s);
    c.kappa2 = (17.0 - 12.0 * p.theta) * x / 48.0 - (1.0 - g) / (12.0 * s);
    return c;
}

ScalarCoeffs reconstruction_coeffs(const RegimeParams& p) {
    RegimeParams flat = p;
    flat.theta = 0.0;
    flat.lambda = 0.0;
    return unidirectional_coeffs(flat);
}

namespace {

constexpr std::array<std::pair<ModelKind, const char*>, 7> kModelNames{{
    {ModelKind::GN, "GN"},
    {ModelKind::iB, "iB"},
    {ModelKind::KdV, "KdV"},
    {ModelKind::eKdV, "eKdV"},
    {ModelKind::CL, "CL"},
    {ModelKind::WeaklyCoupled, "weakly-coupled"},
    {ModelKind::Unidirectional, "unidirectional"},
}};

std::string normalise(std::string_view name) {
    std::string out;
    for (char ch : name)
        if (ch != '-' && ch != '_' && ch != ' ')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return out;
}

}  // namespace

std::string to_string(ModelKind kind) {
    for (const auto& [k, name] : kModelNames)
        if (k == kind) return name;
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    const std::string key = normalise(name);
    for (const auto& [k, n] : kModelNames)
        if (normalise(n) == key) return k;
    throw ConfigError(fmt::format("unknown model '{}'", name));
}

}  // namespace gnwaves
