#include <cmath>
#include <random>

#include <ostream>

#include <gtest/gtest.h>

#include "gnwaves/errors.hpp"
#include "gnwaves/scalar_models.hpp"
#include "gnwaves/timeint.hpp"
#include "oracle.hpp"

using namespace gnwaves;

namespace gnwaves {
void PrintTo(ModelKind k, std::ostream* os) { *os << to_string(k); }
}  // namespace gnwaves

namespace {

RegimeParams regime(double eps, double mu, double gamma, double delta, double theta = 0.5) {
    RegimeParams p;
    p.epsilon = eps;
    p.mu = mu;
    p.gamma = gamma;
    p.delta = delta;
    p.theta = theta;
    return p;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

State run(const RhsFn& rhs, const Field& u0, double t_end, double dt, const Observer& obs = {}) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    return integrate(rhs, {u0}, cfg, {}, obs);
}

RhsFn scalar_system(const ScalarCoeffs& c, const RegimeParams& p, bool lab = true) {
    return [c, p, lab](double, const State& y) { return State{scalar_rhs(y[0], c, p, lab)}; };
}

}  // namespace

TEST(Mask, KeepsExactlyTheListedCoefficients) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const ScalarCoeffs full = decoupled_coeffs(p, Direction::Right);
    const ScalarCoeffs ib = mask_coeffs(full, ModelKind::iB);
    EXPECT_EQ(ib.alpha1, full.alpha1);
    EXPECT_EQ(ib.alpha2, 0.0);
    EXPECT_EQ(ib.alpha3, 0.0);
    EXPECT_EQ(ib.nu, 0.0);
    EXPECT_EQ(ib.beta, 0.0);
    EXPECT_EQ(ib.kappa1, 0.0);
    EXPECT_EQ(ib.kappa2, 0.0);
    const ScalarCoeffs kdv = mask_coeffs(full, ModelKind::KdV);
    EXPECT_EQ(kdv.nu, full.nu);
    EXPECT_EQ(kdv.beta, full.beta);
    EXPECT_EQ(kdv.alpha2, 0.0);
    EXPECT_EQ(kdv.alpha3, 0.0);
    EXPECT_EQ(kdv.kappa1, 0.0);
    EXPECT_EQ(kdv.kappa2, 0.0);
    const ScalarCoeffs ekdv = mask_coeffs(full, ModelKind::eKdV);
    EXPECT_EQ(ekdv.alpha2, full.alpha2);
    EXPECT_EQ(ekdv.alpha3, 0.0);
    EXPECT_EQ(ekdv.kappa1, 0.0);
    const ScalarCoeffs cl = mask_coeffs(full, ModelKind::CL);
    EXPECT_EQ(cl.alpha3, full.alpha3);
    EXPECT_EQ(cl.kappa1, full.kappa1);
    EXPECT_EQ(cl.kappa2, full.kappa2);
    EXPECT_THROW(mask_coeffs(full, ModelKind::GN), DomainError);
}

TEST(Mask, MkdvIsEkdvWithoutQuadratic) {
    const ScalarCoeffs c = as_mkdv(decoupled_coeffs(regime(0.1, 0.01, 0.9, 0.5), Direction::Right));
    EXPECT_EQ(c.alpha1, 0.0);
    EXPECT_NE(c.alpha2, 0.0);
    EXPECT_EQ(c.alpha3, 0.0);
    EXPECT_EQ(c.kappa1, 0.0);
}

TEST(Mask, Stiffness) {
    ScalarCoeffs c;
    c.nu = 0.1;
    EXPECT_TRUE(is_stiff(c));
    c.beta = 0.1;
    EXPECT_FALSE(is_stiff(c));
}

TEST(ScalarRhs, ZeroState) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const Field u(Grid::make(64, 20.0));
    EXPECT_EQ(scalar_rhs(u, decoupled_coeffs(p, Direction::Right), p).max_abs(), 0.0);
}

TEST(ScalarRhs, AnalyticLinearMode) {
    RegimeParams p = regime(0.1, 0.1, 0.5, 1.0);
    ScalarCoeffs c;
    c.nu = 1.0 / 6.0;
    c.beta = 1.0;
    const GridPtr g = Grid::make(64, 2 * M_PI);
    const Field u = Field::from_function(g, [](double x) { return std::sin(x); });
    const Field want = Field::from_function(g, [](double x) { return 0.1 / 6.0 * std::cos(x) / 1.1; });
    EXPECT_LT(max_diff(scalar_rhs(u, c, p, false), want), 1e-14);
    EXPECT_NEAR(0.1 / 6.0 / 1.1, 0.0151515, 1e-7);
}

TEST(ScalarRhs, LinearOmegaMatchesMode) {
    const RegimeParams p = regime(0.0, 0.05, 0.9, 0.5);
    const ScalarCoeffs c = decoupled_coeffs(p, Direction::Left);
    const GridPtr g = Grid::make(64, 2 * M_PI);
    const double k = 3.0;
    // u = cos(kx) evolves as cos(kx - omega t): du/dt = omega sin(kx)
    const Field u = Field::from_function(g, [k](double x) { return std::cos(k * x); });
    const double w = scalar_linear_omega(k, c, p);
    const Field want = Field::from_function(g, [k, w](double x) { return w * std::sin(k * x); });
    EXPECT_LT(max_diff(scalar_rhs(u, c, p), want), 1e-12);
}

TEST(ScalarRhs, RejectsNonFinite) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    Field u(Grid::make(64, 20.0));
    u[0] = std::nan("");
    EXPECT_THROW(scalar_rhs(u, decoupled_coeffs(p, Direction::Right), p), NonFiniteError);
}

class ScalarOracle : public ::testing::TestWithParam<ModelKind> {};

TEST_P(ScalarOracle, MatchesFiniteDifferences) {
    const ModelKind kind = GetParam();
    std::mt19937_64 rng(1234 + static_cast<int>(kind));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double L = 40.0;
    const GridPtr g = Grid::make(256, L);
    const oracle::FdGrid fd = oracle::make_fd_grid(512, L);
    for (int inst = 0; inst < 20; ++inst) {
        const double eps = 0.05 + 0.1 * U(rng);
        RegimeParams p = regime(eps, eps * eps, 0.2 + 0.7 * U(rng), 0.4 + 1.2 * U(rng), 0.2 + 0.8 * U(rng));
        const Direction dir = inst % 2 ? Direction::Left : Direction::Right;
        const ScalarCoeffs c = model_coeffs(p, kind, dir);
        const auto f = oracle::random_band_limited(rng, L, 6, 1.0);
        const Field u = Field::from_function(g, f);
        const std::vector<double> got = scalar_rhs(u, c, p).data();
        const std::vector<double> want = oracle::coarsen(oracle::scalar_rhs(fd, oracle::sample(fd, f), c, p), 2);
        EXPECT_LT(oracle::rel_l2(got, want), 1e-5) << "instance " << inst;
    }
}

INSTANTIATE_TEST_SUITE_P(Kinds, ScalarOracle,
                         ::testing::Values(ModelKind::iB, ModelKind::KdV, ModelKind::eKdV, ModelKind::CL),
                         [](const auto& info) { return to_string(info.param); });

TEST(ScalarRhs, FullClGaussianOracle) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const ScalarCoeffs c = decoupled_coeffs(p, Direction::Right);
    const double L = 60.0;
    auto gauss = [](double x) { return std::exp(-x * x / 4.0); };
    const GridPtr g = Grid::make(512, L);
    const oracle::FdGrid fd = oracle::make_fd_grid(1024, L);
    const std::vector<double> want = oracle::coarsen(oracle::scalar_rhs(fd, oracle::sample(fd, gauss), c, p), 2);
    EXPECT_LT(oracle::rel_l2(scalar_rhs(Field::from_function(g, gauss), c, p).data(), want), 1e-5);
}

TEST(ScalarEnergy, Examples) {
    const RegimeParams p = regime(0.1, 1.0, 0.9, 0.5);
    const GridPtr g = Grid::make(64, 2 * M_PI);
    ScalarCoeffs c;
    EXPECT_EQ(scalar_energy(Field(g), 1.0, c, p), 0.0);
    const Field u = Field::from_function(g, [](double x) { return std::sin(3 * x); });
    EXPECT_DOUBLE_EQ(scalar_energy(u, 1.0, c, p), sobolev_norm(u, 1.0));
    c.beta = 1.0;
    EXPECT_NEAR(scalar_energy(u, 0.0, c, p), std::sqrt(11 * M_PI), 1e-12);
}

TEST(ScalarInvariants, BurgersMassConserved) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const ScalarCoeffs c = model_coeffs(p, ModelKind::iB, Direction::Right);
    const GridPtr g = Grid::make(256, 51.2);
    const Field u0 = Field::from_function(g, [](double x) { return std::exp(-x * x / 4.0); });
    const double m0 = integral(u0);
    double worst = 0.0;
    run(scalar_system(c, p), u0, 10.0, 0.01, [&](double, const State& y) {
        worst = std::max(worst, std::abs(integral(y[0]) - m0));
    });
    EXPECT_LT(worst, 1e-10);
}

TEST(ScalarInvariants, BbmEnergyConserved) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5, 1.0);
    const ScalarCoeffs c = model_coeffs(p, ModelKind::KdV, Direction::Right);
    ASSERT_EQ(c.nu, 0.0);
    const GridPtr g = Grid::make(256, 51.2);
    const Field u0 = Field::from_function(g, [](double x) { return std::exp(-x * x / 4.0); });
    auto invariant = [&](const Field& u) {
        const double a = sobolev_norm(u, 0), b = sobolev_norm(derivative(u), 0);
        return a * a + p.mu * c.beta * b * b;
    };
    const double e0 = invariant(u0);
    double worst = 0.0, mass = 0.0;
    const double m0 = integral(u0);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0 / p.epsilon;
    std::vector<double> stops;
    for (int i = 1; i <= 20; ++i) stops.push_back(cfg.t_end * i / 20);
    integrate(scalar_system(c, p), {u0}, cfg, stops, [&](double, const State& y) {
        worst = std::max(worst, std::abs(invariant(y[0]) / e0 - 1.0));
        mass = std::max(mass, std::abs(integral(y[0]) - m0));
    });
    EXPECT_LT(worst, 1e-6);
    EXPECT_LT(mass, 1e-10);
}

TEST(ScalarInvariants, ClEnergyBounded) {
    for (auto [gamma, delta] : {std::pair{0.64, 0.8}, std::pair{0.9, 0.5}}) {
        const double eps = 0.1;
        const RegimeParams p = regime(eps, eps * eps, gamma, delta);
        const ScalarCoeffs c = model_coeffs(p, ModelKind::CL, Direction::Right);
        ASSERT_GT(c.beta, 0.0);
        const GridPtr g = Grid::make(512, 102.4);
        Field u0 = Field::from_function(g, [](double x) { return std::exp(-x * x / 4.0); });
        u0 *= 1.0 / scalar_energy(u0, 2.0, c, p);
        const double e0 = scalar_energy(u0, 1.0, c, p);
        double worst = 0.0;
        IntegratorConfig cfg;
        cfg.dt = 0.01;
        cfg.t_end = 1.0 / eps;
        std::vector<double> stops;
        for (int i = 1; i <= 10; ++i) stops.push_back(cfg.t_end * i / 10);
        EXPECT_NO_THROW(integrate(scalar_system(c, p), {u0}, cfg, stops, [&](double, const State& y) {
            worst = std::max(worst, scalar_energy(y[0], 1.0, c, p) / e0);
        }));
        EXPECT_LT(worst, 2.0);
    }
}

TEST(ScalarInvariants, DirectionSymmetry) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const GridPtr g = Grid::make(256, 51.2);
    const Field u0 = Field::from_function(g, [](double x) { return std::exp(-(x - 3) * (x - 3) / 4.0); });
    const ScalarCoeffs left = model_coeffs(p, ModelKind::CL, Direction::Left);
    const ScalarCoeffs right = model_coeffs(p, ModelKind::CL, Direction::Right);
    const Field a = run(scalar_system(left, p), u0, 5.0, 0.01)[0];
    const Field b = run(scalar_system(right, p), mirror(u0), 5.0, 0.01)[0];
    EXPECT_LT(sobolev_norm(a - mirror(b), 0), 1e-9);
}
