#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "gnwaves/errors.hpp"
#include "gnwaves/gn_model.hpp"
#include "gnwaves/timeint.hpp"
#include "oracle.hpp"

using namespace gnwaves;

namespace {

RegimeParams regime(double eps, double mu, double gamma, double delta) {
    RegimeParams p;
    p.epsilon = eps;
    p.mu = mu;
    p.gamma = gamma;
    p.delta = delta;
    return p;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

RhsFn gn_system(const RegimeParams& p) {
    return [p](double, const State& y) {
        GnRates r = gn_rhs({y[0], y[1]}, p);
        return State{std::move(r.dzeta_dt), std::move(r.dq_dt)};
    };
}

}  // namespace

TEST(Qbar, ZeroVelocity) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const GridPtr g = Grid::make(64, 20.0);
    const Depths d = layer_depths(Field::from_function(g, [](double x) { return std::cos(x); }), p);
    EXPECT_EQ(qbar_apply(d.h1, d.h2, Field(g), p).max_abs(), 0.0);
    EXPECT_EQ(rbar_apply(d.h1, d.h2, Field(g), p).max_abs(), 0.0);
}

TEST(Qbar, ConstantCoefficientReduction) {
    const RegimeParams p = regime(0.1, 0.01, 0.0, 1.0);
    const GridPtr g = Grid::make(64, 2 * M_PI);
    const Depths d = layer_depths(Field(g), p);
    const Field V = Field::from_function(g, [](double x) { return std::cos(x); });
    EXPECT_LT(max_diff(qbar_apply(d.h1, d.h2, V, p), (1.0 / 3.0) * V), 1e-13);
}

TEST(Qbar, VariableDepthOracle) {
    const RegimeParams p = regime(0.2, 0.05, 0.7, 0.6);
    const double L = 2 * M_PI * 4;
    auto zeta = [](double x) { return 0.1 * std::cos(x / 4); };
    auto vel = [](double x) { return std::sin(2 * x / 4); };
    const GridPtr g = Grid::make(128, L);
    const Field z = Field::from_function(g, zeta);
    const Depths d = layer_depths(z, p);
    const oracle::FdGrid fd = oracle::make_fd_grid(512, L);
    const oracle::GnOracle o{fd, p};
    const oracle::Vec zf = oracle::sample(fd, zeta);
    const oracle::Vec want = o.qbar_matrix(zf) * oracle::sample(fd, vel);
    const Field V = Field::from_function(g, vel);
    EXPECT_LT(oracle::rel_l2(qbar_apply(d.h1, d.h2, V, p).data(), oracle::coarsen(want, 4)), 1e-6);
    EXPECT_LT(oracle::rel_l2(rbar_apply(d.h1, d.h2, V, p).data(), oracle::coarsen(o.rbar(zf, oracle::sample(fd, vel)), 4)),
              1e-6);
}

TEST(Rbar, SymmetricCancellation) {
    const RegimeParams p = regime(0.1, 0.01, 1.0, 1.0);
    const GridPtr g = Grid::make(64, 20.0);
    const Depths d = layer_depths(Field(g), p);
    const Field V = Field::from_function(g, [](double x) { return std::sin(2 * M_PI * x / 20) + 0.3; });
    EXPECT_LT(rbar_apply(d.h1, d.h2, V, p).max_abs(), 1e-13);
}

TEST(Depths, FloorViolation) {
    const RegimeParams p = regime(0.5, 0.01, 0.9, 0.5);
    const Field z(Grid::make(32, 10.0), 2.5);
    EXPECT_THROW(layer_depths(z, p), DepthError);
    const Depths d = layer_depths(Field(Grid::make(32, 10.0), 0.0), p);
    EXPECT_THROW(qbar_apply(d.h1, (-1.0) * d.h2, d.h1, p), DepthError);
}

TEST(RecoverVbar, NoDispersionIsIdentity) {
    const RegimeParams p = regime(0.1, 0.0, 0.9, 0.5);
    const GridPtr g = Grid::make(64, 20.0);
    const Field q = Field::from_function(g, [](double x) { return std::exp(-x * x); });
    EXPECT_EQ(max_diff(recover_vbar(Field(g), q, p), q), 0.0);
}

TEST(RecoverVbar, FlatInterfaceClosedForm) {
    const RegimeParams p = regime(0.1, 0.1, 0.9, 0.5);
    const GridPtr g = Grid::make(128, 40.0);
    std::mt19937_64 rng(3);
    const Field q = Field::from_function(g, oracle::random_band_limited(rng, 40.0, 10, 1.0));
    const double C = gn_dispersion_constant(p);
    const Field want = helmholtz_inverse(q, p.mu * C);
    SolveStats st;
    EXPECT_LT(max_diff(recover_vbar(Field(g), q, p, {}, &st), want), 1e-12);
    EXPECT_LE(st.iterations, 2);
}

TEST(RecoverVbar, GenericSelfConsistency) {
    const RegimeParams p = regime(0.1, 0.05, 0.9, 0.5);
    const GridPtr g = Grid::make(256, 40.0);
    std::mt19937_64 rng(5);
    const Field z = Field::from_function(g, oracle::random_band_limited(rng, 40.0, 8, 1.5));
    const Field q = Field::from_function(g, oracle::random_band_limited(rng, 40.0, 8, 1.0));
    SolveStats st;
    const Field v = recover_vbar(z, q, p, {}, &st);
    const Field back = gn_momentum(z, v, p);
    EXPECT_LT(sobolev_norm(back - q, 0) / sobolev_norm(q, 0), 1e-11);
    EXPECT_LE(st.residual, 1e-12);
    EXPECT_GT(st.iterations, 0);
}

TEST(RecoverVbar, IterationCap) {
    const RegimeParams p = regime(0.3, 0.2, 0.9, 0.5);
    const GridPtr g = Grid::make(256, 40.0);
    std::mt19937_64 rng(8);
    const Field z = Field::from_function(g, oracle::random_band_limited(rng, 40.0, 8, 2.0));
    const Field q = Field::from_function(g, oracle::random_band_limited(rng, 40.0, 8, 1.0));
    SolverOptions o;
    o.max_iterations = 1;
    EXPECT_THROW(recover_vbar(z, q, p, o), ConvergenceError);
}

TEST(GnRhs, RestState) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const GridPtr g = Grid::make(64, 20.0);
    const GnRates r = gn_rhs({Field(g), Field(g)}, p);
    EXPECT_EQ(r.dzeta_dt.max_abs(), 0.0);
    EXPECT_EQ(r.dq_dt.max_abs(), 0.0);
}

TEST(GnRhs, LinearLimit) {
    const RegimeParams p = regime(0.0, 0.01, 0.9, 0.5);
    const GridPtr g = Grid::make(64, 2 * M_PI);
    const double a = 0.3, k = 2.0;
    const Field z = Field::from_function(g, [&](double x) { return a * std::cos(k * x); });
    const GnRates r = gn_rhs({z, Field(g)}, p);
    const Field want = Field::from_function(g, [&](double x) { return (p.gamma + p.delta) * a * k * std::sin(k * x); });
    EXPECT_LT(r.dzeta_dt.max_abs(), 1e-14);
    EXPECT_LT(max_diff(r.dq_dt, want), 1e-12);
}

TEST(GnRhs, OracleEquivalence) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double L = 40.0;
    const GridPtr g = Grid::make(256, L);
    const oracle::FdGrid fd = oracle::make_fd_grid(512, L);
    for (int inst = 0; inst < 20; ++inst) {
        const double eps = 0.05 + 0.1 * U(rng);
        const RegimeParams p = regime(eps, inst % 2 ? eps : eps * eps, 0.2 + 0.75 * U(rng), 0.4 + 1.2 * U(rng));
        const auto zf = oracle::random_band_limited(rng, L, 6, 1.0);
        const auto qf = oracle::random_band_limited(rng, L, 6, 1.0);
        const GnRates r = gn_rhs({Field::from_function(g, zf), Field::from_function(g, qf)}, p);
        const oracle::GnOracle o{fd, p};
        const auto [dz, dq] = o.rhs(oracle::sample(fd, zf), oracle::sample(fd, qf));
        EXPECT_LT(oracle::rel_l2(r.dzeta_dt.data(), oracle::coarsen(dz, 2)), 1e-5) << inst;
        EXPECT_LT(oracle::rel_l2(r.dq_dt.data(), oracle::coarsen(dq, 2)), 1e-5) << inst;
    }
}

TEST(GnRhs, ConsistencyResidualOfOwnRates) {
    const RegimeParams p = regime(0.1, 0.01, 0.64, 0.8);
    const GridPtr g = Grid::make(256, 51.2);
    const Field z = Field::from_function(g, [](double x) { return std::exp(-x * x / 4); });
    const Field v = Field::from_function(g, [](double x) { return 0.5 * std::exp(-x * x / 9); });
    const GnState s = make_gn_state(z, v, p);
    Field vbar;
    const GnRates r = gn_rhs(s, p, {}, &vbar);
    EXPECT_LT(sobolev_norm(vbar - v, 0), 1e-10);
    const GnRates res = gn_consistency_residual(z, v, r.dzeta_dt, r.dq_dt, p);
    EXPECT_LT(res.dzeta_dt.max_abs(), 1e-9);
    EXPECT_LT(res.dq_dt.max_abs(), 1e-9);
}

TEST(GnRhs, DepthViolationPropagates) {
    const RegimeParams p = regime(0.5, 0.01, 0.9, 0.5);
    const GridPtr g = Grid::make(32, 10.0);
    EXPECT_THROW(gn_rhs({Field(g, 3.0), Field(g)}, p), DepthError);
}

TEST(GnInvariants, MassImpulseAndReflection) {
    const RegimeParams p = regime(0.1, 0.01, 0.9, 0.5);
    const GridPtr g = Grid::make(256, 51.2);
    const Field z0 = Field::from_function(g, [](double x) { return std::exp(-(x - 2) * (x - 2) / 4); });
    const Field v0 = Field::from_function(g, [](double x) { return 0.6 * std::exp(-(x + 1) * (x + 1) / 4); });
    const GnState s0 = make_gn_state(z0, v0, p);
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 10.0;
    const double m0 = integral(s0.zeta), i0 = integral(s0.q);
    const double n0 = sobolev_norm(s0.zeta, 0), nq = sobolev_norm(s0.q, 0);
    double dm = 0.0, di = 0.0;
    std::vector<double> stops{2, 4, 6, 8};
    const State end = integrate(gn_system(p), {s0.zeta, s0.q}, cfg, stops, [&](double, const State& y) {
        dm = std::max(dm, std::abs(integral(y[0]) - m0) / n0);
        di = std::max(di, std::abs(integral(y[1]) - i0) / nq);
    });
    EXPECT_LT(dm, 1e-10);
    EXPECT_LT(di, 1e-10);
    const State mir = integrate(gn_system(p), {mirror(s0.zeta), -mirror(s0.q)}, cfg);
    EXPECT_LT(sobolev_norm(mir[0] - mirror(end[0]), 0), 1e-9);
    EXPECT_LT(sobolev_norm(mir[1] + mirror(end[1]), 0), 1e-9);
}

TEST(Dispersion, Examples) {
    EXPECT_EQ(dispersion_omega(0.0, regime(0.1, 0.1, 0.9, 0.5)), 0.0);
    EXPECT_NEAR(dispersion_omega(1.0, regime(0.1, 1.0, 0.0, 1.0)), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_NEAR(dispersion_omega(1.0, regime(0.1, 1.0, 0.0, 1.0)), 0.8660254, 1e-7);
    EXPECT_DOUBLE_EQ(dispersion_omega(2.7, regime(0.1, 0.0, 0.9, 0.5)), 2.7);
}

TEST(Dispersion, PhaseSpeedOfSmallPlaneWave) {
    const RegimeParams p = regime(0.1, 0.1, 0.9, 0.5);
    const double k = 1.0;
    const GridPtr g = Grid::make(32, 2 * M_PI / k);
    const double w = dispersion_omega(k, p);
    const double A = 1e-6;
    // Right-going linear mode: zeta = A cos(kx - wt), vbar = (gamma+delta) w/k zeta.
    const Field z = Field::from_function(g, [&](double x) { return A * std::cos(k * x); });
    const Field v = ((p.gamma + p.delta) * w / k) * z;
    const GnState s = make_gn_state(z, v, p);
    IntegratorConfig cfg;
    cfg.method = Method::RK4;
    cfg.dt = 1e-3;
    cfg.t_end = 0.9 * M_PI / w;
    const State end = integrate(gn_system(p), {s.zeta, s.q}, cfg);
    std::complex<double> c0, c1;
    for (int j = 0; j < g->size(); ++j) {
        const std::complex<double> e = std::exp(std::complex<double>(0, -k * g->x(j)));
        c0 += z[j] * e;
        c1 += end[0][j] * e;
    }
    const double measured = -std::arg(c1 / c0) / cfg.t_end;
    EXPECT_NEAR(measured / w, 1.0, 1e-6);
}

TEST(ShearSystem, Stability) {
    const RegimeParams p = regime(0.1, 0.1, 0.9, 0.5);
    EXPECT_TRUE(shear_system_stability(0.0, p).stable);
    EXPECT_EQ(shear_system_stability(0.0, p).omega, 0.0);
    const double C = gn_dispersion_constant(p);
    const double k = std::sqrt(2.0 / (p.mu * C));
    EXPECT_FALSE(shear_system_stability(k, p).stable);
    EXPECT_LT(shear_system_stability(k, p).omega2, 0.0);
    EXPECT_TRUE(shear_system_stability(100.0, regime(0.1, 0.0, 0.9, 0.5)).stable);
    EXPECT_NEAR(shear_instability_threshold(p), 1.0 / std::sqrt(p.mu * C), 1e-12);
    EXPECT_TRUE(std::isinf(shear_instability_threshold(regime(0.1, 0.0, 0.9, 0.5))));
}
