#include "discotex/discotex_stepper.hpp"
#include "discotex/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace discotex;

namespace {

/// Global error of u' = lambda u + cos t on [0, 2] with the order-2s step and `steps` steps.
double forced_scalar_error(int order, int steps) {
    const double lambda = -1.0;
    const double T = 2.0;
    const double dt = T / steps;
    Eigen::MatrixXd L(1, 1);
    L(0, 0) = lambda;
    const StepOperators ops = build_step_operators(L, dt, order);
    auto stack = [&](double t) {
        SourceStack st;
        for (int k = 0; k < order / 2; ++k) {
            Eigen::VectorXcd v(1);
            v(0) = std::cos(t + k * M_PI / 2);
            st.derivs.push_back(v);
        }
        return st;
    };
    State s{0.0, Eigen::VectorXcd::Constant(1, 1.0)};
    for (int n = 0; n < steps; ++n) s = step(s, ops, stack(n * dt), stack((n + 1) * dt), Eigen::VectorXcd::Zero(1));
    /// u = (cos t + sin t)/2 + C e^{-t}, u(0) = 1
    const double exact = 0.5 * (std::cos(T) + std::sin(T)) + 0.5 * std::exp(-T);
    return std::abs(s.u(0) - exact);
}

}  // namespace

TEST(Tex, CoefficientsFromWeights) {
    EXPECT_EQ(tex_coefficients(2), (std::vector<Rational>{1}));
    EXPECT_EQ(tex_coefficients(6), (std::vector<Rational>{1, Rational(1, 60)}));
    EXPECT_EQ(tex_coefficients(10), (std::vector<Rational>{1, Rational(1, 36), Rational(1, 15120)}));
}

TEST(StepMap, IsDiagonalPadeAndUnimodular) {
    for (int order = 2; order <= 12; order += 2) {
        for (cplx z : {cplx{-0.3, 0.2}, cplx{-4.0, 7.0}, cplx{0.5, -1.0}}) {
            EXPECT_LT(std::abs(scalar_step_map(order, z) / pade_exp(order / 2, z) - 1.0), 1e-13) << order;
        }
        for (double y : {0.1, 1.0, 12.0, 150.0}) {
            EXPECT_NEAR(std::abs(scalar_step_map(order, cplx{0.0, y})), 1.0, 1e-13) << order;
        }
        const cplx z{0.01, 0.02};
        /// leading error term (s!)^2 / ((2s)! (2s+1)!) z^(2s+1)
        const int s = order / 2;
        const double c = factorial(s) * factorial(s) / (factorial(2 * s) * factorial(2 * s + 1));
        EXPECT_LT(std::abs(pade_exp(s, z) - std::exp(z)), 1.1 * c * std::pow(std::abs(z), order + 1) + 1e-15);
    }
}

TEST(StepOperators, RejectBadInput) {
    EXPECT_THROW((void)build_step_operators(Eigen::MatrixXd::Zero(2, 3), 0.1, 4), ValidationError);
    EXPECT_THROW((void)build_step_operators(Eigen::MatrixXd::Zero(2, 2), 0.0, 4), ValidationError);
    /// Q(A) = 1 - A/2 is singular for A = 2
    Eigen::MatrixXd L(1, 1);
    L(0, 0) = 2.0;
    EXPECT_THROW((void)build_step_operators(L, 1.0, 2), NumericalError);
}

TEST(Step, HomogeneousRotationMatchesPadePower) {
    Eigen::MatrixXd L(2, 2);
    L << 0.0, 1.0, -1.0, 0.0;
    const double dt = 0.1;
    const StepOperators ops = build_step_operators(L, dt, 6);
    SourceStack zero;
    for (int k = 0; k < 3; ++k) zero.derivs.push_back(Eigen::VectorXcd::Zero(2));
    State s{0.0, Eigen::VectorXcd(2)};
    s.u << 1.0, 0.0;
    for (int n = 0; n < 10; ++n) s = step(s, ops, zero, zero, Eigen::VectorXcd::Zero(2));
    /// eigenvalues +-i: u_0 = Re R(i dt)^n
    const cplx r = std::pow(scalar_step_map(6, cplx{0.0, dt}), 10);
    EXPECT_NEAR(s.u(0).real(), r.real(), 1e-13);
    EXPECT_NEAR(std::norm(s.u(0)) + std::norm(s.u(1)), 1.0, 1e-13);
    EXPECT_NEAR(s.tau, 1.0, 1e-14);
}

TEST(Step, ForcedScalarConvergesAtDesignOrder) {
    for (int order : {2, 4, 6, 8}) {
        const double e1 = forced_scalar_error(order, 8);
        const double e2 = forced_scalar_error(order, 16);
        EXPECT_NEAR(std::log2(e1 / e2), order, 0.5) << order;
    }
}

TEST(Step, RejectsShallowSources) {
    const StepOperators ops = build_step_operators(Eigen::MatrixXd::Identity(1, 1) * -1.0, 0.1, 6);
    SourceStack one;
    one.derivs.push_back(Eigen::VectorXcd::Zero(1));
    State s{0.0, Eigen::VectorXcd::Zero(1)};
    EXPECT_THROW((void)step(s, ops, one, one, Eigen::VectorXcd::Zero(1)), ValidationError);
}

TEST(Crossings, DetectedInsideStepWithOffset) {
    const auto grid = build_grid(45);
    const Trajectory traj(0.25);
    const double tau_i = *traj.crossing_time(grid.nodes[25]);
    const auto c = detect_crossings(traj, grid, tau_i - 0.001, tau_i + 0.001);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].node, 25);
    EXPECT_NEAR(c[0].dt_cross, 0.001, 1e-12);
    EXPECT_EQ(c[0].direction, 1);
    EXPECT_TRUE(detect_crossings(traj, grid, tau_i + 0.001, tau_i + 0.002).empty());
}

TEST(Crossings, UpsilonCarriesFieldAndFirstTimeJump) {
    const auto grid = build_grid(20);
    const Trajectory traj(0.25);
    const double tau_i = *traj.crossing_time(grid.nodes[10]);
    const auto c = detect_crossings(traj, grid, tau_i - 0.01, tau_i + 0.01);
    ASSERT_EQ(c.size(), 1u);
    const Eigen::VectorXcd u = upsilon_correction(c, 21, 0.25);
    EXPECT_LT(std::abs(u(10) - time_jump(0, 0.25).evaluate(c[0].t)), 1e-15);
    EXPECT_LT(std::abs(u(31) - time_jump(1, 0.25).evaluate(c[0].t)), 1e-15);
    EXPECT_EQ(u.cwiseAbs().sum(), std::abs(u(10)) + std::abs(u(31)));

    const Eigen::VectorXcd exact = time_jump_correction(6, c, 21, 0.02, 0.25, TimeJumpSource::exact);
    const Eigen::VectorXcd printed = time_jump_correction(6, c, 21, 0.02, 0.25, TimeJumpSource::printed);
    EXPECT_EQ(exact(10), printed(10));
    EXPECT_GT(std::abs(exact(31) - printed(31)), 1e-6);
}

TEST(Config, ValidationListsEveryProblem) {
    StepperConfig c;
    c.order = 7;
    c.dt = -1.0;
    c.n = 3;
    c.velocity = 1.5;
    const auto errs = validate(c);
    EXPECT_GE(errs.size(), 4u);
    EXPECT_THROW((void)evolve(c), ValidationError);
    EXPECT_TRUE(validate(StepperConfig{}).empty());
    EXPECT_EQ(step_count(StepperConfig{}), 903);
}

TEST(Evolve, ShortRunIsAccurateAndFinite) {
    StepperConfig c;
    c.order = 4;
    c.m_jumps = 12;
    c.dt = 0.02;
    c.tau_end = 0.0;
    c.keep_history = true;
    c.snapshot_tau = -1.0;
    const RunArtifacts r = evolve(c);
    EXPECT_EQ(r.steps, 76);
    EXPECT_EQ(r.eta.size(), 77u);
    EXPECT_EQ(r.history.size(), 77u);
    ASSERT_TRUE(r.snapshot.has_value());
    EXPECT_NEAR(r.snapshot->tau, -1.0, 0.011);
    for (double e : r.eta) EXPECT_TRUE(std::isfinite(e));
    EXPECT_LT(r.eta_final(), 1e-7);
    EXPECT_EQ(r.eta.front(), 0.0);
}

TEST(Evolve, PrintedPiJumpsDegradeAccuracy) {
    StepperConfig c;
    c.order = 4;
    c.m_jumps = 12;
    c.dt = 0.02;
    c.tau_end = 1.0;
    const double good = evolve(c).eta_final();
    c.time_jumps = TimeJumpSource::printed;
    const double bad = evolve(c).eta_final();
    EXPECT_GT(bad, 100.0 * good);
}

TEST(Evolve, RelativeError) {
    EXPECT_DOUBLE_EQ(relative_error(cplx{2.0, 0.0}, cplx{2.0, 0.0}), 0.0);
    EXPECT_NEAR(relative_error(cplx{1.01, 0.0}, cplx{1.0, 0.0}), 0.01, 1e-15);
}
