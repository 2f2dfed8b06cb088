#include "discotex/disco_collocation.hpp"
#include "discotex/errors.hpp"
#include "discotex/wave_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace discotex;

namespace {

const cplx I{0.0, 1.0};

/// Exact branches continued to complex s, used as a Cauchy-integral oracle for J_m.
cplx psi_minus(double v, double tau, cplx s) {
    const double a = 1.0 / (1.0 - v);
    const cplx th = a * (tau - std::log(1.0 - s));
    return -0.5 * std::sin(th) + 0.5 * I * a * std::cos(th);
}

cplx psi_plus(double v, double tau, cplx s) {
    const double b = 1.0 / (1.0 + v);
    const cplx th = b * (tau + 1.0 / s - std::log(s));
    return -0.5 * std::sin(th) - 0.5 * I * b * std::cos(th);
}

/// m-th s-derivative of psi_plus - psi_minus at xi by the trapezoid rule on a circle.
cplx cauchy_jump(double v, double tau, double xi, int m) {
    const double r = 0.5 * std::min(xi, 1.0 - xi);
    const int K = 128;
    cplx acc = 0.0;
    for (int k = 0; k < K; ++k) {
        const cplx w = r * std::exp(I * (2.0 * std::numbers::pi * k / K));
        acc += (psi_plus(v, tau, xi + w) - psi_minus(v, tau, xi + w)) / std::pow(w, m);
    }
    return acc / static_cast<double>(K) * factorial(m);
}

}  // namespace

TEST(Jet, ArithmeticAndComposition) {
    const Jet x = Jet::variable(0.3, 6);
    const Jet y = x * x * x;
    EXPECT_NEAR(y.derivative(1).real(), 3 * 0.09, 1e-15);
    EXPECT_NEAR(y.derivative(3).real(), 6.0, 1e-13);
    const Jet r = reciprocal(Jet::variable(2.0, 5));
    EXPECT_NEAR(r.derivative(2).real(), 2.0 / 8.0, 1e-15);
    const auto [c, s] = cos_sin(x);
    EXPECT_NEAR(c.derivative(1).real(), -std::sin(0.3), 1e-15);
    EXPECT_NEAR(s.derivative(4).real(), std::sin(0.3), 1e-13);
    const double d[] = {std::exp(1.0), std::exp(1.0), std::exp(1.0), std::exp(1.0), std::exp(1.0)};
    const Jet e = compose(d, Jet::variable(0.0, 5));
    double taylor = 0.0;
    for (int k = 0; k < 5; ++k) taylor += std::exp(1.0) * std::pow(0.1, k) / factorial(k);
    EXPECT_NEAR(e.evaluate(0.1).real(), taylor, 1e-14);
    EXPECT_DOUBLE_EQ(binomial(10, 3), 120.0);
}

TEST(TrigPair, DerivativeAndCompose) {
    const TrigPair p{cplx{1.0, 2.0}, cplx{-0.5, 0.25}};
    const double t = 0.7;
    const double h = 1e-6;
    const cplx fd = (p.evaluate(t + h) - p.evaluate(t - h)) / (2 * h);
    EXPECT_LT(std::abs(p.derivative().evaluate(t) - fd), 1e-8);
    const Jet phase = Jet::variable(t, 4);
    const Jet j = p.compose(phase);
    EXPECT_LT(std::abs(j.derivative(2) - p.derivative().derivative().evaluate(t)), 1e-13);
}

TEST(JumpRecurrence, MatchesCauchyOracle) {
    const Trajectory traj(0.25);
    for (double tau : {-1.2, 0.5, 3.0}) {
        const JumpData data = assemble_jump_data(traj, tau, 12, 3);
        const double xi = data.xi.value().real();
        for (int m = 0; m <= 10; ++m) {
            const cplx want = cauchy_jump(0.25, tau, xi, m);
            const cplx got = data.psi.entries[m].value();
            EXPECT_LT(std::abs(got - want), 1e-9 * std::max(1.0, std::abs(want))) << "tau " << tau << " m " << m;
        }
    }
}

TEST(JumpRecurrence, PiSeriesIsTotalDerivativeMinusTransport) {
    const Trajectory traj(0.25);
    const JumpData data = assemble_jump_data(traj, 1.1, 10, 4);
    for (int m = 0; m < 8; ++m) {
        const cplx want = data.psi.entries[m].derivative(1) - data.xi.derivative(1) * data.psi.entries[m + 1].value();
        EXPECT_LT(std::abs(data.pi.entries[m].value() - want), 1e-12);
    }
}

TEST(JumpRecurrence, RejectsShortJetsAndDegenerateLead) {
    const auto coeffs = coefficients::recurrence();
    const Jet j = Jet::constant(1.0, 2);
    EXPECT_THROW((void)jump_recurrence(j, j, coeffs, Jet::variable(0.5, 2), 6), ValidationError);
    RecurrenceCoefficients zero{[](int, double) { return 0.0; }, [](int, double) { return 0.0; },
                                [](int, double) { return 0.0; }, [](int, double) { return 0.0; },
                                [](int, double) { return 0.0; }, 2};
    const Jet long_j = Jet::constant(1.0, 12);
    EXPECT_THROW((void)jump_recurrence(long_j, long_j, zero, Jet::variable(0.5, 12), 4), NumericalError);
}

TEST(GFunction, ValueIsTaylorSum) {
    JumpSeries s;
    for (int m = 0; m < 12; ++m) s.entries.push_back(Jet::constant(std::pow(2.0, m), 1));
    EXPECT_NEAR(g_value(s, 0.1).real(), std::exp(0.2), 1e-13);
}

TEST(GFunction, TimeDerivativesMatchFiniteDifferences) {
    const Trajectory traj(0.25);
    const double tau = 0.4;
    const double h = 2e-3;
    const double xi0 = traj.position(tau);
    const double s = xi0 + 0.12;
    auto gk = [&](double t, int k) {
        const JumpData d = assemble_jump_data(traj, t, 19, 8);
        const double w = s - d.xi.value().real();
        return k == 0 ? g_value(d.psi, w) : g_time_derivative(d.psi, d.xi, w, k);
    };
    for (int k = 1; k <= 5; ++k) {
        const cplx fd = (-gk(tau + 2 * h, k - 1) + 8.0 * gk(tau + h, k - 1) - 8.0 * gk(tau - h, k - 1) +
                         gk(tau - 2 * h, k - 1)) /
                        (12 * h);
        const cplx an = gk(tau, k);
        EXPECT_LT(std::abs(an - fd), 1e-7 * std::max(1.0, std::abs(an))) << "k " << k;
    }
    const JumpData d = assemble_jump_data(traj, tau, 19, 8);
    EXPECT_THROW((void)g_time_derivative(d.psi, d.xi, 0.1, 6), ValidationError);
}

TEST(GFunction, JetAgreesWithExplicitDerivatives) {
    const Trajectory traj(0.25);
    const JumpData d = assemble_jump_data(traj, 2.0, 19, 6);
    const double s = d.xi.value().real() - 0.1;
    const Jet j = g_jet(d.psi, d.xi, s, 6);
    for (int k = 1; k <= 5; ++k) {
        const cplx want = g_time_derivative(d.psi, d.xi, s - d.xi.value().real(), k);
        EXPECT_LT(std::abs(j.derivative(k) - want), 1e-10 * std::max(1.0, std::abs(want))) << "k " << k;
    }
}

TEST(Heaviside, HalfAtZero) {
    EXPECT_EQ(heaviside(-1e-300), 0.0);
    EXPECT_EQ(heaviside(0.0), 0.5);
    EXPECT_EQ(heaviside(2.0), 1.0);
}

TEST(CorrectedDerivative, SourceVectorMatchesJetColumn) {
    const auto grid = build_grid(20);
    const Trajectory traj(0.25);
    const JumpData d = assemble_jump_data(traj, 0.8, 15, 4);
    const Eigen::MatrixXcd jets = corrected_derivative_jets(grid, 1, d.psi, d.xi, 4);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
    for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXcd v = source_vector(grid, ones, 1, d.psi, d.xi, k);
        EXPECT_LT((v - jets.col(k) * factorial(k)).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + v.cwiseAbs().maxCoeff()))
            << "k " << k;
    }
}

TEST(CorrectedDerivative, DeltaWeightsVanishOnSameSide) {
    const auto grid = build_grid(10);
    const Trajectory traj(0.25);
    const JumpData d = assemble_jump_data(traj, 0.8, 10, 2);
    const double xi = d.xi.value().real();
    for (int i = 0; i <= 10; ++i) {
        for (int j = 0; j <= 10; ++j) {
            const bool same = (grid.nodes[i] > xi) == (grid.nodes[j] > xi);
            if (same) {
                EXPECT_EQ(delta_correction(grid, d.psi, d.xi, i, j, 0), cplx(0.0));
            }
        }
    }
    EXPECT_THROW((void)delta_correction(grid, d.psi, d.xi, 11, 0, 0), ValidationError);
}
