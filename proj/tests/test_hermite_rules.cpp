#include "discotex/errors.hpp"
#include "discotex/hermite_rules.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace discotex;

namespace {

/// Closed form of the jump-correction coefficient for J_e at offset x in a step of length dt.
Rational closed_form(int order, int e, const Rational& dt, const Rational& x) {
    const HermiteRule rule = hermite_rule(order);
    auto rpow = [](Rational b, int k) {
        Rational r = 1;
        for (int i = 0; i < k; ++i) r *= b;
        return r;
    };
    auto rfact = [](int k) {
        Rational r = 1;
        for (int i = 2; i <= k; ++i) r *= i;
        return r;
    };
    const Rational y = dt - x;
    Rational c = rpow(y, e + 1) / rfact(e + 1);
    for (int d = 0; d <= std::min(e, rule.stages() - 1); ++d) {
        const Rational sign = d % 2 == 0 ? 1 : -1;
        c -= sign * rule.weights[d] * rpow(dt, d + 1) * rpow(y, e - d) / rfact(e - d);
    }
    return c;
}

}  // namespace

TEST(HermiteRule, KnownWeights) {
    EXPECT_EQ(hermite_rule(2).weights, (std::vector<Rational>{Rational(1, 2)}));
    EXPECT_EQ(hermite_rule(4).weights, (std::vector<Rational>{Rational(1, 2), Rational(1, 12)}));
    EXPECT_EQ(hermite_rule(6).weights, (std::vector<Rational>{Rational(1, 2), Rational(1, 10), Rational(1, 120)}));
    const auto w10 = hermite_rule(10).weights;
    EXPECT_EQ(w10[1], Rational(1, 9));
    EXPECT_EQ(w10[2], Rational(1, 72));
    EXPECT_EQ(w10[3], Rational(1, 1008));
    EXPECT_EQ(w10[4], Rational(1, 30240));
    EXPECT_THROW((void)hermite_rule(5), ValidationError);
    EXPECT_THROW((void)hermite_rule(14), ValidationError);
}

TEST(HermiteRule, SmoothStepExactForDegreeTwoSMinusOne) {
    for (int order = 2; order <= 12; order += 2) {
        const HermiteRule rule = hermite_rule(order);
        const int s = rule.stages();
        const int deg = order - 1;
        /// f = t^deg on [0.3, 0.8]
        auto stack = [&](double t) {
            std::vector<cplx> v;
            for (int d = 0; d < s; ++d) v.emplace_back(factorial(deg) / factorial(deg - d) * std::pow(t, deg - d));
            return v;
        };
        const double exact = (std::pow(0.8, deg + 1) - std::pow(0.3, deg + 1)) / (deg + 1);
        EXPECT_NEAR(smooth_step(rule, stack(0.3), stack(0.8), 0.5).real(), exact, 1e-14) << order;
    }
}

TEST(JumpQuadrature, TranscribedTablesEqualOracle) {
    for (int order : {2, 4, 6, 8}) {
        const auto printed = transcribed_jump_quadrature(order);
        const auto& oracle = jump_quadrature(order);
        ASSERT_EQ(printed.coeffs.size(), oracle.coeffs.size());
        for (std::size_t d = 0; d < printed.coeffs.size(); ++d) {
            EXPECT_TRUE(printed.coeffs[d] == oracle.coeffs[d]) << "order " << order << " J" << d;
        }
    }
}

TEST(JumpQuadrature, PrintedH4LiteralDiffersFromOracle) {
    const auto literal = printed_h4_literal();
    const auto& oracle = jump_quadrature(4);
    EXPECT_FALSE(literal.coeffs[1] == oracle.coeffs[1]);
    EXPECT_FALSE(literal.coeffs[3] == oracle.coeffs[3]);
    EXPECT_TRUE(literal.coeffs[0] == oracle.coeffs[0]);
    EXPECT_TRUE(literal.coeffs[2] == oracle.coeffs[2]);
}

TEST(JumpQuadrature, OracleMatchesClosedForm) {
    const Rational dt(3, 7);
    const Rational x(1, 5);
    for (int order = 2; order <= 12; order += 2) {
        const auto& q = jump_quadrature(order);
        for (int e = 0; e < order; ++e) {
            EXPECT_EQ(q.coeffs[e].evaluate(dt, x), closed_form(order, e, dt, x)) << order << " " << e;
        }
    }
}

TEST(JumpQuadrature, HomogeneousInStepAndOffset) {
    const auto& q = jump_quadrature(8);
    for (int e = 0; e < 8; ++e) {
        for (const auto& [pq, c] : q.coeffs[e].terms()) EXPECT_EQ(pq.first + pq.second, e + 1);
    }
}

TEST(JumpQuadrature, ExactOnPiecewisePolynomials) {
    for (int order = 2; order <= 12; order += 2) {
        const int deg = order - 1;
        const double brk = 0.37;
        /// left piece t^deg, right piece 2 - t^(deg-1)
        auto left = [&](double t, int count) {
            std::vector<cplx> v;
            for (int d = 0; d < count; ++d) v.emplace_back(d <= deg ? factorial(deg) / factorial(deg - d) * std::pow(t, deg - d) : 0.0);
            return v;
        };
        auto right = [&](double t, int count) {
            std::vector<cplx> v;
            const int p = deg - 1;
            for (int d = 0; d < count; ++d) {
                double val = d <= p ? -factorial(p) / factorial(p - d) * std::pow(t, p - d) : 0.0;
                if (d == 0) val += 2.0;
                v.emplace_back(val);
            }
            return v;
        };
        const StackProvider f = [&](double t, int c) { return t < brk ? left(t, c) : right(t, c); };
        const StackProvider j = [&](double t, int c) {
            auto r = right(t, c);
            const auto l = left(t, c);
            for (int i = 0; i < c; ++i) r[i] -= l[i];
            return r;
        };
        const double exact = std::pow(brk, deg + 1) / (deg + 1) + 2.0 * (1.0 - brk) -
                             (1.0 - std::pow(brk, deg)) / deg;
        const double cr[] = {brk};
        EXPECT_NEAR(integrate_discontinuous(f, j, 0.0, 1.0, cr, 1, order).real(), exact, 1e-13) << order;
        EXPECT_NEAR(integrate_discontinuous(f, j, 0.0, 1.0, cr, 3, order).real(), exact, 1e-13) << order;
    }
}

TEST(JumpQuadrature, CrossingOnStepBoundaryUsesRightStep) {
    const double cr[] = {0.5};
    const StackProvider f = [](double t, int c) {
        std::vector<cplx> v(c, 0.0);
        v[0] = t <= 0.5 ? 0.0 : 1.0;
        return v;
    };
    const StackProvider j = [](double, int c) {
        std::vector<cplx> v(c, 0.0);
        v[0] = 1.0;
        return v;
    };
    EXPECT_NEAR(integrate_discontinuous(f, j, 0.0, 1.0, cr, 2, 4).real(), 0.5, 1e-15);
}

TEST(JumpQuadrature, RejectsTwoCrossingsInOneStep) {
    const double cr[] = {0.2, 0.3};
    const StackProvider f = [](double, int c) { return std::vector<cplx>(c, 0.0); };
    EXPECT_THROW((void)integrate_discontinuous(f, f, 0.0, 1.0, cr, 1, 4), ValidationError);
    const double outside[] = {1.5};
    EXPECT_THROW((void)integrate_discontinuous(f, f, 0.0, 1.0, outside, 1, 4), ValidationError);
}

TEST(Legendre, JumpsMatchPrintedList) {
    const std::vector<Rational> printed = {Rational(8, 15), Rational(15, 8), -16, Rational(-105, 2), 384, 945,
                                           -3840, 0, -46080, 0, -1935360, 0};
    EXPECT_EQ(legendre_jumps(), printed);
}

TEST(Legendre, StackBranchesAgreeWithClosedForms) {
    const double t = 0.3;
    const double p5 = (63 * std::pow(t, 5) - 70 * std::pow(t, 3) + 15 * t) / 8;
    EXPECT_NEAR(legendre_stack(t, 1, true)[0], p5, 1e-15);
    const double q5 = p5 * std::atanh(t) - (63 * std::pow(t, 4) / 8 - 49 * t * t / 8 + 8.0 / 15);
    EXPECT_NEAR(legendre_stack(t, 1, false)[0], q5, 1e-15);
    const double h = 1e-5;
    const double fd = (legendre_stack(t + h, 1, false)[0] - legendre_stack(t - h, 1, false)[0]) / (2 * h);
    EXPECT_NEAR(legendre_stack(t, 2, false)[1], fd, 1e-8);
}

TEST(Legendre, Order12ReachesReference) {
    EXPECT_NEAR(legendre_benchmark(12, 8).value, 0.1125883303464025, 1e-12);
    EXPECT_LT(static_cast<double>(legendre_benchmark_extended(12, 64).error), 1e-22);
}

TEST(Legendre, ExtendedAgreesWithDouble) {
    for (int order : {2, 6, 10}) {
        const double d = legendre_benchmark(order, 16).value;
        const double e = static_cast<double>(legendre_benchmark_extended(order, 16).value);
        EXPECT_NEAR(d, e, 1e-14) << order;
    }
}
