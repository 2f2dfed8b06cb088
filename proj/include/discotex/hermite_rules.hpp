#pragma once

#include "discotex/jet.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace discotex {

using Rational = boost::multiprecision::cpp_rational;

/// Two-point Obreshkov rule of order 2s:
///   sum_d c_d dt^{d+1} (f^(d)(t_n) + (-1)^d f^(d)(t_{n+1})),  d = 0..s-1.
struct HermiteRule {
    int order = 0;
    std::vector<Rational> weights;

    [[nodiscard]] int stages() const { return order / 2; }
    [[nodiscard]] std::vector<double> weights_double() const;
};

/// Rule weights from c_d = s! (2s-d-1)! / ((2s)! (d+1)! (s-d-1)!). Orders 2, 4, ..., 12.
[[nodiscard]] HermiteRule hermite_rule(int order);

/// Polynomial sum a_{p,q} dt^p x^q in the step length dt and crossing offset x.
class BivariatePoly {
public:
    BivariatePoly() = default;
    [[nodiscard]] static BivariatePoly constant(const Rational& c);
    [[nodiscard]] static BivariatePoly dt();
    [[nodiscard]] static BivariatePoly cross();

    [[nodiscard]] const std::map<std::pair<int, int>, Rational>& terms() const { return terms_; }
    [[nodiscard]] Rational coefficient(int p, int q) const;
    [[nodiscard]] double evaluate(double dt, double x) const;
    [[nodiscard]] Rational evaluate(const Rational& dt, const Rational& x) const;
    void add_term(int p, int q, const Rational& c);

    friend BivariatePoly operator+(const BivariatePoly& a, const BivariatePoly& b);
    friend BivariatePoly operator-(const BivariatePoly& a, const BivariatePoly& b);
    friend BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b);
    friend BivariatePoly operator*(const Rational& s, const BivariatePoly& a);
    friend bool operator==(const BivariatePoly& a, const BivariatePoly& b) { return a.terms_ == b.terms_; }

private:
    std::map<std::pair<int, int>, Rational> terms_;
};

[[nodiscard]] BivariatePoly pow(const BivariatePoly& a, int k);

/// Jump-correction polynomials: the correction is sum_d coeffs[d](dt, x) * J_d, d = 0..order-1,
/// with J_d = f^(d)(after) - f^(d)(before) at the crossing t_n + x.
struct JumpQuadrature {
    int order = 0;
    std::vector<BivariatePoly> coeffs;
};

/// Oracle: solves the 4s x 4s piecewise-interpolation conditions over exact rationals.
[[nodiscard]] JumpQuadrature derive_jump_quadrature(int order);

/// Cached oracle output (the table used for stepping).
[[nodiscard]] const JumpQuadrature& jump_quadrature(int order);

/// Transcribed tables for orders 2, 4, 6 and 8. Order 4 carries two repairs: the J_1 term
/// has no x^2 prefactor and the J_3 term is x^2 (dt - x)^2 / 24.
[[nodiscard]] JumpQuadrature transcribed_jump_quadrature(int order);

/// The order-4 table exactly as printed, before the repairs above.
[[nodiscard]] JumpQuadrature printed_h4_literal();

/// Smooth two-point quadrature of f over [t_n, t_n + dt] from endpoint derivative stacks of length s.
[[nodiscard]] cplx smooth_step(const HermiteRule& rule, std::span<const cplx> left, std::span<const cplx> right,
                               double dt);

/// sum_d coeffs[d](dt, dt_cross) * jumps[d]; requires 0 <= dt_cross <= dt.
[[nodiscard]] cplx jump_correction(const JumpQuadrature& quad, double dt_cross, double dt,
                                   std::span<const cplx> jumps);

/// Endpoint data for an integrand: derivatives 0..count-1 at t.
using StackProvider = std::function<std::vector<cplx>(double t, int count)>;

/// Composite integration with optional jump corrections at the given crossings.
///
/// A crossing on a step boundary belongs to the step on its right with dt_cross = 0; the provider
/// must then return the left limit at that boundary.
[[nodiscard]] cplx integrate_discontinuous(const StackProvider& provider, const StackProvider& jump_provider,
                                           double a, double b, std::span<const double> crossings, int steps,
                                           int order, bool jump_corrections = true);

/// Reference value of the integral of Q5 on [-0.55, 0] plus P5 on [0, 0.45].
inline constexpr double kLegendreReference = 0.11258833034640257716;

/// Derivatives 0..count-1 of P5 (branch > 0) or Q5 (branch < 0) at t.
[[nodiscard]] std::vector<double> legendre_stack(double t, int count, bool positive_branch);

/// Jumps P5^(d)(0) - Q5^(d)(0), d = 0..11, as exact rationals.
[[nodiscard]] std::vector<Rational> legendre_jumps();

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

[[nodiscard]] QuadResult legendre_benchmark(int order, int steps, bool jump_corrections = true);

/// 50 significant digits, for convergence slopes below double round-off.
using Extended = boost::multiprecision::cpp_bin_float_50;

inline constexpr const char* kLegendreReferenceDigits =
    "0.112588330346402549207669733963033384980115674865009060521762";

struct ExtendedQuadResult {
    Extended value;
    Extended error;
};

/// The benchmark carried out in Extended arithmetic with the same rational tables.
[[nodiscard]] ExtendedQuadResult legendre_benchmark_extended(int order, int steps, bool jump_corrections = true);

}  // namespace discotex
