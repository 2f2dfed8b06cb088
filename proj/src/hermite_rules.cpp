#include "discotex/hermite_rules.hpp"

#include "discotex/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <string>

namespace discotex {

namespace {

void check_order(int order) {
    if (order < 2 || order > 12 || order % 2 != 0) {
        throw ValidationError("order must be even and in [2, 12], got " + std::to_string(order));
    }
}

Rational rfact(int k) {
    Rational r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

Rational rpow(const Rational& x, int k) {
    Rational r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

/// Solve A X = B in place over the rationals (Gauss-Jordan with nonzero pivoting).
void rational_solve(std::vector<std::vector<Rational>>& A, std::vector<std::vector<Rational>>& B) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && A[piv][col] == 0) ++piv;
        if (piv == n) throw NumericalError("derive_jump_quadrature: singular collocation system");
        std::swap(A[piv], A[col]);
        std::swap(B[piv], B[col]);
        const Rational inv = 1 / A[col][col];
        for (auto& x : A[col]) x *= inv;
        for (auto& x : B[col]) x *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            const Rational f = A[r][col];
            for (std::size_t c = 0; c < n; ++c) A[r][c] -= f * A[col][c];
            for (std::size_t c = 0; c < B[r].size(); ++c) B[r][c] -= f * B[col][c];
        }
    }
}

/// Correction for unit jumps at crossing r on [0, 1]; entry e is the response to J_e = 1.
std::vector<Rational> unit_jump_integrals(int s, const Rational& r) {
    const int deg = 2 * s;  // coefficients per branch
    const int n = 2 * deg;
    std::vector<std::vector<Rational>> A(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    std::vector<std::vector<Rational>> B(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(deg)));
    /// k-th derivative of t^i at t: i!/(i-k)! t^{i-k}
    auto dmono = [](int i, int k, const Rational& t) -> Rational {
        if (k > i) return 0;
        return rfact(i) / rfact(i - k) * rpow(t, i - k);
    };
    int row = 0;
    for (int k = 0; k < s; ++k, ++row) {
        for (int i = 0; i < deg; ++i) A[row][i] = dmono(i, k, Rational(0));
    }
    for (int k = 0; k < s; ++k, ++row) {
        for (int i = 0; i < deg; ++i) A[row][deg + i] = dmono(i, k, Rational(1));
    }
    for (int k = 0; k < deg; ++k, ++row) {
        for (int i = 0; i < deg; ++i) {
            A[row][i] = -dmono(i, k, r);
            A[row][deg + i] = dmono(i, k, r);
        }
        B[row][k] = 1;
    }
    rational_solve(A, B);
    std::vector<Rational> out(static_cast<std::size_t>(deg));
    for (int e = 0; e < deg; ++e) {
        Rational I = 0;
        for (int i = 0; i < deg; ++i) {
            const Rational lo = B[i][e];
            const Rational hi = B[deg + i][e];
            I += lo * rpow(r, i + 1) / (i + 1) + hi * (1 - rpow(r, i + 1)) / (i + 1);
        }
        out[static_cast<std::size_t>(e)] = I;
    }
    return out;
}

/// Monomial coefficients of the polynomial through (x_i, y_i).
std::vector<Rational> interpolate(const std::vector<Rational>& x, const std::vector<Rational>& y) {
    const std::size_t n = x.size();
    std::vector<std::vector<Rational>> V(n, std::vector<Rational>(n));
    std::vector<std::vector<Rational>> Y(n, std::vector<Rational>(1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) V[i][j] = rpow(x[i], static_cast<int>(j));
        Y[i][0] = y[i];
    }
    rational_solve(V, Y);
    std::vector<Rational> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = Y[i][0];
    return c;
}

BivariatePoly poly(std::initializer_list<std::array<long, 4>> terms) {
    /// {p, q, numerator, denominator}
    BivariatePoly b;
    for (const auto& t : terms) b.add_term(static_cast<int>(t[0]), static_cast<int>(t[1]), Rational(t[2]) / t[3]);
    return b;
}

}  // namespace

std::vector<double> HermiteRule::weights_double() const {
    std::vector<double> w;
    w.reserve(weights.size());
    for (const auto& c : weights) w.push_back(static_cast<double>(c));
    return w;
}

HermiteRule hermite_rule(int order) {
    check_order(order);
    const int s = order / 2;
    HermiteRule rule;
    rule.order = order;
    for (int d = 0; d < s; ++d) {
        rule.weights.push_back(rfact(s) * rfact(2 * s - d - 1) / (rfact(2 * s) * rfact(d + 1) * rfact(s - d - 1)));
    }
    return rule;
}

BivariatePoly BivariatePoly::constant(const Rational& c) {
    BivariatePoly b;
    b.add_term(0, 0, c);
    return b;
}

BivariatePoly BivariatePoly::dt() {
    BivariatePoly b;
    b.add_term(1, 0, 1);
    return b;
}

BivariatePoly BivariatePoly::cross() {
    BivariatePoly b;
    b.add_term(0, 1, 1);
    return b;
}

Rational BivariatePoly::coefficient(int p, int q) const {
    auto it = terms_.find({p, q});
    return it == terms_.end() ? Rational(0) : it->second;
}

void BivariatePoly::add_term(int p, int q, const Rational& c) {
    if (c == 0) return;
    auto& slot = terms_[{p, q}];
    slot += c;
    if (slot == 0) terms_.erase({p, q});
}

double BivariatePoly::evaluate(double dt, double x) const {
    double acc = 0.0;
    for (const auto& [pq, c] : terms_) acc += static_cast<double>(c) * std::pow(dt, pq.first) * std::pow(x, pq.second);
    return acc;
}

Rational BivariatePoly::evaluate(const Rational& dt, const Rational& x) const {
    Rational acc = 0;
    for (const auto& [pq, c] : terms_) acc += c * rpow(dt, pq.first) * rpow(x, pq.second);
    return acc;
}

BivariatePoly operator+(const BivariatePoly& a, const BivariatePoly& b) {
    BivariatePoly r = a;
    for (const auto& [pq, c] : b.terms_) r.add_term(pq.first, pq.second, c);
    return r;
}

BivariatePoly operator-(const BivariatePoly& a, const BivariatePoly& b) { return a + Rational(-1) * b; }

BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b) {
    BivariatePoly r;
    for (const auto& [p1, c1] : a.terms_) {
        for (const auto& [p2, c2] : b.terms_) r.add_term(p1.first + p2.first, p1.second + p2.second, c1 * c2);
    }
    return r;
}

BivariatePoly operator*(const Rational& s, const BivariatePoly& a) {
    BivariatePoly r;
    for (const auto& [pq, c] : a.terms_) r.add_term(pq.first, pq.second, s * c);
    return r;
}

BivariatePoly pow(const BivariatePoly& a, int k) {
    BivariatePoly r = BivariatePoly::constant(1);
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

JumpQuadrature derive_jump_quadrature(int order) {
    check_order(order);
    const int s = order / 2;
    const int deg = 2 * s;
    /// phi_e(r) = correction at dt = 1 has degree <= e + 1 <= 2s; sample 2s + 1 points.
    std::vector<Rational> rs;
    std::vector<std::vector<Rational>> samples;
    for (int i = 0; i <= deg; ++i) {
        rs.push_back(Rational(i) / deg);
        samples.push_back(unit_jump_integrals(s, rs.back()));
    }
    JumpQuadrature q;
    q.order = order;
    for (int e = 0; e < deg; ++e) {
        std::vector<Rational> y;
        for (const auto& smp : samples) y.push_back(smp[static_cast<std::size_t>(e)]);
        const auto c = interpolate(rs, y);
        /// Homogeneous of degree e + 1: coef = dt^{e+1} phi(x / dt)
        BivariatePoly p;
        for (int k = 0; k < static_cast<int>(c.size()); ++k) {
            if (c[static_cast<std::size_t>(k)] == 0) continue;
            if (k > e + 1) throw NumericalError("derive_jump_quadrature: correction is not homogeneous");
            p.add_term(e + 1 - k, k, c[static_cast<std::size_t>(k)]);
        }
        q.coeffs.push_back(std::move(p));
    }
    return q;
}

const JumpQuadrature& jump_quadrature(int order) {
    check_order(order);
    static std::array<JumpQuadrature, 7> cache;
    static std::array<std::once_flag, 7> flags;
    const auto idx = static_cast<std::size_t>(order / 2);
    std::call_once(flags[idx], [&] { cache[idx] = derive_jump_quadrature(order); });
    return cache[idx];
}

JumpQuadrature transcribed_jump_quadrature(int order) {
    const auto T = BivariatePoly::dt();
    const auto X = BivariatePoly::cross();
    auto R = [](long n, long d) { return Rational(n) / d; };
    const auto T2X = T - R(2, 1) * X;  // (dt - 2x)
    const auto TmX = T - X;            // (dt - x)
    JumpQuadrature q;
    q.order = order;
    switch (order) {
        case 2:
            q.coeffs = {R(1, 2) * T2X, R(1, 2) * X * (X - T)};
            break;
        case 4:
            q.coeffs = {R(1, 2) * T2X, R(1, 12) * poly({{{2, 0, 1, 1}}, {{1, 1, -6, 1}}, {{0, 2, 6, 1}}}),
                        R(-1, 12) * X * poly({{{2, 0, 1, 1}}, {{1, 1, -3, 1}}, {{0, 2, 2, 1}}}),
                        R(1, 24) * pow(X, 2) * pow(TmX, 2)};
            break;
        case 6:
            q.coeffs = {R(1, 2) * T2X, R(1, 10) * poly({{{2, 0, 1, 1}}, {{1, 1, -5, 1}}, {{0, 2, 5, 1}}}),
                        R(1, 120) * T2X * poly({{{2, 0, 1, 1}}, {{1, 1, -10, 1}}, {{0, 2, 10, 1}}}),
                        R(-1, 120) * TmX * X * poly({{{2, 0, 1, 1}}, {{1, 1, -5, 1}}, {{0, 2, 5, 1}}}),
                        R(1, 240) * T2X * pow(TmX, 2) * pow(X, 2), R(-1, 720) * pow(TmX, 3) * pow(X, 3)};
            break;
        case 8:
            q.coeffs = {
                R(1, 2) * T2X,
                R(1, 28) * poly({{{2, 0, 3, 1}}, {{1, 1, -14, 1}}, {{0, 2, 14, 1}}}),
                R(1, 84) * T2X * poly({{{2, 0, 1, 1}}, {{1, 1, -7, 1}}, {{0, 2, 7, 1}}}),
                R(1, 1680) * poly({{{4, 0, 1, 1}}, {{3, 1, -20, 1}}, {{2, 2, 90, 1}}, {{1, 3, -140, 1}}, {{0, 4, 70, 1}}}),
                R(-1, 1680) * T2X * TmX * X * poly({{{2, 0, 1, 1}}, {{1, 1, -7, 1}}, {{0, 2, 7, 1}}}),
                R(1, 10080) * pow(TmX, 2) * pow(X, 2) * poly({{{2, 0, 3, 1}}, {{1, 1, -14, 1}}, {{0, 2, 14, 1}}}),
                R(-1, 10080) * T2X * pow(TmX, 3) * pow(X, 3),
                R(1, 40320) * pow(TmX, 4) * pow(X, 4)};
            break;
        default:
            throw ValidationError("transcribed_jump_quadrature: tables exist for orders 2, 4, 6 and 8 only");
    }
    return q;
}

JumpQuadrature printed_h4_literal() {
    auto q = transcribed_jump_quadrature(4);
    const auto T = BivariatePoly::dt();
    const auto X = BivariatePoly::cross();
    q.coeffs[1] = Rational(1, 12) * pow(X, 2) * poly({{{2, 0, 1, 1}}, {{1, 1, -6, 1}}, {{0, 2, 6, 1}}});
    q.coeffs[3] = Rational(1, 24) * pow(X, 2) * (T - X);
    return q;
}

cplx smooth_step(const HermiteRule& rule, std::span<const cplx> left, std::span<const cplx> right, double dt) {
    const int s = rule.stages();
    if (static_cast<int>(left.size()) != s || static_cast<int>(right.size()) != s) {
        throw ValidationError("smooth_step: derivative stacks must have " + std::to_string(s) + " entries");
    }
    if (!(dt > 0.0)) throw ValidationError("smooth_step: dt must be positive");
    const auto w = rule.weights_double();
    cplx acc{};
    double p = dt;
    for (int d = 0; d < s; ++d) {
        const auto ud = static_cast<std::size_t>(d);
        const double sign = d % 2 == 0 ? 1.0 : -1.0;
        acc += w[ud] * p * (left[ud] + sign * right[ud]);
        p *= dt;
    }
    return acc;
}

cplx jump_correction(const JumpQuadrature& quad, double dt_cross, double dt, std::span<const cplx> jumps) {
    if (static_cast<int>(jumps.size()) != quad.order) {
        throw ValidationError("jump_correction: expected " + std::to_string(quad.order) + " jumps");
    }
    if (dt_cross < 0.0 || dt_cross > dt) throw ValidationError("jump_correction: dt_cross outside [0, dt]");
    cplx acc{};
    for (std::size_t d = 0; d < jumps.size(); ++d) acc += quad.coeffs[d].evaluate(dt, dt_cross) * jumps[d];
    return acc;
}

cplx integrate_discontinuous(const StackProvider& provider, const StackProvider& jump_provider, double a, double b,
                             std::span<const double> crossings, int steps, int order, bool jump_corrections) {
    if (steps < 1) throw ValidationError("integrate_discontinuous: steps must be >= 1");
    if (!(b > a)) throw ValidationError("integrate_discontinuous: empty interval");
    for (double c : crossings) {
        if (!(c > a && c < b)) throw ValidationError("integrate_discontinuous: crossing outside (a, b)");
    }
    if (!std::is_sorted(crossings.begin(), crossings.end())) {
        throw ValidationError("integrate_discontinuous: crossings must be sorted");
    }
    const HermiteRule rule = hermite_rule(order);
    const JumpQuadrature& quad = jump_quadrature(order);
    const int s = rule.stages();
    const double dt = (b - a) / steps;
    cplx total{};
    std::size_t next = 0;
    std::vector<cplx> left = provider(a, s);
    for (int n = 0; n < steps; ++n) {
        const double ta = a + n * dt;
        const double tb = n + 1 == steps ? b : a + (n + 1) * dt;
        std::vector<cplx> right = provider(tb, s);
        total += smooth_step(rule, left, right, tb - ta);
        int in_step = 0;
        while (next < crossings.size() && crossings[next] < tb) {
            if (++in_step > 1) throw ValidationError("integrate_discontinuous: more than one crossing in a step");
            if (jump_corrections) {
                const double x = std::max(crossings[next] - ta, 0.0);
                total += jump_correction(quad, x, tb - ta, jump_provider(crossings[next], order));
            }
            ++next;
        }
        left = std::move(right);
    }
    return total;
}

std::vector<double> legendre_stack(double t, int count, bool positive_branch) {
    /// P5 = (63 t^5 - 70 t^3 + 15 t) / 8
    const std::array<double, 6> p5 = {0.0, 15.0 / 8.0, 0.0, -70.0 / 8.0, 0.0, 63.0 / 8.0};
    auto poly_deriv = [](std::span<const double> c, int k, double x) {
        double acc = 0.0;
        for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
            acc = acc * x + c[static_cast<std::size_t>(i)] * factorial(i) / factorial(i - k);
        }
        return acc;
    };
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int d = 0; d < count; ++d) {
        double v = poly_deriv(p5, d, t);
        if (!positive_branch) {
            /// Q5 = P5 atanh(t) - (63 t^4 / 8 - 49 t^2 / 8 + 8 / 15)
            const std::array<double, 5> w = {8.0 / 15.0, 0.0, -49.0 / 8.0, 0.0, 63.0 / 8.0};
            double q = 0.0;
            for (int j = 0; j <= d; ++j) {
                double at = 0.0;
                const int k = d - j;
                if (k == 0) {
                    at = std::atanh(t);
                } else {
                    at = 0.5 * factorial(k - 1) *
                         ((k % 2 == 1 ? 1.0 : -1.0) / std::pow(1.0 + t, k) + 1.0 / std::pow(1.0 - t, k));
                }
                q += binomial(d, j) * poly_deriv(p5, j, t) * at;
            }
            v = q - poly_deriv(w, d, t);
        }
        out[static_cast<std::size_t>(d)] = v;
    }
    return out;
}

std::vector<Rational> legendre_jumps() {
    const std::array<Rational, 6> p5 = {0, Rational(15, 8), 0, Rational(-70, 8), 0, Rational(63, 8)};
    const std::array<Rational, 5> w = {Rational(8, 15), 0, Rational(-49, 8), 0, Rational(63, 8)};
    auto p5d = [&](int k) -> Rational { return k < 6 ? p5[static_cast<std::size_t>(k)] * rfact(k) : Rational(0); };
    auto wd = [&](int k) -> Rational { return k < 5 ? w[static_cast<std::size_t>(k)] * rfact(k) : Rational(0); };
    /// atanh^(k)(0) = (k-1)! for odd k, 0 otherwise
    auto atd = [&](int k) -> Rational { return k % 2 == 1 ? rfact(k - 1) : Rational(0); };
    std::vector<Rational> out;
    for (int d = 0; d < 12; ++d) {
        Rational q = 0;
        for (int j = 0; j <= d; ++j) {
            q += Rational(static_cast<long>(binomial(d, j))) * p5d(j) * atd(d - j);
        }
        q -= wd(d);
        out.push_back(p5d(d) - q);
    }
    return out;
}

QuadResult legendre_benchmark(int order, int steps, bool jump_corrections) {
    const double a = -0.55;
    const double b = 0.45;
    const StackProvider f = [](double t, int count) {
        const auto v = legendre_stack(t, count, t > 0.0);
        return std::vector<cplx>(v.begin(), v.end());
    };
    const auto jr = legendre_jumps();
    const StackProvider jumps = [&](double, int count) {
        std::vector<cplx> j;
        for (int d = 0; d < count; ++d) j.emplace_back(static_cast<double>(jr[static_cast<std::size_t>(d)]));
        return j;
    };
    const std::array<double, 1> crossing = {0.0};
    const double value = integrate_discontinuous(f, jumps, a, b, crossing, steps, order, jump_corrections).real();
    return {value, std::abs(value - kLegendreReference)};
}

namespace {

Extended to_extended(const Rational& r) {
    return Extended(boost::multiprecision::numerator(r)) / Extended(boost::multiprecision::denominator(r));
}

/// Derivatives 0..count-1 of P5 or Q5 in Extended arithmetic.
std::vector<Extended> legendre_stack_extended(const Extended& t, int count, bool positive_branch) {
    const std::array<Rational, 6> p5 = {0, Rational(15, 8), 0, Rational(-70, 8), 0, Rational(63, 8)};
    const std::array<Rational, 5> w = {Rational(8, 15), 0, Rational(-49, 8), 0, Rational(63, 8)};
    auto poly_deriv = [&t](std::span<const Rational> c, int k) {
        Extended acc = 0;
        for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
            acc = acc * t + to_extended(c[static_cast<std::size_t>(i)]) * Extended(factorial(i) / factorial(i - k));
        }
        return acc;
    };
    std::vector<Extended> out(static_cast<std::size_t>(count));
    for (int d = 0; d < count; ++d) {
        Extended v = poly_deriv(p5, d);
        if (!positive_branch) {
            Extended q = 0;
            for (int j = 0; j <= d; ++j) {
                const int k = d - j;
                Extended at;
                if (k == 0) {
                    at = log((1 + t) / (1 - t)) / 2;
                } else {
                    at = Extended(factorial(k - 1)) / 2 *
                         ((k % 2 == 1 ? 1 : -1) / pow(1 + t, k) + 1 / pow(1 - t, k));
                }
                q += Extended(binomial(d, j)) * poly_deriv(p5, j) * at;
            }
            v = q - poly_deriv(w, d);
        }
        out[static_cast<std::size_t>(d)] = v;
    }
    return out;
}

}  // namespace

ExtendedQuadResult legendre_benchmark_extended(int order, int steps, bool jump_corrections) {
    if (steps < 1) throw ValidationError("legendre_benchmark_extended: steps must be >= 1");
    const HermiteRule rule = hermite_rule(order);
    const JumpQuadrature& quad = jump_quadrature(order);
    const int s = rule.stages();
    const Extended a("-0.55");
    const Extended dt = Extended(1) / steps;
    const auto jr = legendre_jumps();

    Extended total = 0;
    auto left = legendre_stack_extended(a, s, false);
    for (int n = 0; n < steps; ++n) {
        const Extended ta = a + n * dt;
        const Extended tb = a + (n + 1) * dt;
        const auto right = legendre_stack_extended(tb, s, tb > 0);
        Extended p = dt;
        for (int d = 0; d < s; ++d) {
            const auto ud = static_cast<std::size_t>(d);
            total += to_extended(rule.weights[ud]) * p * (d % 2 == 0 ? left[ud] + right[ud] : left[ud] - right[ud]);
            p *= dt;
        }
        if (jump_corrections && ta <= 0 && tb > 0) {
            const Extended x = -ta;
            for (int d = 0; d < order; ++d) {
                Extended c = 0;
                for (const auto& [pq, coef] : quad.coeffs[static_cast<std::size_t>(d)].terms()) {
                    c += to_extended(coef) * pow(dt, pq.first) * pow(x, pq.second);
                }
                total += c * to_extended(jr[static_cast<std::size_t>(d)]);
            }
        }
        left = right;
    }
    return {total, abs(total - Extended(kLegendreReferenceDigits))};
}

}  // namespace discotex
