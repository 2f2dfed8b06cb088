#include "discotex/jet.hpp"

#include "discotex/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace discotex {

namespace {

constexpr int kTableSize = 171;

const std::array<double, kTableSize>& factorial_table() {
    static const std::array<double, kTableSize> table = [] {
        std::array<double, kTableSize> t{};
        t[0] = 1.0;
        for (int k = 1; k < kTableSize; ++k) t[k] = t[k - 1] * k;
        return t;
    }();
    return table;
}

}  // namespace

double factorial(int k) {
    if (k < 0 || k >= kTableSize) throw ValidationError("factorial: argument out of range");
    return factorial_table()[static_cast<std::size_t>(k)];
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

Jet Jet::constant(cplx value, int length) {
    Jet j(length);
    if (length > 0) j[0] = value;
    return j;
}

Jet Jet::variable(double value, int length) {
    Jet j(length);
    if (length > 0) j[0] = value;
    if (length > 1) j[1] = 1.0;
    return j;
}

cplx Jet::derivative(int k) const {
    if (k < 0 || k >= size()) return {};
    return c_[static_cast<std::size_t>(k)] * factorial(k);
}

Jet Jet::differentiate() const {
    if (size() <= 1) return Jet(0);
    Jet d(size() - 1);
    for (int k = 0; k + 1 < size(); ++k) d[k] = (*this)[k + 1] * static_cast<double>(k + 1);
    return d;
}

Jet Jet::truncated(int length) const {
    Jet t(std::min(length, size()));
    for (int k = 0; k < t.size(); ++k) t[k] = (*this)[k];
    return t;
}

cplx Jet::evaluate(double h) const {
    cplx r{};
    for (int k = size() - 1; k >= 0; --k) r = r * h + (*this)[k];
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    c_.resize(std::min(c_.size(), o.c_.size()));
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    c_.resize(std::min(c_.size(), o.c_.size()));
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet& Jet::operator*=(cplx s) {
    for (auto& x : c_) x *= s;
    return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
    Jet r = a;
    r += b;
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet r = a;
    r -= b;
    return r;
}

Jet operator-(const Jet& a) { return cplx{-1.0, 0.0} * a; }

Jet operator*(const Jet& a, const Jet& b) {
    const int n = std::min(a.size(), b.size());
    Jet r(n);
    for (int k = 0; k < n; ++k) {
        cplx acc{};
        for (int i = 0; i <= k; ++i) acc += a[i] * b[k - i];
        r[k] = acc;
    }
    return r;
}

Jet operator*(cplx s, const Jet& a) {
    Jet r = a;
    r *= s;
    return r;
}

Jet operator*(const Jet& a, cplx s) { return s * a; }

Jet reciprocal(const Jet& a) {
    if (a.size() == 0) return a;
    if (a[0] == cplx{}) throw NumericalError("reciprocal: jet has zero constant term");
    Jet r(a.size());
    r[0] = 1.0 / a[0];
    for (int k = 1; k < a.size(); ++k) {
        cplx acc{};
        for (int j = 1; j <= k; ++j) acc += a[j] * r[k - j];
        r[k] = -acc / a[0];
    }
    return r;
}

Jet compose(std::span<const double> derivs, const Jet& delta) {
    const int n = delta.size();
    Jet r(n);
    if (derivs.empty()) return r;
    /// Horner in delta: (((d_K/K!) delta + d_{K-1}/(K-1)!) delta + ...)
    const int top = std::min(static_cast<int>(derivs.size()) - 1, n - 1);
    r = Jet::constant(derivs[static_cast<std::size_t>(top)] / factorial(top), n);
    for (int k = top - 1; k >= 0; --k) {
        r = r * delta;
        r[0] += derivs[static_cast<std::size_t>(k)] / factorial(k);
    }
    return r;
}

std::pair<Jet, Jet> cos_sin(const Jet& x) {
    const int n = x.size();
    if (n == 0) return {Jet(0), Jet(0)};
    const double x0 = x[0].real();
    Jet d = x;
    d[0] = 0.0;
    /// Series of cos and sin of the nilpotent part
    Jet cd = Jet::constant(1.0, n);
    Jet sd(n);
    Jet p = Jet::constant(1.0, n);
    for (int k = 1; k < n; ++k) {
        p = p * d;
        const double f = 1.0 / factorial(k);
        switch (k % 4) {
            case 0: cd += f * p; break;
            case 1: sd += f * p; break;
            case 2: cd -= f * p; break;
            default: sd -= f * p; break;
        }
    }
    const double c0 = std::cos(x0);
    const double s0 = std::sin(x0);
    return {c0 * cd - s0 * sd, s0 * cd + c0 * sd};
}

}  // namespace discotex
