#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace discotex {

using cplx = std::complex<double>;

/// Truncated Taylor series in a scalar offset h about an expansion point.
///
/// Coefficient k holds f^(k)/k!. Binary operations truncate to the shorter operand.
class Jet {
public:
    Jet() = default;
    explicit Jet(int length) : c_(static_cast<std::size_t>(length), cplx{0.0, 0.0}) {}
    explicit Jet(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {}

    [[nodiscard]] static Jet constant(cplx value, int length);
    /// value + h
    [[nodiscard]] static Jet variable(double value, int length);

    [[nodiscard]] int size() const { return static_cast<int>(c_.size()); }
    [[nodiscard]] cplx& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] const cplx& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] std::span<const cplx> coeffs() const { return c_; }

    [[nodiscard]] cplx value() const { return c_.empty() ? cplx{} : c_[0]; }
    /// k-th derivative at the expansion point (zero past the truncation).
    [[nodiscard]] cplx derivative(int k) const;
    /// Series of d/dh, one coefficient shorter.
    [[nodiscard]] Jet differentiate() const;
    [[nodiscard]] Jet truncated(int length) const;
    [[nodiscard]] cplx evaluate(double h) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(cplx s);

private:
    std::vector<cplx> c_;
};

[[nodiscard]] Jet operator+(const Jet& a, const Jet& b);
[[nodiscard]] Jet operator-(const Jet& a, const Jet& b);
[[nodiscard]] Jet operator-(const Jet& a);
[[nodiscard]] Jet operator*(const Jet& a, const Jet& b);
[[nodiscard]] Jet operator*(cplx s, const Jet& a);
[[nodiscard]] Jet operator*(const Jet& a, cplx s);

[[nodiscard]] Jet reciprocal(const Jet& a);

/// sum_k derivs[k]/k! * delta^k, where delta has zero constant term.
[[nodiscard]] Jet compose(std::span<const double> derivs, const Jet& delta);

/// (cos x, sin x) for a jet with real coefficients.
[[nodiscard]] std::pair<Jet, Jet> cos_sin(const Jet& x);

[[nodiscard]] double factorial(int k);
[[nodiscard]] double binomial(int n, int k);

}  // namespace discotex
