#pragma once

#include "discotex/jet.hpp"
#include "discotex/spectral_grid.hpp"

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace discotex {

/// cos_amp * cos(tau) + sin_amp * sin(tau)
struct TrigPair {
    cplx cos_amp{};
    cplx sin_amp{};

    [[nodiscard]] cplx evaluate(double tau) const;
    [[nodiscard]] TrigPair derivative() const { return {sin_amp, -cos_amp}; }
    /// The pair composed with a phase jet tau_c(tau).
    [[nodiscard]] Jet compose(const Jet& phase) const;

    friend bool operator==(const TrigPair&, const TrigPair&) = default;
};

[[nodiscard]] TrigPair operator+(const TrigPair& a, const TrigPair& b);
[[nodiscard]] TrigPair operator-(const TrigPair& a, const TrigPair& b);
[[nodiscard]] TrigPair operator*(cplx s, const TrigPair& a);

/// Jumps J_m(tau) (or Pi jumps) as Taylor jets in tau about one instant, m = 0..m_max.
///
/// Entry m is generally shorter than entry 0 because each recurrence level consumes
/// two time derivatives.
struct JumpSeries {
    std::vector<Jet> entries;

    [[nodiscard]] int m_max() const { return static_cast<int>(entries.size()) - 1; }
};

/// d^k f / d sigma^k at sigma.
using CoefficientFn = std::function<double(int k, double sigma)>;

/// Coefficients of  Gamma u_tt + eps u_st + rho u_t + chi u_ss + iota u_s = 0.
struct RecurrenceCoefficients {
    CoefficientFn gamma, epsilon, rho, chi, iota;
    /// Derivatives above this order vanish identically (polynomial coefficients).
    int max_derivative = 64;
};

/// Build J_0..J_{m_max} from (J_0, J_1) along the particle path xi(tau).
///
/// Each J_{m+2} solves the m-th sigma-derivative of the field equation's jump.
/// Throws NumericalError if the leading factor xi'^2 Gamma - xi' eps + chi vanishes.
[[nodiscard]] JumpSeries jump_recurrence(const Jet& j0, const Jet& j1, const RecurrenceCoefficients& coeffs,
                                         const Jet& xi, int m_max);

/// Pi jumps from field jumps: P_m = d/dtau J_m - xi' J_{m+1}, m = 0..m_max-1.
[[nodiscard]] JumpSeries pi_series(const JumpSeries& psi, const Jet& xi);

/// sum_m J_m(tau0) w^m / m!
[[nodiscard]] cplx g_value(const JumpSeries& series, double w);

/// Jet in tau of g(sigma_j - xi(tau)).
[[nodiscard]] Jet g_jet(const JumpSeries& series, const Jet& xi, double sigma_j, int length);

/// k-th total tau-derivative of g(sigma_j - xi(tau)) at tau0, with w = sigma_j - xi(tau0).
///
/// Explicit Leibniz expansion over J_m^(k-j) (w^m)^(j); the powers are expanded with
/// partial Bell polynomials in the derivatives of w. k must lie in 1..5.
[[nodiscard]] cplx g_time_derivative(const JumpSeries& series, const Jet& xi, double w, int k);

/// Heaviside step with Theta(0) = 1/2.
[[nodiscard]] double heaviside(double z);

/// Number of times the particle was found exactly on a node.
[[nodiscard]] std::uint64_t node_coincidences();

/// [Theta(sigma_i - xi) - Theta(sigma_j - xi)] * g^(time_deriv)(sigma_j - xi)
[[nodiscard]] cplx delta_correction(const CollocationGrid& grid, const JumpSeries& series, const Jet& xi, int i,
                                    int j, int time_deriv);

/// coeff_row[i] * sum_j D^(deriv_order)_ij Delta_ij at time-derivative level time_deriv.
[[nodiscard]] Eigen::VectorXcd source_vector(const CollocationGrid& grid, const Eigen::VectorXd& coeff_row,
                                             int deriv_order, const JumpSeries& series, const Jet& xi,
                                             int time_deriv);

/// Corrected-derivative helper used by the stepper: for every column j the jet of
/// g(sigma_j - xi(tau)), then D^(order) applied to the Delta-weighted jets, per jet slot.
///
/// Returns a (n+1) x length matrix; column k holds sum_j D_ij Delta_ij at tau-Taylor slot k.
[[nodiscard]] Eigen::MatrixXcd corrected_derivative_jets(const CollocationGrid& grid, int deriv_order,
                                                         const JumpSeries& series, const Jet& xi, int length);

}  // namespace discotex
