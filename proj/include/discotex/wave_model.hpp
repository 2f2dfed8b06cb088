#pragma once

#include "discotex/disco_collocation.hpp"
#include "discotex/hermite_rules.hpp"
#include "discotex/spectral_grid.hpp"

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>

namespace discotex {

/// Field-equation coefficients in the minimal-gauge chart:
///   Gamma Psi_tt + eps Psi_st + rho Psi_t + chi Psi_ss + iota Psi_s = 0.
///
/// Every function takes the derivative order k first.
namespace coefficients {

[[nodiscard]] double gamma(int k, double s);
[[nodiscard]] double epsilon(int k, double s);
[[nodiscard]] double rho(int k, double s);
[[nodiscard]] double chi(int k, double s);
[[nodiscard]] double iota(int k, double s);

/// Ratios to Gamma, in the form p(s) + r / (s + 1).
[[nodiscard]] double epsilon_t(int k, double s);
[[nodiscard]] double rho_t(int k, double s);
[[nodiscard]] double chi_t(int k, double s);
[[nodiscard]] double iota_t(int k, double s);

[[nodiscard]] RecurrenceCoefficients recurrence();

}  // namespace coefficients

struct ChartPoint {
    double x = 0.0;
    double H = 0.0;
};

/// Tortoise coordinate x(s) and height function H(s); s must lie strictly inside (0, 1).
[[nodiscard]] ChartPoint coordinate_map(double s);

/// Particle in uniform motion x_p = v t in the (t, x) chart, followed in (tau, s).
class Trajectory {
public:
    explicit Trajectory(double v);

    [[nodiscard]] double v() const { return v_; }
    [[nodiscard]] double gamma2() const { return 1.0 / (1.0 - v_ * v_); }

    /// Particle position xi_p(tau) in s.
    [[nodiscard]] double position(double tau) const;
    /// Jets of xi_p and of the coordinate time t = tau - H(xi_p) about tau.
    [[nodiscard]] std::pair<Jet, Jet> jets(double tau, int length) const;
    /// tau at which the particle passes node s; empty for v = 0.
    [[nodiscard]] std::optional<double> crossing_time(double s) const;
    /// Coordinate time t_i = x(s)/v of the same event (argument of the time jumps).
    [[nodiscard]] std::optional<double> crossing_coordinate_time(double s) const;

private:
    double v_;
    [[nodiscard]] double phi_derivative(int k, double s) const;
};

/// Exact solution branches: minus for s < xi_p (toward scri), plus for s > xi_p (toward the horizon).
struct ExactSolution {
    double v = 0.25;

    [[nodiscard]] std::pair<cplx, cplx> minus(double tau, double s) const;
    [[nodiscard]] std::pair<cplx, cplx> plus(double tau, double s) const;
    /// Psi(t, x) in the (t, x) chart.
    [[nodiscard]] cplx psi_tx(double t, double x) const;
};

/// (Psi, Pi) at one point, taking the side from the particle position; Theta(0) = 1/2 weighting on the particle.
[[nodiscard]] std::pair<cplx, cplx> exact_field(const Trajectory& traj, double tau, double s);

/// State vector [Psi_0..Psi_n, Pi_0..Pi_n] sampled from the exact solution.
[[nodiscard]] Eigen::VectorXcd exact_state(const CollocationGrid& grid, const Trajectory& traj, double tau);

/// L = [[0, I], [L1, L2]] with L1 = -(chi_t D2 + iota_t D1), L2 = -(eps_t D1 + rho_t I).
[[nodiscard]] Eigen::MatrixXd build_system_matrix(const CollocationGrid& grid);

/// Rational cos/sin amplitudes: (cos_re + i cos_im) cos t + (sin_re + i sin_im) sin t.
struct RationalTrigPair {
    Rational cos_re, cos_im, sin_re, sin_im;

    [[nodiscard]] TrigPair to_double() const;
    friend bool operator==(const RationalTrigPair&, const RationalTrigPair&) = default;
};

[[nodiscard]] RationalTrigPair operator+(const RationalTrigPair& a, const RationalTrigPair& b);

/// Jump of d^k Psi / dtau^k at a fixed node when the particle crosses it from the minus to
/// the plus side, as a function of the coordinate time of the crossing.
[[nodiscard]] TrigPair time_jump(int k, double v);
[[nodiscard]] RationalTrigPair time_jump_rational(int k, const Rational& v);

/// Printed time-jump tables for v = 1/4: field[d] (blackboard family), pi[d] (calligraphic family).
struct TimeJumpTable {
    std::array<RationalTrigPair, 12> field;
    std::array<RationalTrigPair, 12> pi;
};

[[nodiscard]] const TimeJumpTable& printed_time_jump_table();

/// Jump data along the worldline about one instant.
struct JumpData {
    Jet xi;
    Jet tau_c;
    JumpSeries psi;  // J_0..J_M
    JumpSeries pi;   // P_0..P_M
};

/// J_0 and J_1 from the exact solution, J_2.. from the recurrence, P_m from the Pi relation.
/// Jets carry `slots` Taylor coefficients for every entry.
[[nodiscard]] JumpData assemble_jump_data(const Trajectory& traj, double tau, int m_max, int slots);

/// m-th s-derivative jump of the Pi-row right-hand side,
/// -sum_k C(m,k) [chi_t^(k) J_{m-k+2} + iota_t^(k) J_{m-k+1} + eps_t^(k) P_{m-k+1} + rho_t^(k) P_{m-k}],
/// evaluated at the expansion instant.
[[nodiscard]] cplx pi_row_jump(const JumpData& data, int m);

}  // namespace discotex
