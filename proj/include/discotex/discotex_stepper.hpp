#pragma once

#include "discotex/hermite_rules.hpp"
#include "discotex/spectral_grid.hpp"
#include "discotex/wave_model.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace discotex {

/// Field vector U = (Psi, Pi) at one time slice.
struct State {
    double tau = 0.0;
    Eigen::VectorXcd u;
};

/// Operators for one (L, dt, order): A = dt L, TEX(A), and the LU factorization of
/// Q(A) = I - c_0 A + c_1 A^2 - ...
struct StepOperators {
    int order = 0;
    double dt = 0.0;
    std::vector<double> weights;
    Eigen::MatrixXd a;
    Eigen::MatrixXd tex;
    Eigen::MatrixXd a_tex;
    Eigen::PartialPivLU<Eigen::MatrixXd> hfh;
    double q_condition = 0.0;
};

/// Even polynomial TEX(A) = sum_j t_j A^{2j}; returns t_0, t_1, ...
[[nodiscard]] std::vector<Rational> tex_coefficients(int order);

[[nodiscard]] StepOperators build_step_operators(const Eigen::MatrixXd& L, double dt, int order);

/// Scalar reduction P(z)/Q(z) of the order-2s step map for u' = lambda u, z = lambda dt.
[[nodiscard]] cplx scalar_step_map(int order, cplx z);

/// Diagonal (s, s) Pade approximant of exp(z).
[[nodiscard]] cplx pade_exp(int s, cplx z);

/// Source vectors s, s^(1), ..., s^(s-1) at one instant; the top (Psi) half is zero.
struct SourceStack {
    std::vector<Eigen::VectorXcd> derivs;
    double xi = 0.0;
};

/// Bottom block: -(chi_t corrected D2 + iota_t corrected D1 on the field jumps + eps_t corrected D1 on the Pi jumps).
[[nodiscard]] SourceStack assemble_sources(const CollocationGrid& grid, const Trajectory& traj, double tau,
                                           int order, int m_jumps);

/// Source stack from already assembled jump data (tau derivatives up to slots - 1).
[[nodiscard]] SourceStack sources_from_jumps(const CollocationGrid& grid, const JumpData& data, int slots);

struct Crossing {
    int node = 0;
    double tau = 0.0;
    /// Coordinate time t of the crossing, the argument of the time jumps.
    double t = 0.0;
    double dt_cross = 0.0;
    /// +1 when the node passes from the s < xi side to the s > xi side.
    int direction = 1;
};

/// Interior nodes whose crossing time lies in [tau_n, tau_n1), sorted by time.
[[nodiscard]] std::vector<Crossing> detect_crossings(const Trajectory& traj, const CollocationGrid& grid,
                                                     double tau_n, double tau_n1);

/// Which family supplies the Pi-row time jumps.
enum class TimeJumpSource {
    /// Jumps of tau-derivatives of the exact solution (T_{d+1} for Psi rows, T_{d+2} for Pi rows).
    exact,
    /// The printed v = 1/4 tables (field and calligraphic families).
    printed,
};

/// Jump of U itself at each crossed node: rows i and N+i.
[[nodiscard]] Eigen::VectorXcd upsilon_correction(const std::vector<Crossing>& crossings, int nodes, double v);

/// Hermite jump corrections for the integrand U' at each crossed node.
[[nodiscard]] Eigen::VectorXcd time_jump_correction(int order, const std::vector<Crossing>& crossings, int nodes,
                                                    double dt, double v,
                                                    TimeJumpSource source = TimeJumpSource::exact);

/// U_{n+1} = U_n + Q^{-1} [A TEX U_n + sum_k A^k y_k + crossing_terms]
///   with y_k = sum_j c_{j+k} dt^{j+1} (s_n^(j) + (-1)^{j+k} s_{n+1}^(j)).
[[nodiscard]] State step(const State& state, const StepOperators& ops, const SourceStack& s_n,
                         const SourceStack& s_n1, const Eigen::VectorXcd& crossing_terms);

struct StepperConfig {
    int order = 6;
    int n = 45;
    int m_jumps = 19;
    double dt = 0.00666667;
    double tau_start = -1.52;
    double tau_end = 4.50;
    double velocity = 0.25;
    TimeJumpSource time_jumps = TimeJumpSource::exact;
    bool jump_corrections = true;
    bool keep_history = false;
    std::optional<double> snapshot_tau;
};

/// Every violated constraint, empty when the config is usable.
[[nodiscard]] std::vector<std::string> validate(const StepperConfig& config);

/// Number of steps: round(span / dt); the effective step is span / steps.
[[nodiscard]] int step_count(const StepperConfig& config);

struct RunArtifacts {
    std::vector<double> tau;
    std::vector<cplx> psi_f;
    std::vector<cplx> pi_f;
    std::vector<double> eta;
    std::vector<State> history;
    std::optional<State> snapshot;
    State final_state;
    double dt_effective = 0.0;
    int steps = 0;
    double wall_seconds = 0.0;

    [[nodiscard]] double eta_final() const { return eta.empty() ? 0.0 : eta.back(); }
};

/// Relative error |1 - numerical / exact|.
[[nodiscard]] double relative_error(cplx numerical, cplx exact);

/// Runs the DiscoTEX evolution; extraction at the last grid node (s = 1).
[[nodiscard]] RunArtifacts evolve(const StepperConfig& config);

}  // namespace discotex
