#include "discotex/discotex_stepper.hpp"

#include "discotex/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>

namespace discotex {

namespace {

/// Exact time jumps T_{offset}, ..., T_{offset + count - 1} at coordinate time t.
std::vector<cplx> exact_jumps(double v, int offset, int count, double t, int direction) {
    std::vector<cplx> j;
    j.reserve(static_cast<std::size_t>(count));
    for (int d = 0; d < count; ++d) j.push_back(static_cast<double>(direction) * time_jump(offset + d, v).evaluate(t));
    return j;
}

}  // namespace

std::vector<Rational> tex_coefficients(int order) {
    const HermiteRule rule = hermite_rule(order);
    /// P - Q = 2 sum_{d even} c_d A^{d+1} = A TEX(A)
    std::vector<Rational> t;
    for (int d = 0; d < rule.stages(); d += 2) t.push_back(2 * rule.weights[static_cast<std::size_t>(d)]);
    return t;
}

StepOperators build_step_operators(const Eigen::MatrixXd& L, double dt, int order) {
    if (L.rows() != L.cols()) throw ValidationError("build_step_operators: L must be square");
    if (!(dt > 0.0)) throw ValidationError("build_step_operators: dt must be positive");
    const HermiteRule rule = hermite_rule(order);
    const int s = rule.stages();
    const auto n = L.rows();

    StepOperators ops;
    ops.order = order;
    ops.dt = dt;
    ops.weights = rule.weights_double();
    ops.a = dt * L;

    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Q = I;
    Eigen::MatrixXd Ak = I;
    for (int d = 0; d < s; ++d) {
        Ak = Ak * ops.a;
        Q += (d % 2 == 0 ? -1.0 : 1.0) * ops.weights[static_cast<std::size_t>(d)] * Ak;
    }
    const auto tc = tex_coefficients(order);
    const Eigen::MatrixXd A2 = ops.a * ops.a;
    ops.tex = Eigen::MatrixXd::Zero(n, n);
    for (auto it = tc.rbegin(); it != tc.rend(); ++it) ops.tex = ops.tex * A2 + static_cast<double>(*it) * I;
    ops.a_tex = ops.a * ops.tex;
    ops.hfh.compute(Q);
    const double rc = ops.hfh.rcond();
    ops.q_condition = rc > 0.0 ? 1.0 / rc : INFINITY;
    if (!(rc > 1e-15)) {
        throw NumericalError(fmt::format("build_step_operators: Q(A) is singular (condition estimate {:.3e})",
                                         ops.q_condition));
    }
    return ops;
}

cplx scalar_step_map(int order, cplx z) {
    const HermiteRule rule = hermite_rule(order);
    cplx p = 1.0;
    cplx q = 1.0;
    cplx zk = 1.0;
    for (int d = 0; d < rule.stages(); ++d) {
        zk *= z;
        const double c = static_cast<double>(rule.weights[static_cast<std::size_t>(d)]);
        p += c * zk;
        q += (d % 2 == 0 ? -1.0 : 1.0) * c * zk;
    }
    return p / q;
}

cplx pade_exp(int s, cplx z) {
    cplx num = 0.0;
    cplx den = 0.0;
    for (int j = s; j >= 0; --j) {
        const double p = factorial(2 * s - j) * factorial(s) / (factorial(2 * s) * factorial(j) * factorial(s - j));
        num = num * z + p;
        den = den * (-z) + p;
    }
    return num / den;
}

SourceStack sources_from_jumps(const CollocationGrid& grid, const JumpData& data, int slots) {
    const int N = grid.size();
    const Eigen::MatrixXcd d2g = corrected_derivative_jets(grid, 2, data.psi, data.xi, slots);
    const Eigen::MatrixXcd d1g = corrected_derivative_jets(grid, 1, data.psi, data.xi, slots);
    const Eigen::MatrixXcd d1p = corrected_derivative_jets(grid, 1, data.pi, data.xi, slots);
    SourceStack st;
    st.xi = data.xi.value().real();
    for (int k = 0; k < slots; ++k) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * N);
        const double f = factorial(k);
        for (int i = 0; i < N; ++i) {
            const double s = grid.nodes[static_cast<std::size_t>(i)];
            v(N + i) = -f * (coefficients::chi_t(0, s) * d2g(i, k) + coefficients::iota_t(0, s) * d1g(i, k) +
                             coefficients::epsilon_t(0, s) * d1p(i, k));
        }
        st.derivs.push_back(std::move(v));
    }
    return st;
}

SourceStack assemble_sources(const CollocationGrid& grid, const Trajectory& traj, double tau, int order,
                             int m_jumps) {
    const int slots = order / 2;
    return sources_from_jumps(grid, assemble_jump_data(traj, tau, m_jumps, slots), slots);
}

std::vector<Crossing> detect_crossings(const Trajectory& traj, const CollocationGrid& grid, double tau_n,
                                       double tau_n1) {
    std::vector<Crossing> out;
    const int direction = traj.v() > 0.0 ? 1 : -1;
    for (int i = 1; i < grid.n; ++i) {
        const double s = grid.nodes[static_cast<std::size_t>(i)];
        const auto ti = traj.crossing_time(s);
        if (!ti || *ti < tau_n || *ti >= tau_n1) continue;
        out.push_back({i, *ti, *traj.crossing_coordinate_time(s), *ti - tau_n, direction});
    }
    std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.tau < b.tau; });
    return out;
}

Eigen::VectorXcd upsilon_correction(const std::vector<Crossing>& crossings, int nodes, double v) {
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(2 * nodes);
    for (const auto& c : crossings) {
        const auto j = exact_jumps(v, 0, 2, c.t, c.direction);
        u(c.node) += j[0];
        u(nodes + c.node) += j[1];
    }
    return u;
}

Eigen::VectorXcd time_jump_correction(int order, const std::vector<Crossing>& crossings, int nodes, double dt,
                                      double v, TimeJumpSource source) {
    const JumpQuadrature& quad = jump_quadrature(order);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(2 * nodes);
    for (const auto& c : crossings) {
        const auto psi_rows = exact_jumps(v, 1, order, c.t, c.direction);
        std::vector<cplx> pi_rows;
        if (source == TimeJumpSource::exact) {
            pi_rows = exact_jumps(v, 2, order, c.t, c.direction);
        } else {
            const auto& table = printed_time_jump_table();
            for (int d = 0; d < order; ++d) {
                pi_rows.push_back(static_cast<double>(c.direction) *
                                  table.pi[static_cast<std::size_t>(d)].to_double().evaluate(c.t));
            }
        }
        u(c.node) += jump_correction(quad, c.dt_cross, dt, psi_rows);
        u(nodes + c.node) += jump_correction(quad, c.dt_cross, dt, pi_rows);
    }
    return u;
}

State step(const State& state, const StepOperators& ops, const SourceStack& s_n, const SourceStack& s_n1,
           const Eigen::VectorXcd& crossing_terms) {
    const int s = ops.order / 2;
    if (static_cast<int>(s_n.derivs.size()) < s || static_cast<int>(s_n1.derivs.size()) < s) {
        throw ValidationError("step: source stacks shallower than the rule requires");
    }
    const auto& c = ops.weights;
    Eigen::VectorXcd rhs = ops.a_tex.cast<cplx>() * state.u;
    /// Horner in A over y_{s-1}, ..., y_0
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(state.u.size());
    for (int k = s - 1; k >= 0; --k) {
        Eigen::VectorXcd y = Eigen::VectorXcd::Zero(state.u.size());
        double p = ops.dt;
        for (int j = 0; j + k < s; ++j) {
            const double sign = (j + k) % 2 == 0 ? 1.0 : -1.0;
            y += (c[static_cast<std::size_t>(j + k)] * p) *
                 (s_n.derivs[static_cast<std::size_t>(j)] + sign * s_n1.derivs[static_cast<std::size_t>(j)]);
            p *= ops.dt;
        }
        acc = (k == s - 1) ? y : Eigen::VectorXcd(ops.a.cast<cplx>() * acc + y);
    }
    rhs += acc + crossing_terms;
    State next;
    next.tau = state.tau + ops.dt;
    next.u = state.u + ops.hfh.solve(rhs.real()) + cplx{0.0, 1.0} * ops.hfh.solve(rhs.imag());
    if (!next.u.allFinite()) throw NumericalError(fmt::format("step: non-finite state at tau = {:.8f}", next.tau));
    return next;
}

std::vector<std::string> validate(const StepperConfig& config) {
    std::vector<std::string> errs;
    if (config.order < 2 || config.order > 12 || config.order % 2 != 0) {
        errs.push_back(fmt::format("order must be even and in [2, 12] (got {})", config.order));
    }
    if (!(config.dt > 0.0)) errs.push_back(fmt::format("dt must be positive (got {})", config.dt));
    if (config.n < 8) errs.push_back(fmt::format("nodes must be >= 8 (got {})", config.n));
    if (config.m_jumps < config.order) {
        errs.push_back(fmt::format("jumps must be >= order (got {} < {})", config.m_jumps, config.order));
    }
    if (!(config.tau_end >= config.tau_start)) errs.push_back("tau-end must not precede tau-start");
    if (!(std::abs(config.velocity) < 1.0)) errs.push_back(fmt::format("|velocity| must be < 1 (got {})", config.velocity));
    if (config.time_jumps == TimeJumpSource::printed && config.velocity != 0.25) {
        errs.push_back("printed time-jump tables exist only for velocity 0.25");
    }
    return errs;
}

int step_count(const StepperConfig& config) {
    return static_cast<int>(std::lround((config.tau_end - config.tau_start) / config.dt));
}

double relative_error(cplx numerical, cplx exact) { return std::abs(1.0 - numerical / exact); }

RunArtifacts evolve(const StepperConfig& config) {
    const auto errs = validate(config);
    if (!errs.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    const CollocationGrid grid = build_grid(config.n);
    const Trajectory traj(config.velocity);
    const int N = grid.size();
    RunArtifacts run;
    run.steps = step_count(config);
    run.dt_effective = run.steps > 0 ? (config.tau_end - config.tau_start) / run.steps : config.dt;

    State state{config.tau_start, exact_state(grid, traj, config.tau_start)};
    auto record = [&](const State& st) {
        run.tau.push_back(st.tau);
        run.psi_f.push_back(st.u(N - 1));
        run.pi_f.push_back(st.u(2 * N - 1));
        const cplx exact = exact_field(traj, st.tau, 1.0).first;
        run.eta.push_back(relative_error(st.u(N - 1), exact));
        if (config.keep_history) run.history.push_back(st);
        if (config.snapshot_tau && !run.snapshot &&
            st.tau >= *config.snapshot_tau - 0.5 * run.dt_effective) {
            run.snapshot = st;
        }
    };
    record(state);
    if (run.steps == 0) {
        run.final_state = state;
        return run;
    }

    const StepOperators ops = build_step_operators(build_system_matrix(grid), run.dt_effective, config.order);
    const auto t0 = std::chrono::steady_clock::now();
    SourceStack s_n = assemble_sources(grid, traj, state.tau, config.order, config.m_jumps);
    for (int k = 0; k < run.steps; ++k) {
        const double ta = config.tau_start + k * run.dt_effective;
        const double tb = config.tau_start + (k + 1) * run.dt_effective;
        SourceStack s_n1 = assemble_sources(grid, traj, tb, config.order, config.m_jumps);
        Eigen::VectorXcd extra = Eigen::VectorXcd::Zero(2 * N);
        const auto crossings = detect_crossings(traj, grid, ta, tb);
        if (!crossings.empty()) {
            extra += upsilon_correction(crossings, N, config.velocity);
            if (config.jump_corrections) {
                extra += time_jump_correction(config.order, crossings, N, run.dt_effective, config.velocity,
                                              config.time_jumps);
            }
        }
        state = step(state, ops, s_n, s_n1, extra);
        state.tau = tb;
        record(state);
        s_n = std::move(s_n1);
    }
    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.final_state = state;
    return run;
}

}  // namespace discotex
