#include "discotex/wave_model.hpp"

#include "discotex/errors.hpp"

#include <cmath>
#include <string>

namespace discotex {

namespace {

/// k-th derivative of sum_i c[i] s^i
template <std::size_t N>
double poly_derivative(const std::array<double, N>& c, int k, double s) {
    double acc = 0.0;
    for (int i = static_cast<int>(N) - 1; i >= k; --i) acc = acc * s + c[static_cast<std::size_t>(i)] * factorial(i) / factorial(i - k);
    return acc;
}

/// k-th derivative of 1/(s+1)
double inv1p_derivative(int k, double s) {
    return (k % 2 == 0 ? 1.0 : -1.0) * factorial(k) / std::pow(s + 1.0, k + 1);
}

double d_inv(int k, double s) { return (k % 2 == 0 ? 1.0 : -1.0) * factorial(k) / std::pow(s, k + 1); }
double d_log1m(int k, double s) { return k == 0 ? std::log1p(-s) : -factorial(k - 1) / std::pow(1.0 - s, k); }
double d_log(int k, double s) { return k == 0 ? std::log(s) : (k % 2 == 1 ? 1.0 : -1.0) * factorial(k - 1) / std::pow(s, k); }
double d_height(int k, double s) { return 0.5 * (d_log1m(k, s) - d_inv(k, s) + d_log(k, s)); }

Rational rpow(const Rational& x, int k) {
    Rational r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

RationalTrigPair rt(long long cr, long long ci, long long sr, long long si, long long den) {
    return {Rational(cr) / den, Rational(ci) / den, Rational(sr) / den, Rational(si) / den};
}

RationalTrigPair scaled(const Rational& f, const RationalTrigPair& p) {
    return {f * p.cos_re, f * p.cos_im, f * p.sin_re, f * p.sin_im};
}

}  // namespace

namespace coefficients {

/// Gamma = -4 s^2 (s^2 - 1)
double gamma(int k, double s) { return poly_derivative(std::array<double, 5>{0, 0, 4, 0, -4}, k, s); }
/// eps = -4 (s - 1) s^2 (2 s^2 - 1)
double epsilon(int k, double s) { return poly_derivative(std::array<double, 6>{0, 0, -4, 4, 8, -8}, k, s); }
/// rho = -8 (s - 1) s^3
double rho(int k, double s) { return poly_derivative(std::array<double, 5>{0, 0, 0, 8, -8}, k, s); }
/// chi = -4 (s - 1)^2 s^4
double chi(int k, double s) { return poly_derivative(std::array<double, 7>{0, 0, 0, 0, -4, 8, -4}, k, s); }
/// iota = -4 (s - 1) s^3 (3 s - 2)
double iota(int k, double s) { return poly_derivative(std::array<double, 6>{0, 0, 0, -8, 20, -12}, k, s); }

/// (2 s^2 - 1)/(s + 1) = 2 s - 2 + 1/(s + 1)
double epsilon_t(int k, double s) { return poly_derivative(std::array<double, 2>{-2, 2}, k, s) + inv1p_derivative(k, s); }
/// 2 s/(s + 1) = 2 - 2/(s + 1)
double rho_t(int k, double s) { return poly_derivative(std::array<double, 1>{2}, k, s) - 2.0 * inv1p_derivative(k, s); }
/// s^2 (s - 1)/(s + 1) = s^2 - 2 s + 2 - 2/(s + 1)
double chi_t(int k, double s) { return poly_derivative(std::array<double, 3>{2, -2, 1}, k, s) - 2.0 * inv1p_derivative(k, s); }
/// s (3 s - 2)/(s + 1) = 3 s - 5 + 5/(s + 1)
double iota_t(int k, double s) { return poly_derivative(std::array<double, 2>{-5, 3}, k, s) + 5.0 * inv1p_derivative(k, s); }

RecurrenceCoefficients recurrence() {
    RecurrenceCoefficients c;
    c.gamma = gamma;
    c.epsilon = epsilon;
    c.rho = rho;
    c.chi = chi;
    c.iota = iota;
    c.max_derivative = 6;
    return c;
}

}  // namespace coefficients

ChartPoint coordinate_map(double s) {
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("coordinate_map: s must lie strictly inside (0, 1)");
    const double l1 = std::log1p(-s);
    const double l0 = std::log(s);
    return {0.5 * (1.0 / s + l1 - l0), 0.5 * (l1 - 1.0 / s + l0)};
}

Trajectory::Trajectory(double v) : v_(v) {
    if (!(std::abs(v) < 1.0)) throw ValidationError("Trajectory: |v| must be < 1");
}

double Trajectory::phi_derivative(int k, double s) const {
    return 0.5 * ((1.0 - v_) * d_inv(k, s) + (1.0 + v_) * d_log1m(k, s) - (1.0 - v_) * d_log(k, s));
}

double Trajectory::position(double tau) const {
    /// phi(s) = x(s) + v H(s) decreases from +inf to -inf on (0, 1)
    const double target = v_ * tau;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi_derivative(0, mid) > target) lo = mid;
        else hi = mid;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        const double step = (phi_derivative(0, s) - target) / phi_derivative(1, s);
        if (s - step > 0.0 && s - step < 1.0) s -= step;
    }
    return s;
}

std::pair<Jet, Jet> Trajectory::jets(double tau, int length) const {
    const double x0 = position(tau);
    std::vector<double> dphi(static_cast<std::size_t>(length + 1));
    std::vector<double> dh(static_cast<std::size_t>(length + 1));
    for (int k = 0; k <= length; ++k) {
        dphi[static_cast<std::size_t>(k)] = phi_derivative(k, x0);
        dh[static_cast<std::size_t>(k)] = d_height(k, x0);
    }
    /// Series reversion of phi(x0 + delta) - phi(x0) = v h by fixed-point iteration
    std::vector<double> higher = dphi;
    higher[0] = 0.0;
    higher[1] = 0.0;
    Jet delta(length);
    for (int it = 0; it < length; ++it) {
        Jet next = compose(higher, delta);
        next *= -1.0 / dphi[1];
        if (length > 1) next[1] += v_ / dphi[1];
        next[0] = 0.0;
        delta = next;
    }
    Jet xi = delta;
    xi[0] = x0;
    Jet tc = -compose(dh, delta);
    tc[0] += tau;
    if (length > 1) tc[1] += 1.0;
    return {xi, tc};
}

std::optional<double> Trajectory::crossing_coordinate_time(double s) const {
    if (v_ == 0.0 || !(s > 0.0 && s < 1.0)) return std::nullopt;
    return coordinate_map(s).x / v_;
}

std::optional<double> Trajectory::crossing_time(double s) const {
    const auto t = crossing_coordinate_time(s);
    if (!t) return std::nullopt;
    return *t + coordinate_map(s).H;
}

std::pair<cplx, cplx> ExactSolution::minus(double tau, double s) const {
    const double a = 1.0 / (1.0 - v);
    const double th = a * (tau - std::log1p(-s));
    const cplx I{0.0, 1.0};
    const cplx psi = -0.5 * std::sin(th) + 0.5 * I * a * std::cos(th);
    const cplx pi = a * (-0.5 * std::cos(th) - 0.5 * I * a * std::sin(th));
    return {psi, pi};
}

std::pair<cplx, cplx> ExactSolution::plus(double tau, double s) const {
    const double b = 1.0 / (1.0 + v);
    const double th = b * (tau + 1.0 / s - std::log(s));
    const cplx I{0.0, 1.0};
    const cplx psi = -0.5 * std::sin(th) - 0.5 * I * b * std::cos(th);
    const cplx pi = b * (-0.5 * std::cos(th) + 0.5 * I * b * std::sin(th));
    return {psi, pi};
}

cplx ExactSolution::psi_tx(double t, double x) const {
    const double g2 = 1.0 / (1.0 - v * v);
    const double xp = v * t;
    const double th = g2 * (t - v * x - std::abs(x - xp));
    const double sgn = x > xp ? 1.0 : (x < xp ? -1.0 : 0.0);
    return -0.5 * std::sin(th) + cplx{0.0, 0.5 * g2 * (v + sgn)} * std::cos(th);
}

std::pair<cplx, cplx> exact_field(const Trajectory& traj, double tau, double s) {
    const ExactSolution ex{traj.v()};
    const double xi = traj.position(tau);
    if (s < xi) return ex.minus(tau, s);
    if (s > xi) return ex.plus(tau, s);
    const auto [pm, qm] = ex.minus(tau, s);
    const auto [pp, qp] = ex.plus(tau, s);
    return {0.5 * (pm + pp), 0.5 * (qm + qp)};
}

Eigen::VectorXcd exact_state(const CollocationGrid& grid, const Trajectory& traj, double tau) {
    const int N = grid.size();
    Eigen::VectorXcd u(2 * N);
    for (int i = 0; i < N; ++i) {
        const auto [psi, pi] = exact_field(traj, tau, grid.nodes[static_cast<std::size_t>(i)]);
        u(i) = psi;
        u(N + i) = pi;
    }
    return u;
}

Eigen::MatrixXd build_system_matrix(const CollocationGrid& grid) {
    const int N = grid.size();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    L.block(0, N, N, N) = Eigen::MatrixXd::Identity(N, N);
    for (int i = 0; i < N; ++i) {
        const double s = grid.nodes[static_cast<std::size_t>(i)];
        const double ct = coefficients::chi_t(0, s);
        const double it = coefficients::iota_t(0, s);
        const double et = coefficients::epsilon_t(0, s);
        L.block(N + i, 0, 1, N) = -(ct * grid.d2.row(i) + it * grid.d1.row(i));
        L.block(N + i, N, 1, N) = -et * grid.d1.row(i);
        L(N + i, N + i) -= coefficients::rho_t(0, s);
    }
    return L;
}

TrigPair RationalTrigPair::to_double() const {
    return {cplx{static_cast<double>(cos_re), static_cast<double>(cos_im)},
            cplx{static_cast<double>(sin_re), static_cast<double>(sin_im)}};
}

RationalTrigPair operator+(const RationalTrigPair& a, const RationalTrigPair& b) {
    return {a.cos_re + b.cos_re, a.cos_im + b.cos_im, a.sin_re + b.sin_re, a.sin_im + b.sin_im};
}

RationalTrigPair time_jump_rational(int k, const Rational& v) {
    if (k < 0) throw ValidationError("time_jump: k must be >= 0");
    const Rational a = 1 / (1 - v);
    const Rational b = 1 / (1 + v);
    /// T_k = A sin(t + k pi/2) + i B cos(t + k pi/2)
    const Rational A = -(rpow(b, k) - rpow(a, k)) / 2;
    const Rational B = -(rpow(b, k + 1) + rpow(a, k + 1)) / 2;
    switch (k % 4) {
        case 0: return {0, B, A, 0};
        case 1: return {A, 0, 0, -B};
        case 2: return {0, -B, -A, 0};
        default: return {-A, 0, 0, B};
    }
}

TrigPair time_jump(int k, double v) {
    if (k < 0) throw ValidationError("time_jump: k must be >= 0");
    const double a = 1.0 / (1.0 - v);
    const double b = 1.0 / (1.0 + v);
    const double A = -0.5 * (std::pow(b, k) - std::pow(a, k));
    const cplx B{0.0, -0.5 * (std::pow(b, k + 1) + std::pow(a, k + 1))};
    switch (k % 4) {
        case 0: return {B, A};
        case 1: return {A, -B};
        case 2: return {-B, -A};
        default: return {-A, B};
    }
}

const TimeJumpTable& printed_time_jump_table() {
    static const TimeJumpTable table = [] {
        TimeJumpTable t;
        t.field = {
            rt(4 * 15, 0, 0, 272, 225),
            rt(0, 4864, -128 * 15, 0, 3375),
            rt(-3136 * 15, 0, 0, -90368, 50625),
            rt(0, -1724416, 69632 * 15, 0, 759375),
            rt(1475584 * 15, 0, 0, 33492992, 11390625),
            rt(0, 657915904, -30507008 * 15, 0, 170859375),
            rt(-622084096LL * 15, 0, 0, -13014990848LL, 2562890625LL),
            rt(0, -258579890176LL, 12585009152LL * 15, 0, 38443359375LL),
            rt(253420109824LL * 15, 0, 0, 5150958682112LL, 576650390625LL),
            rt(0, 102771504185344LL, -5089041317888LL * 15, 0, 8649755859375LL),
            rt(-102028495814656LL * 15, 0, 0, -2052458050224128LL, 129746337890625LL),
            rt(0, -41013496602689536LL, 2043541949775872LL * 15, 0, 1946195068359375LL),
        };
        /// The field table above puts both parts over the larger denominator (ratio 15).
        t.pi = {
            rt(900, 4864, -1920, 4080, 3375),
            scaled(Rational(64), rt(-735, 1140, -450, 1412, 50625)),
            scaled(Rational(-64), rt(11025, 26944, -16320, 21180, 759375)),
            rt(22133760, -25866240, 15667200, 33492992, 11390625),
            scaled(Rational(1024), rt(324225, 642496, -446880, 490620, 170859375)),
            scaled(Rational(16384), rt(-569535, 602340, -418950, -794372, 2562890625LL)),
            scaled(Rational(16384), rt(8543025, 15782464, -11521920, 11915580, 38443359375LL)),
            rt(3801301647360LL, -3878698352640LL, 2831627059200LL, 5150958682112LL, 576650390625LL),
            scaled(Rational(262144), rt(217512225, 392042176, -291197280, 294740220, 8649755859375LL)),
            scaled(Rational(4194304), rt(-364882335, 367539540, -272997450, -489344132, 129746337890625LL)),
            scaled(Rational(-4194304), rt(5473235025LL, 9778379584LL, 7308275520LL, -7340161980LL, 1946195068359375LL)),
            rt(613597550959656960LL, -615202449040343040LL, 459796938699571200LL, 819841959232274432LL,
               29192926025390625LL),
        };
        return t;
    }();
    return table;
}

JumpData assemble_jump_data(const Trajectory& traj, double tau, int m_max, int slots) {
    if (m_max < 1) throw ValidationError("assemble_jump_data: m_max must be >= 1");
    if (slots < 1) throw ValidationError("assemble_jump_data: slots must be >= 1");
    const int length = m_max + slots + 2;
    auto [xi, tc] = traj.jets(tau, length);
    const double v = traj.v();
    const double a = 1.0 / (1.0 - v);
    const double b = 1.0 / (1.0 + v);
    const cplx I{0.0, 1.0};
    auto [c, s] = cos_sin(tc);

    const Jet one = Jet::constant(1.0, length);
    const Jet j0 = cplx{0.0, -traj.gamma2()} * c;
    /// d theta / ds on each side of the particle
    const Jet thl = -b * ((one + xi) * reciprocal(xi * xi));
    const Jet thr = a * reciprocal(one - xi);
    const Jet dplus = -0.5 * c + (0.5 * I * b) * s;
    const Jet dminus = -0.5 * c - (0.5 * I * a) * s;
    const Jet j1 = dplus * thl - dminus * thr;

    JumpData d;
    d.psi = jump_recurrence(j0, j1, coefficients::recurrence(), xi, m_max + 1);
    d.pi = pi_series(d.psi, xi);
    d.psi.entries.pop_back();
    d.xi = std::move(xi);
    d.tau_c = std::move(tc);
    return d;
}

cplx pi_row_jump(const JumpData& data, int m) {
    if (m < 0 || m + 2 > data.psi.m_max() || m + 1 > data.pi.m_max()) {
        throw ValidationError("pi_row_jump: jump series too short for m = " + std::to_string(m));
    }
    const double x0 = data.xi.value().real();
    cplx acc{};
    for (int k = 0; k <= m; ++k) {
        const auto J = [&](int i) { return data.psi.entries[static_cast<std::size_t>(i)].value(); };
        const auto P = [&](int i) { return data.pi.entries[static_cast<std::size_t>(i)].value(); };
        acc += binomial(m, k) * (coefficients::chi_t(k, x0) * J(m - k + 2) + coefficients::iota_t(k, x0) * J(m - k + 1) +
                                 coefficients::epsilon_t(k, x0) * P(m - k + 1) + coefficients::rho_t(k, x0) * P(m - k));
    }
    return -acc;
}

}  // namespace discotex
