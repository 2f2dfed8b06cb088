#include "discotex/disco_collocation.hpp"

#include "discotex/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace discotex {

namespace {

std::atomic<std::uint64_t> g_node_coincidences{0};

/// Jets of d^k f/dsigma^k evaluated along xi(tau), k = 0..kmax.
std::vector<Jet> coefficient_jets(const CoefficientFn& f, const Jet& xi, int kmax, int length) {
    const double x0 = xi.value().real();
    Jet delta = xi.truncated(length);
    delta[0] = 0.0;
    std::vector<Jet> out;
    out.reserve(static_cast<std::size_t>(kmax + 1));
    std::vector<double> derivs(static_cast<std::size_t>(length));
    for (int k = 0; k <= kmax; ++k) {
        for (int j = 0; j < length; ++j) derivs[static_cast<std::size_t>(j)] = f(k + j, x0);
        out.push_back(compose(derivs, delta));
    }
    return out;
}

/// Partial Bell polynomials B_{n,r}(x_1..x_{n-r+1}) for n, r <= kmax.
std::vector<std::vector<cplx>> partial_bell(const std::vector<cplx>& x, int kmax) {
    std::vector<std::vector<cplx>> b(static_cast<std::size_t>(kmax + 1),
                                     std::vector<cplx>(static_cast<std::size_t>(kmax + 1), cplx{}));
    b[0][0] = 1.0;
    for (int n = 1; n <= kmax; ++n) {
        for (int r = 1; r <= n; ++r) {
            cplx acc{};
            for (int i = 1; i <= n - r + 1; ++i) {
                acc += binomial(n - 1, i - 1) * x[static_cast<std::size_t>(i)] *
                       b[static_cast<std::size_t>(n - i)][static_cast<std::size_t>(r - 1)];
            }
            b[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)] = acc;
        }
    }
    return b;
}

void check_particle(const CollocationGrid& grid, double x0) {
    if (!(x0 > 0.0 && x0 < 1.0)) {
        throw ValidationError("particle position " + std::to_string(x0) + " is not strictly inside (0,1)");
    }
    if (std::find(grid.nodes.begin(), grid.nodes.end(), x0) != grid.nodes.end()) {
        g_node_coincidences.fetch_add(1, std::memory_order_relaxed);
    }
}

}  // namespace

cplx TrigPair::evaluate(double tau) const { return cos_amp * std::cos(tau) + sin_amp * std::sin(tau); }

Jet TrigPair::compose(const Jet& phase) const {
    auto [c, s] = cos_sin(phase);
    return cos_amp * c + sin_amp * s;
}

TrigPair operator+(const TrigPair& a, const TrigPair& b) { return {a.cos_amp + b.cos_amp, a.sin_amp + b.sin_amp}; }
TrigPair operator-(const TrigPair& a, const TrigPair& b) { return {a.cos_amp - b.cos_amp, a.sin_amp - b.sin_amp}; }
TrigPair operator*(cplx s, const TrigPair& a) { return {s * a.cos_amp, s * a.sin_amp}; }

JumpSeries jump_recurrence(const Jet& j0, const Jet& j1, const RecurrenceCoefficients& coeffs, const Jet& xi,
                           int m_max) {
    if (m_max < 1) throw ValidationError("jump_recurrence: m_max must be >= 1");
    const int length = std::min({j0.size(), j1.size(), xi.size()});
    if (length < m_max + 1) {
        throw ValidationError("jump_recurrence: jets of length " + std::to_string(length) +
                              " cannot carry " + std::to_string(m_max) + " recurrence levels");
    }
    const int kmax = std::min(m_max, coeffs.max_derivative);
    const auto G = coefficient_jets(coeffs.gamma, xi, kmax, length);
    const auto E = coefficient_jets(coeffs.epsilon, xi, kmax, length);
    const auto R = coefficient_jets(coeffs.rho, xi, kmax, length);
    const auto C = coefficient_jets(coeffs.chi, xi, kmax, length);
    const auto I = coefficient_jets(coeffs.iota, xi, kmax, length);

    const Jet xd = xi.truncated(length).differentiate();
    const Jet xdd = xd.differentiate();
    const Jet xd2 = xd * xd;

    JumpSeries out;
    out.entries = {j0.truncated(length), j1.truncated(length)};
    std::vector<Jet> lead;
    lead.reserve(static_cast<std::size_t>(kmax + 1));
    for (int k = 0; k <= kmax; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        lead.push_back(G[uk] * xd2 - E[uk] * xd + C[uk]);
    }
    const double scale = std::abs(G[0].value()) + std::abs(E[0].value()) + std::abs(C[0].value());
    if (std::abs(lead[0].value()) <= 1e-14 * std::max(scale, 1.0)) {
        throw NumericalError("jump_recurrence: leading factor vanishes (degenerate characteristic) at m = 0");
    }
    const Jet inv_lead = reciprocal(lead[0]);

    for (int m = 0; m + 2 <= m_max; ++m) {
        const auto& Jm = out.entries;
        Jet acc(std::min(Jm[static_cast<std::size_t>(m)].size() - 2, Jm[static_cast<std::size_t>(m + 1)].size() - 1));
        for (int k = 0; k <= std::min(m, kmax); ++k) {
            const auto uk = static_cast<std::size_t>(k);
            const Jet& a = Jm[static_cast<std::size_t>(m - k)];
            const Jet& b = Jm[static_cast<std::size_t>(m - k + 1)];
            const Jet ad = a.differentiate();
            const Jet bd = b.differentiate();
            Jet t = G[uk] * (ad.differentiate() - xdd * b - cplx{2.0, 0.0} * (xd * bd));
            t += E[uk] * bd;
            t += R[uk] * (ad - xd * b);
            t += I[uk] * b;
            if (k >= 1) t += lead[uk] * Jm[static_cast<std::size_t>(m - k + 2)];
            acc += binomial(m, k) * t;
        }
        out.entries.push_back(-(acc * inv_lead));
    }
    return out;
}

JumpSeries pi_series(const JumpSeries& psi, const Jet& xi) {
    JumpSeries out;
    const Jet xd = xi.differentiate();
    for (int m = 0; m < psi.m_max(); ++m) {
        const Jet& a = psi.entries[static_cast<std::size_t>(m)];
        const Jet& b = psi.entries[static_cast<std::size_t>(m + 1)];
        out.entries.push_back((a.differentiate() - xd * b).truncated(b.size() - 1));
    }
    return out;
}

cplx g_value(const JumpSeries& series, double w) {
    cplx acc{};
    for (int m = series.m_max(); m >= 0; --m) {
        acc = acc * w / static_cast<double>(m + 1) + series.entries[static_cast<std::size_t>(m)].value();
    }
    return acc;
}

Jet g_jet(const JumpSeries& series, const Jet& xi, double sigma_j, int length) {
    Jet w = -xi.truncated(length);
    w[0] += sigma_j;
    Jet acc(length);
    for (int m = series.m_max(); m >= 0; --m) {
        acc = acc * w;
        acc *= 1.0 / static_cast<double>(m + 1);
        acc += series.entries[static_cast<std::size_t>(m)].truncated(length);
        if (acc.size() < length) {
            throw ValidationError("g_jet: jump entry " + std::to_string(m) + " too short for requested length");
        }
    }
    return acc;
}

cplx g_time_derivative(const JumpSeries& series, const Jet& xi, double w, int k) {
    if (k < 1 || k > 5) throw ValidationError("g_time_derivative: k must lie in 1..5");
    /// x_i = d^i w / dtau^i = -xi^(i)
    std::vector<cplx> x(static_cast<std::size_t>(k + 1));
    for (int i = 1; i <= k; ++i) x[static_cast<std::size_t>(i)] = -xi.derivative(i);
    const auto bell = partial_bell(x, k);

    cplx total{};
    for (int m = 0; m <= series.m_max(); ++m) {
        const Jet& Jm = series.entries[static_cast<std::size_t>(m)];
        if (Jm.size() <= k) {
            throw ValidationError("g_time_derivative: jump entry " + std::to_string(m) + " too short");
        }
        cplx term{};
        for (int j = 0; j <= k; ++j) {
            /// (w^m)^(j)
            cplx pw{};
            if (j == 0) {
                pw = std::pow(w, m);
            } else {
                for (int r = 1; r <= std::min(j, m); ++r) {
                    const double falling = factorial(m) / factorial(m - r);
                    pw += falling * std::pow(w, m - r) *
                          bell[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
                }
            }
            term += binomial(k, j) * Jm.derivative(k - j) * pw;
        }
        total += term / factorial(m);
    }
    return total;
}

double heaviside(double z) {
    if (z > 0.0) return 1.0;
    if (z < 0.0) return 0.0;
    return 0.5;
}

std::uint64_t node_coincidences() { return g_node_coincidences.load(std::memory_order_relaxed); }

cplx delta_correction(const CollocationGrid& grid, const JumpSeries& series, const Jet& xi, int i, int j,
                      int time_deriv) {
    if (i < 0 || j < 0 || i > grid.n || j > grid.n) throw ValidationError("delta_correction: node index out of range");
    if (time_deriv < 0 || time_deriv > 5) throw ValidationError("delta_correction: time_deriv must lie in 0..5");
    const double x0 = xi.value().real();
    check_particle(grid, x0);
    const double si = grid.nodes[static_cast<std::size_t>(i)];
    const double sj = grid.nodes[static_cast<std::size_t>(j)];
    const double theta = heaviside(si - x0) - heaviside(sj - x0);
    if (theta == 0.0) return {};
    const double w = sj - x0;
    const cplx g = time_deriv == 0 ? g_value(series, w) : g_time_derivative(series, xi, w, time_deriv);
    return theta * g;
}

Eigen::VectorXcd source_vector(const CollocationGrid& grid, const Eigen::VectorXd& coeff_row, int deriv_order,
                               const JumpSeries& series, const Jet& xi, int time_deriv) {
    const int N = grid.size();
    if (coeff_row.size() != N) throw ValidationError("source_vector: coefficient row length mismatch");
    if (deriv_order != 1 && deriv_order != 2) throw ValidationError("source_vector: deriv_order must be 1 or 2");
    if (time_deriv < 0 || time_deriv > 5) throw ValidationError("source_vector: time_deriv must lie in 0..5");
    const double x0 = xi.value().real();
    check_particle(grid, x0);

    Eigen::VectorXcd g(N);
    Eigen::VectorXd theta(N);
    for (int j = 0; j < N; ++j) {
        const double w = grid.nodes[static_cast<std::size_t>(j)] - x0;
        theta(j) = heaviside(w);
        g(j) = time_deriv == 0 ? g_value(series, w) : g_time_derivative(series, xi, w, time_deriv);
    }
    const Eigen::MatrixXd& D = deriv_order == 1 ? grid.d1 : grid.d2;
    const Eigen::VectorXcd Dg = D.cast<cplx>() * g;
    const Eigen::VectorXcd Dtg = D.cast<cplx>() * (theta.cast<cplx>().asDiagonal() * g);
    Eigen::VectorXcd out(N);
    for (int i = 0; i < N; ++i) out(i) = coeff_row(i) * (theta(i) * Dg(i) - Dtg(i));
    return out;
}

Eigen::MatrixXcd corrected_derivative_jets(const CollocationGrid& grid, int deriv_order, const JumpSeries& series,
                                           const Jet& xi, int length) {
    const int N = grid.size();
    const double x0 = xi.value().real();
    check_particle(grid, x0);
    Eigen::MatrixXcd G(N, length);
    Eigen::VectorXd theta(N);
    for (int j = 0; j < N; ++j) {
        const double sj = grid.nodes[static_cast<std::size_t>(j)];
        theta(j) = heaviside(sj - x0);
        const Jet gj = g_jet(series, xi, sj, length);
        for (int k = 0; k < length; ++k) G(j, k) = gj[k];
    }
    const Eigen::MatrixXd& D = deriv_order == 1 ? grid.d1 : grid.d2;
    const Eigen::MatrixXcd DG = D.cast<cplx>() * G;
    const Eigen::MatrixXcd DTG = D.cast<cplx>() * (theta.cast<cplx>().asDiagonal() * G);
    return theta.cast<cplx>().asDiagonal() * DG - DTG;
}

}  // namespace discotex
