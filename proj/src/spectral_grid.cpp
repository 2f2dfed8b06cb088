#include "discotex/spectral_grid.hpp"

#include "discotex/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace discotex {

CollocationGrid build_grid(int n) {
    if (n < 1) {
        throw ValidationError("build_grid: n must be >= 1, got " + std::to_string(n));
    }
    const int N = n + 1;
    const double h = std::numbers::pi / (2.0 * n);

    CollocationGrid g;
    g.n = n;
    g.nodes.resize(N);
    for (int k = 0; k < N; ++k) {
        const double s = std::sin(k * h);
        g.nodes[k] = s * s;
    }
    g.nodes[0] = 0.0;
    g.nodes[n] = 1.0;

    /// sigma_i - sigma_j as a product of sines, which keeps digits for close nodes
    auto diff = [&](int i, int j) { return std::sin((i + j) * h) * std::sin((i - j) * h); };
    auto c = [&](int k) { return (k == 0 || k == n) ? 2.0 : 1.0; };

    g.d1 = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            g.d1(i, j) = sign * c(i) / (c(j) * diff(i, j));
        }
        g.d1(i, i) = -g.d1.row(i).sum();
    }

    g.d2 = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            g.d2(i, j) = 2.0 * g.d1(i, j) * (g.d1(i, i) - 1.0 / diff(i, j));
        }
        g.d2(i, i) = -g.d2.row(i).sum();
    }
    return g;
}

Eigen::VectorXcd apply_derivative(const CollocationGrid& grid, int order, const Eigen::VectorXcd& field) {
    if (field.size() != grid.size()) {
        throw ValidationError("apply_derivative: field length " + std::to_string(field.size()) +
                              " does not match grid size " + std::to_string(grid.size()));
    }
    if (order == 1) return grid.d1.cast<std::complex<double>>() * field;
    if (order == 2) return grid.d2.cast<std::complex<double>>() * field;
    throw ValidationError("apply_derivative: order must be 1 or 2");
}

}  // namespace discotex
