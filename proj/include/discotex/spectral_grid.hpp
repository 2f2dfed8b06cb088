#pragma once

#include <Eigen/Dense>
#include <vector>

namespace discotex {

/// Chebyshev-Gauss-Lobatto collocation grid on [0,1] with dense differentiation matrices.
///
/// Nodes are ascending: nodes[0] = 0, nodes[n] = 1.
struct CollocationGrid {
    int n = 0;
    std::vector<double> nodes;
    Eigen::MatrixXd d1;
    Eigen::MatrixXd d2;

    [[nodiscard]] int size() const { return n + 1; }
};

/// Build the grid with n+1 nodes. Throws ValidationError for n < 1.
[[nodiscard]] CollocationGrid build_grid(int n);

/// D^(order) * field, order in {1, 2}.
[[nodiscard]] Eigen::VectorXcd apply_derivative(const CollocationGrid& grid, int order,
                                                const Eigen::VectorXcd& field);

}  // namespace discotex
