#pragma once
#include <vector>
#include <stdexcept>

namespace twophase {

// Finite-difference weights on arbitrary nodes (Fornberg's recurrence).
// Returns w such that f^(m)(x0) ~= sum_i w[i] * f(nodes[i]).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m) {
    const int n = static_cast<int>(nodes.size());
    if (n < m + 1) throw std::invalid_argument("fd_weights: need at least m+1 nodes");
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        for (int j = 0; j < i; ++j) {
            double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            for (int k = std::min(i, m); k >= 1; --k)
                c[i][k] = c1 * (k * c[i - 1][k - 1] - (nodes[i - 1] - x0) * c[i - 1][k]) / c2;
            c[i][0] = -c1 * (nodes[i - 1] - x0) * c[i - 1][0] / c2;
            for (int k = std::min(i, m); k >= 1; --k)
                c[j][k] = ((nodes[i] - x0) * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = (nodes[i] - x0) * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

} // namespace twophase
