#pragma once
#include <vector>
#include <cmath>
#include <algorithm>
#include <stdexcept>

namespace twophase {

// Uniform nodes on [a,b], n intervals (n+1 nodes, endpoints included).
inline std::vector<double> uniform_grid(double a, double b, int n) {
    if (n < 1 || !(b > a)) throw std::invalid_argument("uniform_grid: bad arguments");
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) g[i] = a + (b - a) * i / n;
    g.back() = b;
    return g;
}

// Grid graded toward `b`: spacing shrinks like (1-s)^(p-1) near b.
// Useful when the solution has a boundary layer / reduced regularity at b.
inline std::vector<double> graded_grid(double a, double b, int n, double p) {
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) {
        double s = static_cast<double>(i) / n;
        g[i] = a + (b - a) * (1.0 - std::pow(1.0 - s, p));
    }
    g[0] = a; g.back() = b;
    return g;
}

// Boundary-layer grid on [a,b]: geometric growth from both ends (initial
// spacings h_a, h_b, ratio `growth`, spacing capped at h_max) with a uniform
// bridge in the middle. Guarantees strictly increasing nodes containing a,b.
inline std::vector<double> two_sided_grid(double a, double b, double h_a, double h_b,
                                          double h_max, double growth = 1.12) {
    if (!(b > a) || h_a <= 0 || h_b <= 0 || h_max <= 0 || growth <= 1.0)
        throw std::invalid_argument("two_sided_grid: bad arguments");
    const double mid = 0.5 * (a + b);
    std::vector<double> left{a};
    double h = h_a;
    while (left.back() + h < mid && h < h_max) {
        left.push_back(left.back() + h);
        h *= growth;
    }
    std::vector<double> right{b};
    h = h_b;
    while (right.back() - h > mid && h < h_max) {
        right.push_back(right.back() - h);
        h *= growth;
    }
    double lo = left.back(), hi = right.back();
    int nb = std::max(1, static_cast<int>(std::ceil((hi - lo) / h_max)));
    std::vector<double> g = left;
    for (int i = 1; i < nb; ++i) g.push_back(lo + (hi - lo) * i / nb);
    for (auto it = right.rbegin(); it != right.rend(); ++it) g.push_back(*it);
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw std::runtime_error("two_sided_grid: nodes not increasing");
    return g;
}

// Geometric time grid t_j = t0 * q^j, j = 0..n (n+1 levels), q > 1.
inline std::vector<double> geometric_times(double t0, double q, int n) {
    if (t0 <= 0 || q <= 1.0 || n < 1) throw std::invalid_argument("geometric_times: bad arguments");
    std::vector<double> t(n + 1);
    t[0] = t0;
    for (int j = 1; j <= n; ++j) t[j] = t[j - 1] * q;
    return t;
}

// Radial grid for the two-phase ball: n_core intervals on [0,R], n_shell on
// [R,1]; the interface R appears exactly once. Interface index is n_core.
inline std::vector<double> radial_grid(double R, int n_core, int n_shell, double R_outer = 1.0) {
    if (!(R > 0.0 && R < R_outer)) throw std::invalid_argument("radial_grid: R out of range");
    auto core = uniform_grid(0.0, R, n_core);
    auto shell = uniform_grid(R, R_outer, n_shell);
    core.insert(core.end(), shell.begin() + 1, shell.end());
    return core;
}

} // namespace twophase
