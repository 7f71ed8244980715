#pragma once
#include <vector>
#include <utility>
#include <cstddef>

namespace twophase {

// Zero-mean truncated Fourier perturbation of a circle of radius base_radius:
// displacement(theta) = sum_k a_k cos(k theta) + b_k sin(k theta), k = 1..K.
struct Perturbation {
    std::vector<std::pair<double, double>> modes;  // (a_k, b_k), index 0 <-> k=1
    double base_radius = 1.0;

    int K() const { return static_cast<int>(modes.size()); }
    double eval(double theta) const;
    double eval_deriv(double theta) const;
    double sup_norm() const;  // bound sum |a_k|+|b_k| on the displacement
    // Small-perturbation regime: displacement sup-norm below base_radius/4.
    void validate() const;
    static Perturbation single_mode(int k, double amplitude, double base_radius,
                                    bool sine = false);
};

// Coefficients (a_k, b_k) for k = 1..K of samples on the uniform grid
// theta_j = 2 pi j / n (trapezoid projection; exact for bandlimited data).
std::vector<std::pair<double, double>> project_modes(const std::vector<double>& samples, int K);

// Mean of samples (the k = 0 coefficient).
double modal_mean(const std::vector<double>& samples);

// Synthesize mode values on the uniform grid.
std::vector<double> synthesize(const std::vector<std::pair<double, double>>& modes, int n);

} // namespace twophase
