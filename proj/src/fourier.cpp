#include "twophase/fourier.hpp"
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twophase {

double Perturbation::eval(double theta) const {
    double s = 0.0;
    for (int k = 1; k <= K(); ++k)
        s += modes[k - 1].first * std::cos(k * theta) + modes[k - 1].second * std::sin(k * theta);
    return s;
}

double Perturbation::eval_deriv(double theta) const {
    double s = 0.0;
    for (int k = 1; k <= K(); ++k)
        s += k * (-modes[k - 1].first * std::sin(k * theta) +
                  modes[k - 1].second * std::cos(k * theta));
    return s;
}

double Perturbation::sup_norm() const {
    double s = 0.0;
    for (const auto& [a, b] : modes) s += std::abs(a) + std::abs(b);
    return s;
}

void Perturbation::validate() const {
    if (!(base_radius > 0.0)) throw std::invalid_argument("Perturbation: base_radius must be positive");
    if (sup_norm() >= base_radius / 4.0)
        throw std::invalid_argument("Perturbation: displacement exceeds the small-perturbation regime");
}

Perturbation Perturbation::single_mode(int k, double amplitude, double base_radius, bool sine) {
    if (k < 1) throw std::invalid_argument("Perturbation: modes start at k = 1 (zero mean)");
    Perturbation p;
    p.base_radius = base_radius;
    p.modes.assign(k, {0.0, 0.0});
    (sine ? p.modes[k - 1].second : p.modes[k - 1].first) = amplitude;
    return p;
}

std::vector<std::pair<double, double>> project_modes(const std::vector<double>& samples, int K) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 * K + 1) throw std::invalid_argument("project_modes: too few samples for requested K");
    std::vector<std::pair<double, double>> out(K, {0.0, 0.0});
    const double w = 2.0 / n;
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * std::numbers::pi * j / n;
        for (int k = 1; k <= K; ++k) {
            out[k - 1].first += w * samples[j] * std::cos(k * th);
            out[k - 1].second += w * samples[j] * std::sin(k * th);
        }
    }
    return out;
}

double modal_mean(const std::vector<double>& samples) {
    double s = 0.0;
    for (double v : samples) s += v;
    return s / static_cast<double>(samples.size());
}

std::vector<double> synthesize(const std::vector<std::pair<double, double>>& modes, int n) {
    std::vector<double> out(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * std::numbers::pi * j / n;
        for (std::size_t k = 1; k <= modes.size(); ++k)
            out[j] += modes[k - 1].first * std::cos(k * th) + modes[k - 1].second * std::sin(k * th);
    }
    return out;
}

} // namespace twophase
