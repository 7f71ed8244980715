#pragma once
#include <vector>
#include <string>
#include <optional>

namespace twophase {

// Phase conductivities: core (inner ball), shell (annulus), exterior medium.
struct Conductivity {
    double sigma_c = 1.0;
    double sigma_s = 1.0;
    double sigma_m = 1.0;
    void validate() const;
};

// Coefficients of div(sigma grad u) = beta*u - gamma, u = c_bdry on the outer
// boundary, in dimension dim.
struct EllipticParams {
    double beta = 0.0;
    double gamma = 1.0;
    double c_bdry = 0.0;
    int dim = 2;
    void validate() const;
};

// Concentric-ball geometry: core B_R inside B_{R_outer} (R_outer = 1 by
// convention). The grid must be strictly increasing, span [0, R_outer], and
// contain R_inner exactly (the interface is resolved by a node).
struct RadialConfig {
    double R_inner = 0.5;
    double R_outer = 1.0;
    std::vector<double> grid;
    void validate() const;
    int interface_index() const; // index of R_inner in grid
};

// Convenience factory: per-phase uniform grid with n_core/n_shell intervals.
RadialConfig make_radial_config(double R, int n_core, int n_shell, double R_outer = 1.0);

struct RadialSolution {
    RadialConfig config;
    EllipticParams params;
    Conductivity cond;
    std::vector<double> values;  // u(r_i) on config.grid
    std::vector<double> deriv;   // u'(r_i); at the interface node the core-side value
    double du_iface_core = 0.0;  // one-sided u'(R-)
    double du_iface_shell = 0.0; // one-sided u'(R+)
    double lambda_serrin = 0.0;  // (gamma|Omega| - beta*int u) / |bdry|
    double integral_u = 0.0;     // int_0^1 u r^{N-1} dr (no angular factor)
};

struct ModeSolution {
    int k = 0;
    double eig = 0.0;            // k(N+k-2)
    std::vector<double> values;  // s_k(r_i) on the base grid
    double deriv_at_one = 0.0;   // one-sided s_k'(1)
    double ds_iface_core = 0.0;
    double ds_iface_shell = 0.0;
    double jump_data = 0.0;      // u'(R-) - u'(R+) used as the interface jump
    double condition_estimate = 0.0;
};

struct InvertibilityEntry {
    int k;
    double deriv_at_one;
    bool flagged;
    double condition_estimate;
};

// Base transmission solve on concentric balls (second-order FD, interface node
// duplicated internally, one-sided transmission rows).
RadialSolution solve_base_radial(const EllipticParams& params, const Conductivity& cond,
                                 const RadialConfig& config);

// Linearized mode profile s_k: same operator with angular eigenvalue
// k(k+N-2)/r^2, jump [s_k] = u'(R-) - u'(R+) at the interface, s_k(1) = 0,
// Frobenius regularity s_k ~ r^k at the origin.
ModeSolution solve_mode(int k, const RadialSolution& base, const EllipticParams& params,
                        const Conductivity& cond);

// Allows scaling the interface jump artificially (linearity test hook).
ModeSolution solve_mode_scaled(int k, const RadialSolution& base, const EllipticParams& params,
                               const Conductivity& cond, double jump_scale);

// s_k'(1) for k = 1..k_max with near-zero entries flagged.
std::vector<InvertibilityEntry> invertibility_report(const RadialSolution& base, int k_max,
                                                     double flag_threshold = 1e-8);

// CSV with columns r,phase,value,derivative (two rows at the interface node,
// one per one-sided derivative).
std::string radial_to_csv(const RadialSolution& sol);
std::string mode_to_csv(const ModeSolution& mode, const RadialConfig& config);

inline constexpr int k_max_cap = 64;

} // namespace twophase
