#pragma once
#include "twophase/fem.hpp"
#include <utility>
#include <vector>

namespace twophase {

// Overdetermination residual on the outer boundary:
// Psi_i = (sigma_s d_nu u + Lambda) J_tau / sigma_s at outer node i, with
// Lambda chosen from the boundary residual sum so the discrete modal mean
// vanishes identically.
struct Residual {
    std::vector<double> values;                     // theta order of the mesh
    std::vector<std::pair<double, double>> modal;   // (a_k, b_k), k = 1..K
    double sup_norm = 0.0;
    double modal_mean = 0.0;
    double lambda = 0.0;
};

Residual residual(const Field& field, const Mesh& mesh, const Conductivity& cond, int K);

// Diagonal modal action of the frozen derivative: coefficients scale by
// s_k'(1). Inverse throws "Jacobian not invertible" on flagged modes.
std::vector<std::pair<double, double>> apply_frozen_jacobian(
    const Perturbation& p, const std::vector<InvertibilityEntry>& modal_derivs);

Perturbation apply_inverse_frozen_jacobian(const Residual& res,
                                           const std::vector<InvertibilityEntry>& modal_derivs,
                                           double base_radius);

struct NewtonOptions {
    int K = 8;               // modal truncation of f and Psi
    int resolution = 96;     // angular mesh resolution
    double R_inner = 0.5;    // reference interface radius
    double tol = 1e-6;       // declare convergence at sup|Psi| <= tol |Lambda(0,0)|
    int max_iter = 10;
    int radial_n = 2048;     // 1D resolution for the frozen modal derivatives
};

struct NewtonReport {
    Perturbation f;                        // converged (or best) iterate
    bool converged = false;
    int iterations = 0;                    // residual evaluations performed
    double lambda0 = 0.0;                  // |Lambda(0,0)|
    std::vector<double> residual_history;  // sup|Psi| at each iterate
    std::vector<double> contraction;       // consecutive residual ratios
    Residual final_residual;
};

// Quasi-Newton iteration f_{n+1} = f_n - [dPsi/df(0,0)]^{-1} Psi(f_n, g) with
// the frozen diagonal k -> s_k'(1). Throws "outside IFT neighborhood" when the
// residual grows three times in a row.
NewtonReport newton_solve(const Perturbation& g, const Conductivity& cond,
                          const EllipticParams& params, const NewtonOptions& opts);

// Linearized field u' for an interface perturbation f at the radial base
// configuration: jump [u'] = -[d_nu u] f carried by a core lifting, plus a
// continuous FEM correction. Returns u' (core-side values on interface nodes)
// with its variational boundary flux.
Field shape_derivative_direct(const Perturbation& f, const Mesh& mesh,
                              const Conductivity& cond, const EllipticParams& params);

} // namespace twophase
