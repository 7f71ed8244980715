#pragma once
#include "twophase/linalg.hpp"
#include "twophase/mesh.hpp"
#include "twophase/radial.hpp"

namespace twophase {

// P1 Galerkin operator for div(sigma grad u) - beta u with load gamma,
// assembled without boundary constraints (full rows are kept for the
// variational boundary-flux recovery).
struct FemSystem {
    SpMat A;                    // sigma-stiffness + beta-mass
    Eigen::VectorXd F;          // gamma load
    Eigen::VectorXd mass_lumped;
    double volume = 0.0;
};

FemSystem assemble(const Mesh& mesh, const Conductivity& cond, const EllipticParams& params);

// Same bilinear form restricted to the triangles of one phase (0 core,
// 1 shell); used to turn a lifting of an interface jump into a load.
SpMat assemble_restricted(const Mesh& mesh, const Conductivity& cond,
                          const EllipticParams& params, int phase);

// Solve A u = F with u = bdry_value on the outer boundary nodes.
Eigen::VectorXd solve_dirichlet(const Mesh& mesh, const SpMat& A, const Eigen::VectorXd& F,
                                double bdry_value);

struct Field {
    Eigen::VectorXd values;
    std::vector<double> flux;  // sigma_s d_nu u at outer nodes, variational recovery
    double lambda = 0.0;          // Serrin constant from the boundary residual sum
    double lambda_formula = 0.0;  // (gamma |Omega| - beta int u) / |boundary|
    double volume = 0.0;
    double integral_u = 0.0;
    double boundary_length = 0.0;
};

// Flux trace and Serrin constant from an already-solved nodal vector.
Field make_field(const Mesh& mesh, const FemSystem& sys, const EllipticParams& params,
                 const Eigen::VectorXd& u);

// Convenience: assemble, solve with the configured boundary value, recover flux.
Field solve_transmission(const Mesh& mesh, const Conductivity& cond,
                         const EllipticParams& params);

// L2 norm over the mesh (consistent P1 mass).
double l2_norm(const Mesh& mesh, const Eigen::VectorXd& values);

// Pointwise evaluation of a P1 nodal field; throws if p is outside the mesh.
double eval_p1(const Mesh& mesh, const Eigen::VectorXd& values, Vec2 p);

} // namespace twophase
