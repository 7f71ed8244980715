#pragma once
#include "twophase/fem.hpp"
#include "twophase/mesh.hpp"
#include "twophase/radial.hpp"
#include <Eigen/Dense>
#include <vector>

namespace twophase {

enum class HeatKind { cauchy_dirichlet, cauchy };

// One-dimensional conservative finite-volume heat problem, either radial
// (metric r^{N-1}) or flat. Conductivity is piecewise constant per cell and
// every conductivity jump must fall on a cell face.
struct HeatProblem1D {
    HeatKind kind = HeatKind::cauchy_dirichlet;
    bool radial = true;
    int dim = 2;                 // metric exponent N; ignored when flat
    std::vector<double> faces;   // n+1 strictly increasing cell faces
    std::vector<double> sigma;   // n per-cell conductivities
    std::vector<int> phase;      // n per-cell tags: 0 core, 1 shell, 2 outside
    std::vector<double> u0;      // n initial cell averages
    bool left_dirichlet = false;
    double left_value = 0.0;
    bool right_dirichlet = true;
    double right_value = 1.0;
    std::vector<double> times;   // positive, strictly increasing sample times
    double theta = 1.0;          // 1 backward Euler, 0.5 trapezoidal
    int startup_steps = 4;       // fully implicit damping steps before theta applies
    void validate() const;
};

// Factories. steps_per_decade controls the geometric time grid between t0 and
// T; h_bdry is the smallest cell near layers (outer boundary, interfaces),
// h_max caps the bulk spacing.
HeatProblem1D radial_dirichlet_problem(const Conductivity& cond, int dim, double R, double t0,
                                       double T, int steps_per_decade, double h_bdry = 1e-3,
                                       double h_max = 6e-3);
HeatProblem1D radial_cauchy_problem(const Conductivity& cond, int dim, double R, double t0,
                                    double T, int steps_per_decade, double h_bdry = 1e-3,
                                    double h_max = 6e-3);
// Flat line with one interface at x = 0: sigma_left to its left (tag shell),
// sigma_right to its right (tag outside, initially at 1).
HeatProblem1D flat_cauchy_problem(double sigma_left, double sigma_right, double t0, double T,
                                  int steps_per_decade, double h_bdry = 5e-4,
                                  double h_max = 0.25);

struct HeatField1D {
    HeatKind kind = HeatKind::cauchy_dirichlet;
    bool radial = true;
    int dim = 2;
    std::vector<double> faces, centers, sigma;
    std::vector<int> phase;
    bool left_dirichlet = false;
    double left_value = 0.0;
    bool right_dirichlet = true;
    double right_value = 1.0;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // values[j][i]: cell i at time j

    int time_index(double t) const;            // stored time lookup (1e-9 rel) or throw
    double interface_value(double x, int j) const;  // flux-weighted value at a face
    double sample(double x, int j) const;      // piecewise linear, interface-aware
    std::vector<double> boundary_flux() const; // sigma du/dnu at the right end, per time
    std::vector<double> mass() const;          // metric-weighted integral, per time
};

HeatField1D simulate1d(const HeatProblem1D& problem);

// Dense one-step propagator (V/dt + theta K)^{-1} (V/dt - (1-theta) K) for
// small diagnostics grids, and the cell volume weights defining the mass
// inner product it is self-adjoint under.
Eigen::MatrixXd step_operator_dense(const HeatProblem1D& problem, double dt);
Eigen::VectorXd cell_volumes(const HeatProblem1D& problem);

// Planar simulation on a fitted transmission mesh, boundary value held on the
// outer circle, zero initial data (the 2D problems are all of Dirichlet kind).
struct HeatField2D {
    Mesh mesh;
    Conductivity cond;
    double bdry_value = 1.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> values;          // nodal, per time
    std::vector<std::vector<double>> outer_flux;  // variational trace per time
};

HeatField2D simulate2d(const Mesh& mesh, const Conductivity& cond,
                       const std::vector<double>& times, double bdry_value = 1.0,
                       int startup_steps = 2);

// Flux samples on a closed curve inside the shell closure: rho = 1 means the
// outer boundary (variational trace); rho < 1 picks the concentric sample
// circle of that radius, which must not cut into the core.
struct FluxTrace {
    double rho = 1.0;
    std::vector<double> theta;               // sample stations
    std::vector<double> times;
    std::vector<std::vector<double>> flux;   // flux[j][i]: station i at time j
    std::vector<double> d_mean;              // mean flux per time
    std::vector<double> spread;              // max - min per time
};

FluxTrace flux_trace(const HeatField2D& field, double rho);

// Vector-weighted ball moment int_{B_r(p)} u (y-p).nu dy at every stored time.
// The ball must keep clear of both the outer boundary and the core closure.
struct BalanceMoment {
    Vec2 p{0.0, 0.0};
    Vec2 nu{1.0, 0.0};
    double r = 0.0;
    std::vector<double> times;
    std::vector<double> moment;
};

BalanceMoment balance_moment(const HeatField2D& field, Vec2 p, Vec2 nu, double r,
                             int n_s = 24, int n_phi = 64);

// Ball heat content and its rescaled short-time series t^{-(N+1)/4} content.
struct ContentSeries {
    std::vector<double> times;
    std::vector<double> content;
    std::vector<double> rescaled;
};

ContentSeries heat_content(const HeatField2D& field, Vec2 center, double r, int n_s = 48,
                           int n_phi = 128);
// Radial fields admit an exact angular reduction: the ball cuts each sphere
// |y| = rho in an arc whose angle is known in closed form.
ContentSeries heat_content_radial(const HeatField1D& field, double center_dist, double r,
                                  int n_quad = 160);

// Three-point extrapolation of F(t) = L + a sqrt(t) + b t sampled at
// (t, t/4, t/16); flags a non-monotone tail.
struct Richardson {
    double limit = 0.0;
    bool flagged = false;
};
Richardson richardson_sqrt(double f_t, double f_t4, double f_t16);

// Short-time limits of u at given positions of a 1D field, extrapolated from
// stored times (t_top, t_top/4, t_top/16).
struct LimitEstimate {
    double position = 0.0;
    double limit = 0.0;
    bool flagged = false;
};
std::vector<LimitEstimate> interface_limit(const HeatField1D& field,
                                           const std::vector<double>& positions, double t_top);

} // namespace twophase
