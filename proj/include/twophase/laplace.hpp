#pragma once
#include "twophase/fem.hpp"
#include "twophase/mesh.hpp"
#include "twophase/parabolic.hpp"
#include "twophase/radial.hpp"
#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace twophase {

enum class Provenance { transformed, direct };

// Resolvent-type field at one decay rate: w solves div(sigma grad w) = lambda w
// with w = 1 on the outer boundary, either obtained directly or as the
// normalized Laplace transform lambda * int_0^inf exp(-lambda t) u(.,t) dt of a
// heat field. d0 is the conductive outward flux sigma_s dw/dnu at the outer
// boundary; it is positive (w rises to 1 at the rim) and grows like
// sqrt(lambda sigma_s), so the inward heat flux -d0 is negative and decreasing.
struct LaplaceField {
    double lambda = 1.0;
    double sigma_s = 1.0;
    Provenance provenance = Provenance::direct;
    std::vector<double> r;  // sample radii, strictly increasing
    std::vector<double> w;  // values at r
    double d0 = std::numeric_limits<double>::quiet_NaN();
    double tail_bound = 0.0;  // certified truncation error (transformed fields)

    double sample(double radius) const;  // piecewise linear
};

// Direct radial solve at rate lambda via the substitution v = 1 - w, which
// turns the problem into the validated transmission solve with zeroth-order
// coefficient lambda and load lambda.
LaplaceField solve_elliptic_lambda(const RadialConfig& config, const Conductivity& cond,
                                   double lambda, int dim);

// Transform of a simulated 1D field. Interval quadrature interpolates the
// data linearly in sqrt(t) on every interval (exact for the short-time shape
// c1 + c2 sqrt(t), second order elsewhere); the head [0, t_first] is anchored
// at the known initial value, and the tail beyond the stored horizon T is
// modeled by freezing u(T), with certified error exp(-lambda T) (since
// 0 <= u <= 1). Requires exp(-lambda T) <= tail_tol, else "extend the time
// horizon".
LaplaceField transform_field(const HeatField1D& field, double lambda, double tail_tol = 1e-6);

struct LaplaceField2D {
    double lambda = 1.0;
    Provenance provenance = Provenance::direct;
    Eigen::VectorXd w;         // nodal values
    std::vector<double> flux;  // sigma_s dw/dnu at outer boundary nodes (variational)
    double d0_mean = 0.0;      // boundary-mass weighted mean of flux
    double tail_bound = 0.0;
};

LaplaceField2D solve_elliptic_lambda(const Mesh& mesh, const Conductivity& cond, double lambda);
LaplaceField2D transform_field(const HeatField2D& field, double lambda, double tail_tol = 1e-6);

// Scalar transform a~(lambda) = lambda int_0^inf exp(-lambda t) a(t) dt of a
// boundary time series sampled on a grid refined toward t = 0. Every interval
// is integrated under an a = alpha + beta sqrt(t) model (exact for the
// short-time expansion of interface data), the head [0, t_first] by
// extrapolating that model, and the tail by freezing a(T). Requested rates
// with lambda * t_first too large are rejected with "refine the series near
// t = 0".
struct TransformedBoundaryData {
    std::vector<double> lambdas;
    std::vector<double> value;
    std::vector<double> error_bound;  // head-model + tail certified bound
    void validate_unit_range() const;  // 0 < a~ < 1, for data in [0,1]
};

TransformedBoundaryData tilde_a(const std::vector<double>& t, const std::vector<double>& a,
                                const std::vector<double>& lambdas);

// WKB-type barrier package for a constant-curvature outer boundary (circle or
// sphere of radius rho): the inner tube of half-width delta0 carries the
// distance profile machinery
//   A0(delta)    = prod_j (1 - kappa_j delta)^(-1/2)
//   Apm(delta)   = int_0^delta [LapA0(tau)/2 +- 1] exp(-1/2 int_tau^delta Lap
//                  delta) dtau   (composite Gauss along the inward normal ray)
//   f_pm         = exp(-sqrt(lambda/sigma_s) delta) [A0 + sqrt(sigma_s/lambda) Apm]
//   w_pm         = f_pm +- psi exp(-eta sqrt(lambda))
// with psi the discrete harmonic corrector (0 on the boundary, 2 on the inner
// tube edge). lambda0 is the smallest rate on a geometric search grid at which
// the discrete differential inequalities
//   sigma_s Lap f_+ - lambda f_+ < 0 < sigma_s Lap f_- - lambda f_-
// hold with margin at all stations, together with the edge decay
// max(|f_+|, |f_-|, w_edge) <= exp(-eta sqrt(lambda)).
struct BarrierData {
    int dim = 2;
    double rho = 1.0;             // boundary sphere radius
    std::vector<double> kappas;   // N-1 principal curvatures (inward positive)
    double delta0 = 0.0;          // tube half-width, 0.4 / max kappa
    double eta = 0.0;             // edge decay rate, delta0 / (2 sqrt(sigma_s))
    double lambda0 = 0.0;         // reported smallest admissible rate
    double sigma_s = 1.0;
    std::vector<double> stations;   // delta samples in (0, delta0]
    std::vector<double> psi_grid;   // tube grid radii for the discrete corrector
    std::vector<double> psi_values;

    double A0(double delta) const;
    double lap_A0(double delta) const;
    double lap_delta(double delta) const;  // -sum kappa_j / (1 - kappa_j delta)
    double Apm(double delta, int sign) const;
    double psi_at(double delta) const;
    double f_pm(double delta, double lambda, int sign) const;
    void validate() const;
};

struct BarrierValues {
    double f_minus = 0.0, f_plus = 0.0, w_minus = 0.0, w_plus = 0.0;
};

// Builds the package for the concentric two-phase geometry (core radius
// R_inner, boundary radius rho): solves the corrector, fixes eta, and runs the
// lambda0 search against direct elliptic solves for the edge decay condition.
BarrierData make_barrier_data(int dim, const Conductivity& cond, double R_inner,
                              double rho = 1.0, int n_stations = 48);

BarrierValues barrier_profile(const BarrierData& b, double delta, double lambda);
// Planar wrapper: delta(x) = rho - |x|; rejects points outside the open tube.
BarrierValues barrier_eval(const BarrierData& b, Vec2 x, double lambda);

// Central-difference check of the eikonal property |grad delta| = 1 at a
// planar tube point (the distance field is evaluated, not its formula).
double eikonal_residual(const BarrierData& b, Vec2 x, double h = 1e-5);

// sigma_s Lap f_pm - lambda f_pm at a station, with the Laplacian of the
// barrier evaluated by radial central differences (step h in the radius).
double barrier_residual(const BarrierData& b, double delta, double lambda, int sign,
                        double h = 1e-5);

// Fit of the flux deficit d0(lambda)/sigma_s - sqrt(lambda/sigma_s) over a
// geometric sweep against c_inf + a / sqrt(lambda); the limit c_inf estimates
// -(1/2) sum_j kappa_j of the boundary. Flagged when the deficit series is not
// monotone (unresolved sweep).
struct CurvatureFit {
    std::vector<double> lambdas;
    std::vector<double> deficit;
    double c_inf = 0.0;
    double slope = 0.0;  // coefficient of 1/sqrt(lambda)
    double max_residual = 0.0;
    bool flagged = false;
};

CurvatureFit flux_asymptotics(const std::vector<LaplaceField>& sweep);

// Evaluates the boundary-data curvature formula
//   sum kappa_j ~ 2 (a~ sqrt(sigma_s) - [1-a~] sqrt(sigma_m))
//                 / (sigma_m [1-a~] + sigma_s a~) * sqrt(lambda)
// over the sweep and extrapolates the finite limit by a c + b/sqrt(lambda)
// fit. When one-sided interface flux traces are supplied, the transmission
// identity sigma_s flux_minus = sigma_m flux_plus is checked first and the
// data rejected on violation.
struct CurvatureEstimate {
    std::vector<double> lambdas;
    std::vector<double> estimate;  // per-rate evaluation of the formula
    double limit = 0.0;
    bool flagged = false;
};

CurvatureEstimate cauchy_curvature_formula(const TransformedBoundaryData& tbd, double sigma_s,
                                           double sigma_m,
                                           const std::vector<double>& flux_minus = {},
                                           const std::vector<double>& flux_plus = {},
                                           double transmission_tol = 1e-6);

} // namespace twophase
