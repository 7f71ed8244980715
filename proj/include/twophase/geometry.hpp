#pragma once
#include <cmath>
#include <vector>
#include <functional>
#include <string>

namespace twophase {

struct Vec2 {
    double x = 0.0, y = 0.0;
};
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Closed boundary as a trigonometric interpolant of samples. Three kinds:
//  - parametric: theta -> (x(theta), y(theta)), a planar closed curve (N=2);
//  - radial_graph: theta -> radius(theta) about the origin (star-shaped, N=2;
//    supports fast inside/outside tests used by the exterior-set quadratures);
//  - revolution: profile t -> (f(t), z(t)), f >= 0, revolved about the z-axis
//    (N=3; only curvature sampling is supported).
class Boundary {
public:
    enum class Kind { parametric, radial_graph, revolution };

    static Boundary circle(double rho, Vec2 center = {0, 0});
    static Boundary ellipse(double a, double b, int n_modes = 64);          // parametric
    static Boundary ellipse_radial(double a, double b, int n_modes = 96);   // radial graph
    static Boundary from_radial_samples(const std::vector<double>& radii);
    static Boundary from_parametric_samples(const std::vector<double>& xs,
                                            const std::vector<double>& ys);
    static Boundary sphere(double rho);                       // revolution profile
    static Boundary ellipsoid_revolution(double a, double c); // semi-axes (a,a,c)

    Kind kind() const { return kind_; }
    int dim() const { return kind_ == Kind::revolution ? 3 : 2; }
    Vec2 center() const { return center_; }

    Vec2 point(double t) const;
    Vec2 d1(double t) const;
    Vec2 d2(double t) const;
    double radius(double phi) const;        // radial_graph only
    double radius_deriv(double phi) const;  // radial_graph only
    bool contains(Vec2 q) const;            // radial_graph only
    Vec2 outward_normal(double t) const;

    // Signed curvature(s) at parameter t. N=2: one value (positive for a
    // counterclockwise convex curve, matching the interior-ball convention).
    // Revolution surfaces: meridian and parallel principal curvatures.
    std::vector<double> principal_curvatures(double t) const;

    Boundary flipped() const;  // reversed parametrization (normal flips)

private:
    Kind kind_ = Kind::parametric;
    Vec2 center_{0.0, 0.0};
    bool reversed_ = false;  // traverse the stored parametrization backwards
    // trig series c0 + sum a_k cos + b_k sin for each stored coordinate
    std::vector<double> ax_, bx_, ay_, by_;
    double x0_ = 0.0, y0_ = 0.0;
    double series(const std::vector<double>& a, const std::vector<double>& b, double c0,
                  double t, int deriv) const;
    Vec2 raw_point(double u) const;
    Vec2 raw_d1(double u) const;
    Vec2 raw_d2(double u) const;
};

// Weingarten-type scalar from the principal curvatures:
// N=2: 3 k1^2; N>=3: 3 sum k_i^2 + 2 sum_{i<j} k_i k_j.
double weingarten_scalar(const std::vector<double>& kappas);

struct CurvatureSample {
    double t;
    Vec2 point;
    std::vector<double> kappa;
    double kappa_sum;
    double Pi;  // prod_j (1/r - kappa_j)
    double C;   // weingarten_scalar
};

struct CurvatureData {
    std::vector<CurvatureSample> samples;
    double r_ball;  // the r used for Pi
};

CurvatureData curvatures(const Boundary& b, int n_samples, double r_ball);
std::string curvature_to_csv(const CurvatureData& data);

struct TubeSample {
    Vec2 x;
    double delta;        // dist(x, boundary)
    Vec2 grad_delta;
    Vec2 nearest;        // y(x)
    double laplace_delta;  // -sum kappa_j/(1 - kappa_j delta)
    bool ok;             // projection Newton converged
};

// Nearest-point data for points of the inner tube {0 < dist < delta0}.
// Requires max kappa < 1/(2 delta0) (checked on boundary samples).
std::vector<TubeSample> distance_field(const Boundary& b, const std::vector<Vec2>& pts,
                                       double delta0);

// Same, with points generated on the inner tube: 48 boundary stations,
// offsets {0.2, 0.5, 0.8} * delta0 along the inward normal.
std::vector<TubeSample> distance_field(const Boundary& b, double delta0);

// |Omega^c ∩ B_r(p)| for p on the boundary (N=2): per-ray crossing resolution
// by bisection, direction integral split at tangency/transition angles.
double exterior_volume(const Boundary& b, double t_p, double r);

// nu(p) . integral over Omega^c ∩ B_r(p) of (x - p) dx
double exterior_moment(const Boundary& b, double t_p, double r);

// Same quadratures against a caller-supplied inside-test (used for
// half-plane reference cases in tests).
double exterior_volume_indicator(const std::function<bool(Vec2)>& inside, Vec2 p, Vec2 nu,
                                 double r);
double exterior_moment_indicator(const std::function<bool(Vec2)>& inside, Vec2 p, Vec2 nu,
                                 double r);

struct MomentFit {
    double C_extracted;
    std::vector<double> radii;
    std::vector<double> moments;
    std::vector<double> fit_residuals;
    bool flagged;  // residual failed to decrease under r-refinement
};

// Fit m(r) = lead(r) [1 - C/(8(N+3)) r^2 + o(r^2)], lead = omega r^{N+1}/(N^2-1),
// over a decreasing radius sequence; extracts C(p).
MomentFit fit_moment_expansion(const Boundary& b, double t_p, const std::vector<double>& radii);

} // namespace twophase
