#pragma once
#include "twophase/fourier.hpp"
#include "twophase/geometry.hpp"
#include <array>
#include <vector>

namespace twophase {

// Smooth radial cutoff profiles carrying boundary perturbations into the
// annulus: the inner profile is 1 in a band around the interface circle and
// vanishes near the origin and beyond mid-shell; the outer profile is 1 near
// the unit circle and vanishes below mid-shell. Quintic steps keep the map C^2.
struct BlendProfile {
    double R = 0.5;            // reference interface radius
    double edge_width = 0.02;  // flat band half-width at the carried circle
    double core_floor_frac = 0.3;  // inner profile vanishes below this * R

    double inner(double r) const;        // b_f
    double inner_deriv(double r) const;
    double outer(double r) const;        // b_g
    double outer_deriv(double r) const;
};

// Radial displacement map rho(r, theta) = r + b_f(r) f(theta) + b_g(r) g(theta)
// equal to f nu on the interface circle and g nu on the unit circle.
struct DomainMap {
    Perturbation inner;  // f, base_radius R
    Perturbation outer;  // g, base_radius 1
    BlendProfile blend;

    double rho(double r, double theta) const;
    double rho_r(double r, double theta) const;  // radial derivative
    Vec2 apply(double r, double theta) const;
};

// Validates the perturbation invariants and checks the bijectivity invariant
// (rho_r > 0) on a dense sample of the annulus.
DomainMap extend_perturbation(const Perturbation& f, const Perturbation& g);

// Fitted triangulation of the mapped disk: a fan around the center plus
// structured rings, with the interface circle as a ring of element edges.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> phase;            // per triangle: 0 core, 1 shell
    std::vector<int> outer_nodes;      // counterclockwise
    std::vector<int> interface_nodes;  // counterclockwise, shared by both phases
    std::vector<double> theta;         // reference angle of each outer node
    std::vector<Vec2> outer_normal;    // outward unit normal per outer node
    std::vector<double> jtau;          // tangential Jacobian per outer node
    std::vector<double> boundary_mass; // lumped boundary mass per outer node
    int nt = 0, nr_core = 0, nr_shell = 0;
    double R_ref = 0.5;

    int euler_characteristic() const;  // V - E + F, 1 for a disk
    double min_angle() const;          // radians, over all triangles
};

// resolution = angular node count; radial ring counts follow so cell aspect
// ratios stay O(1). quality_floor is in radians (center-fan triangles have a
// min angle of 2 pi / resolution by construction).
Mesh build_mesh(const DomainMap& map, int resolution, double quality_floor = 0.03);

// Triangle containing p (-1 if outside), with barycentric coordinates on
// request. Uses the structured ring/spoke layout for an O(1) guess and falls
// back to a full scan.
int locate_triangle(const Mesh& mesh, Vec2 p, std::array<double, 3>* bary = nullptr);

} // namespace twophase
