#include "twophase/fem.hpp"
#include <cmath>
#include <stdexcept>

namespace twophase {

namespace {

struct TriGeom {
    double area;
    Vec2 grad[3];  // P1 basis gradients
};

TriGeom tri_geometry(const Mesh& mesh, const std::array<int, 3>& t) {
    Vec2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
    double twoA = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    if (!(twoA > 0.0)) throw std::runtime_error("fem: inverted or degenerate triangle");
    TriGeom g;
    g.area = 0.5 * twoA;
    g.grad[0] = {(p1.y - p2.y) / twoA, (p2.x - p1.x) / twoA};
    g.grad[1] = {(p2.y - p0.y) / twoA, (p0.x - p2.x) / twoA};
    g.grad[2] = {(p0.y - p1.y) / twoA, (p1.x - p0.x) / twoA};
    return g;
}

void add_element(std::vector<Triplet>& trips, const std::array<int, 3>& t, const TriGeom& g,
                 double sigma, double beta) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = sigma * g.area * dot(g.grad[i], g.grad[j]) +
                       beta * g.area / 12.0 * (i == j ? 2.0 : 1.0);
            trips.emplace_back(t[i], t[j], v);
        }
}

} // namespace

FemSystem assemble(const Mesh& mesh, const Conductivity& cond, const EllipticParams& params) {
    cond.validate();
    params.validate();
    if (params.dim != 2) throw std::invalid_argument("fem: planar assembly requires dim = 2");
    const int n = static_cast<int>(mesh.vertices.size());
    FemSystem sys;
    sys.F = Eigen::VectorXd::Zero(n);
    sys.mass_lumped = Eigen::VectorXd::Zero(n);
    std::vector<Triplet> trips;
    trips.reserve(mesh.triangles.size() * 9);
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& t = mesh.triangles[k];
        TriGeom g = tri_geometry(mesh, t);
        double sigma = mesh.phase[k] == 0 ? cond.sigma_c : cond.sigma_s;
        add_element(trips, t, g, sigma, params.beta);
        for (int i = 0; i < 3; ++i) {
            sys.F[t[i]] += params.gamma * g.area / 3.0;
            sys.mass_lumped[t[i]] += g.area / 3.0;
        }
        sys.volume += g.area;
    }
    sys.A.resize(n, n);
    sys.A.setFromTriplets(trips.begin(), trips.end());
    return sys;
}

SpMat assemble_restricted(const Mesh& mesh, const Conductivity& cond,
                          const EllipticParams& params, int phase) {
    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<Triplet> trips;
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        if (mesh.phase[k] != phase) continue;
        const auto& t = mesh.triangles[k];
        TriGeom g = tri_geometry(mesh, t);
        double sigma = phase == 0 ? cond.sigma_c : cond.sigma_s;
        add_element(trips, t, g, sigma, params.beta);
    }
    SpMat A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

Eigen::VectorXd solve_dirichlet(const Mesh& mesh, const SpMat& A, const Eigen::VectorXd& F,
                                double bdry_value) {
    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<char> is_bdry(n, 0);
    for (int i : mesh.outer_nodes) is_bdry[i] = 1;
    std::vector<int> reduced(n, -1);
    int m = 0;
    for (int i = 0; i < n; ++i)
        if (!is_bdry[i]) reduced[i] = m++;

    Eigen::VectorXd Fr(m);
    for (int i = 0; i < n; ++i)
        if (reduced[i] >= 0) Fr[reduced[i]] = F[i];
    std::vector<Triplet> trips;
    for (int col = 0; col < A.outerSize(); ++col)
        for (SpMat::InnerIterator it(A, col); it; ++it) {
            int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            if (is_bdry[r]) continue;
            if (is_bdry[c]) Fr[reduced[r]] -= it.value() * bdry_value;
            else trips.emplace_back(reduced[r], reduced[c], it.value());
        }
    SpMat Ar(m, m);
    Ar.setFromTriplets(trips.begin(), trips.end());
    SparseSolver solver(Ar);
    Eigen::VectorXd ur = solver.solve(Fr);

    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = reduced[i] >= 0 ? ur[reduced[i]] : bdry_value;
    return u;
}

Field make_field(const Mesh& mesh, const FemSystem& sys, const EllipticParams& params,
                 const Eigen::VectorXd& u) {
    Field f;
    f.values = u;
    f.volume = sys.volume;
    f.integral_u = u.dot(sys.mass_lumped);
    Eigen::VectorXd resid = sys.A * u - sys.F;
    double rsum = 0.0, bsum = 0.0;
    for (std::size_t i = 0; i < mesh.outer_nodes.size(); ++i) {
        double bm = mesh.boundary_mass[i];
        f.flux.push_back(resid[mesh.outer_nodes[i]] / bm);
        rsum += resid[mesh.outer_nodes[i]];
        bsum += bm;
    }
    f.boundary_length = bsum;
    f.lambda = -rsum / bsum;
    f.lambda_formula = (params.gamma * f.volume - params.beta * f.integral_u) / bsum;
    return f;
}

Field solve_transmission(const Mesh& mesh, const Conductivity& cond,
                         const EllipticParams& params) {
    FemSystem sys = assemble(mesh, cond, params);
    Eigen::VectorXd u = solve_dirichlet(mesh, sys.A, sys.F, params.c_bdry);
    return make_field(mesh, sys, params, u);
}

double l2_norm(const Mesh& mesh, const Eigen::VectorXd& values) {
    double s = 0.0;
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& t = mesh.triangles[k];
        TriGeom g = tri_geometry(mesh, t);
        double a = values[t[0]], b = values[t[1]], c = values[t[2]];
        s += g.area / 6.0 * (a * a + b * b + c * c + a * b + b * c + a * c);
    }
    return std::sqrt(s);
}

double eval_p1(const Mesh& mesh, const Eigen::VectorXd& values, Vec2 p) {
    std::array<double, 3> b;
    int t = locate_triangle(mesh, p, &b);
    if (t < 0) throw std::invalid_argument("eval_p1: point outside the mesh");
    const auto& tr = mesh.triangles[t];
    return b[0] * values[tr[0]] + b[1] * values[tr[1]] + b[2] * values[tr[2]];
}

} // namespace twophase
