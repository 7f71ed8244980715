#include "twophase/mesh.hpp"
#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

namespace twophase {

namespace {

constexpr double two_pi_m = 2.0 * std::numbers::pi;

// quintic smoothstep: 0 at 0, 1 at 1, first and second derivatives zero at both ends
double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smoothstep_deriv(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

// rise on [a, b], 1 on [b, c], fall on [c, d]
double bump(double r, double a, double b, double c, double d) {
    if (r < b) return smoothstep((r - a) / (b - a));
    if (r <= c) return 1.0;
    return 1.0 - smoothstep((r - c) / (d - c));
}

double bump_deriv(double r, double a, double b, double c, double d) {
    if (r < b) return smoothstep_deriv((r - a) / (b - a)) / (b - a);
    if (r <= c) return 0.0;
    return -smoothstep_deriv((r - c) / (d - c)) / (d - c);
}

} // namespace

double BlendProfile::inner(double r) const {
    double mid = 0.5 * (R + 1.0);
    return bump(r, core_floor_frac * R, R - edge_width, R + edge_width, mid);
}

double BlendProfile::inner_deriv(double r) const {
    double mid = 0.5 * (R + 1.0);
    return bump_deriv(r, core_floor_frac * R, R - edge_width, R + edge_width, mid);
}

double BlendProfile::outer(double r) const {
    double mid = 0.5 * (R + 1.0);
    return bump(r, mid, 1.0 - edge_width, 1.0, 1.0 + edge_width);
}

double BlendProfile::outer_deriv(double r) const {
    double mid = 0.5 * (R + 1.0);
    return bump_deriv(r, mid, 1.0 - edge_width, 1.0, 1.0 + edge_width);
}

double DomainMap::rho(double r, double theta) const {
    return r + blend.inner(r) * inner.eval(theta) + blend.outer(r) * outer.eval(theta);
}

double DomainMap::rho_r(double r, double theta) const {
    return 1.0 + blend.inner_deriv(r) * inner.eval(theta) +
           blend.outer_deriv(r) * outer.eval(theta);
}

Vec2 DomainMap::apply(double r, double theta) const {
    double p = rho(r, theta);
    return {p * std::cos(theta), p * std::sin(theta)};
}

DomainMap extend_perturbation(const Perturbation& f, const Perturbation& g) {
    f.validate();
    g.validate();
    DomainMap map;
    map.inner = f;
    map.outer = g;
    map.blend.R = f.base_radius;
    if (!(g.base_radius > f.base_radius))
        throw std::invalid_argument("extend_perturbation: outer base radius must exceed inner");
    // bijectivity: the mapped radius must stay strictly increasing in r
    for (int i = 0; i <= 400; ++i) {
        double r = g.base_radius * i / 400.0;
        for (int j = 0; j < 128; ++j) {
            double th = two_pi_m * j / 128.0;
            if (!(map.rho_r(r, th) > 0.0))
                throw std::invalid_argument("perturbation too large: radial map folds");
        }
    }
    return map;
}

int Mesh::euler_characteristic() const {
    std::set<std::pair<int, int>> edges;
    for (const auto& t : triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    return static_cast<int>(vertices.size()) - static_cast<int>(edges.size()) +
           static_cast<int>(triangles.size());
}

double Mesh::min_angle() const {
    double best = two_pi_m;
    for (const auto& t : triangles) {
        for (int e = 0; e < 3; ++e) {
            Vec2 a = vertices[t[e]], b = vertices[t[(e + 1) % 3]], c = vertices[t[(e + 2) % 3]];
            Vec2 u = b - a, v = c - a;
            double ang = std::atan2(std::abs(u.x * v.y - u.y * v.x), dot(u, v));
            best = std::min(best, ang);
        }
    }
    return best;
}

Mesh build_mesh(const DomainMap& map, int resolution, double quality_floor) {
    if (resolution < 8) throw std::invalid_argument("build_mesh: resolution too small");
    const double R = map.inner.base_radius;
    const double R_out = map.outer.base_radius;
    Mesh m;
    m.nt = resolution;
    m.R_ref = R;
    const double h_target = two_pi_m * R_out / resolution;
    m.nr_core = std::max(4, static_cast<int>(std::ceil(R / h_target)));
    m.nr_shell = std::max(4, static_cast<int>(std::ceil((R_out - R) / h_target)));

    std::vector<double> rings;  // reference radii, ring 0 at the center fan radius
    for (int i = 1; i <= m.nr_core; ++i) rings.push_back(R * i / m.nr_core);
    for (int i = 1; i <= m.nr_shell; ++i) rings.push_back(R + (R_out - R) * i / m.nr_shell);
    const int n_rings = static_cast<int>(rings.size());
    const int iface_ring = m.nr_core - 1;  // index into rings

    m.vertices.push_back({0.0, 0.0});
    for (int j = 0; j < n_rings; ++j)
        for (int i = 0; i < resolution; ++i) {
            double th = two_pi_m * i / resolution;
            m.vertices.push_back(map.apply(rings[j], th));
        }
    auto vid = [&](int ring, int i) { return 1 + ring * resolution + (i % resolution); };

    // center fan (core phase)
    for (int i = 0; i < resolution; ++i) {
        m.triangles.push_back({0, vid(0, i), vid(0, i + 1)});
        m.phase.push_back(0);
    }
    // ring bands
    for (int j = 0; j + 1 < n_rings; ++j) {
        int ph = (j < iface_ring) ? 0 : 1;  // band between ring j and j+1
        for (int i = 0; i < resolution; ++i) {
            m.triangles.push_back({vid(j, i), vid(j + 1, i), vid(j + 1, i + 1)});
            m.triangles.push_back({vid(j, i), vid(j + 1, i + 1), vid(j, i + 1)});
            m.phase.push_back(ph);
            m.phase.push_back(ph);
        }
    }

    for (int i = 0; i < resolution; ++i) {
        m.interface_nodes.push_back(vid(iface_ring, i));
        m.outer_nodes.push_back(vid(n_rings - 1, i));
        m.theta.push_back(two_pi_m * i / resolution);
    }

    // outer-boundary geometry: edge lengths give the lumped boundary mass;
    // J_tau is that mass against the uniform reference spacing
    const double dth = two_pi_m / resolution;
    for (int i = 0; i < resolution; ++i) {
        Vec2 prev = m.vertices[m.outer_nodes[(i + resolution - 1) % resolution]];
        Vec2 here = m.vertices[m.outer_nodes[i]];
        Vec2 next = m.vertices[m.outer_nodes[(i + 1) % resolution]];
        double mass = 0.5 * (norm(here - prev) + norm(next - here));
        m.boundary_mass.push_back(mass);
        m.jtau.push_back(mass / dth);
        Vec2 tan = next - prev;
        double tn = norm(tan);
        m.outer_normal.push_back({tan.y / tn, -tan.x / tn});
    }

    double q = m.min_angle();
    if (q < quality_floor)
        throw std::runtime_error("build_mesh: min angle " + std::to_string(q) +
                                 " below quality floor near the mapped boundary");
    return m;
}

namespace {

bool barycentric_inside(const Mesh& m, int t, Vec2 p, std::array<double, 3>& b) {
    const auto& tr = m.triangles[t];
    Vec2 a = m.vertices[tr[0]], v1 = m.vertices[tr[1]], v2 = m.vertices[tr[2]];
    double den = (v1.x - a.x) * (v2.y - a.y) - (v1.y - a.y) * (v2.x - a.x);
    if (den == 0.0) return false;
    double w0 = ((v1.x - p.x) * (v2.y - p.y) - (v1.y - p.y) * (v2.x - p.x)) / den;
    double w1 = ((v2.x - p.x) * (a.y - p.y) - (v2.y - p.y) * (a.x - p.x)) / den;
    double w2 = 1.0 - w0 - w1;
    const double tol = -1e-10;
    if (w0 >= tol && w1 >= tol && w2 >= tol) {
        b = {w0, w1, w2};
        return true;
    }
    return false;
}

} // namespace

int locate_triangle(const Mesh& m, Vec2 p, std::array<double, 3>* bary) {
    std::array<double, 3> b;
    const int nt = m.nt;
    const int n_rings = m.nr_core + m.nr_shell;
    auto vid = [&](int ring, int i) { return 1 + ring * nt + ((i % nt) + nt) % nt; };
    double th = std::atan2(p.y, p.x);
    if (th < 0.0) th += two_pi_m;
    int i0 = static_cast<int>(th / (two_pi_m / nt)) % nt;
    double rr = norm(p);
    int jg = 0;
    while (jg + 1 < n_rings && norm(m.vertices[vid(jg, i0)]) < rr) ++jg;

    auto try_tri = [&](int t) {
        if (t < 0 || t >= static_cast<int>(m.triangles.size())) return false;
        return barycentric_inside(m, t, p, b);
    };
    for (int di = -2; di <= 2; ++di) {
        int i = ((i0 + di) % nt + nt) % nt;
        if (jg <= 1 && try_tri(i)) {  // center fan
            if (bary) *bary = b;
            return i;
        }
        for (int dj = -2; dj <= 1; ++dj) {
            int j = jg + dj;
            if (j < 0 || j + 1 >= n_rings) continue;
            for (int half = 0; half < 2; ++half) {
                int t = nt + 2 * (j * nt + i) + half;
                if (try_tri(t)) {
                    if (bary) *bary = b;
                    return t;
                }
            }
        }
    }
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
        if (try_tri(t)) {
            if (bary) *bary = b;
            return t;
        }
    return -1;
}

} // namespace twophase
