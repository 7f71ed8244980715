#include "twophase/parabolic.hpp"
#include "twophase/gridding.hpp"
#include "twophase/linalg.hpp"
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twophase {

namespace {

constexpr double two_pi_p = 2.0 * std::numbers::pi;

// Half-width multiplier for the truncation boxes of free-line problems: the
// complementary error function of this argument is below 1e-10, so the far
// field is flat to that accuracy up to the time horizon.
constexpr double box_sigmas = 10.0;

double face_area(const HeatProblem1D& p, double r) {
    if (!p.radial) return 1.0;
    return std::pow(r, p.dim - 1);
}

double cell_volume(const HeatProblem1D& p, double a, double b) {
    if (!p.radial) return b - a;
    return (std::pow(b, p.dim) - std::pow(a, p.dim)) / p.dim;
}

std::vector<double> cell_centers(const std::vector<double>& faces) {
    std::vector<double> c(faces.size() - 1);
    for (std::size_t i = 0; i + 1 < faces.size(); ++i) c[i] = 0.5 * (faces[i] + faces[i + 1]);
    return c;
}

// Conductance-form spatial operator: V du/dt = -(K u - b).
struct Tridiag {
    std::vector<double> lo, di, up, b, vol;
};

Tridiag build_operator(const HeatProblem1D& p) {
    const int n = static_cast<int>(p.sigma.size());
    auto centers = cell_centers(p.faces);
    Tridiag op;
    op.lo.assign(n, 0.0);
    op.di.assign(n, 0.0);
    op.up.assign(n, 0.0);
    op.b.assign(n, 0.0);
    op.vol.resize(n);
    for (int i = 0; i < n; ++i) op.vol[i] = cell_volume(p, p.faces[i], p.faces[i + 1]);
    for (int f = 1; f < n; ++f) {
        double area = face_area(p, p.faces[f]);
        double dl = p.faces[f] - centers[f - 1];
        double dr = centers[f] - p.faces[f];
        double g = area / (dl / p.sigma[f - 1] + dr / p.sigma[f]);
        op.di[f - 1] += g;
        op.di[f] += g;
        op.up[f - 1] -= g;
        op.lo[f] -= g;
    }
    if (p.right_dirichlet) {
        double area = face_area(p, p.faces[n]);
        double g = area * p.sigma[n - 1] / (p.faces[n] - centers[n - 1]);
        op.di[n - 1] += g;
        op.b[n - 1] += g * p.right_value;
    }
    if (p.left_dirichlet) {
        double area = face_area(p, p.faces[0]);
        double g = area * p.sigma[0] / (centers[0] - p.faces[0]);
        op.di[0] += g;
        op.b[0] += g * p.left_value;
    }
    return op;
}

// One theta step from u, in place. Returns false if the result escapes the
// monotone bracket [lo_bound, hi_bound].
bool theta_step(const Tridiag& op, double theta, double dt, double lo_bound, double hi_bound,
                std::vector<double>& u) {
    const std::size_t n = u.size();
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = theta * op.lo[i];
        up[i] = theta * op.up[i];
        di[i] = op.vol[i] / dt + theta * op.di[i];
        double ku = op.di[i] * u[i];
        if (i > 0) ku += op.lo[i] * u[i - 1];
        if (i + 1 < n) ku += op.up[i] * u[i + 1];
        rhs[i] = op.vol[i] / dt * u[i] - (1.0 - theta) * (ku - op.b[i]) + theta * op.b[i];
    }
    tridiag_solve(lo, di, up, rhs);
    const double slack = 1e-10 * std::max(1.0, std::max(std::abs(lo_bound), std::abs(hi_bound)));
    for (std::size_t i = 0; i < n; ++i)
        if (rhs[i] < lo_bound - slack || rhs[i] > hi_bound + slack) return false;
    u = rhs;
    return true;
}

struct Marcher {
    const HeatProblem1D& p;
    const Tridiag& op;
    std::vector<double>& u;
    long accepted = 0;

    void advance(double dt, int depth) {
        if (depth > 26)
            throw std::runtime_error(
                "heat step rejected by the monotonicity monitor below the halving floor");
        double theta = (accepted < p.startup_steps) ? 1.0 : p.theta;
        double lo = *std::min_element(u.begin(), u.end());
        double hi = *std::max_element(u.begin(), u.end());
        if (p.left_dirichlet) {
            lo = std::min(lo, p.left_value);
            hi = std::max(hi, p.left_value);
        }
        if (p.right_dirichlet) {
            lo = std::min(lo, p.right_value);
            hi = std::max(hi, p.right_value);
        }
        std::vector<double> saved = u;
        if (theta_step(op, theta, dt, lo, hi, u)) {
            ++accepted;
            return;
        }
        u = saved;
        advance(0.5 * dt, depth + 1);
        advance(0.5 * dt, depth + 1);
    }
};

// Minimum distance from a point to the closed polygon through the given nodes.
double polygon_distance(const std::vector<Vec2>& verts, const std::vector<int>& loop, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) {
        Vec2 a = verts[loop[i]], b = verts[loop[(i + 1) % n]];
        Vec2 ab = b - a;
        double len2 = dot(ab, ab);
        double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        Vec2 q{a.x + t * ab.x, a.y + t * ab.y};
        best = std::min(best, norm(p - q));
    }
    return best;
}

int outermost_interface_face(const HeatProblem1D& p) {
    for (int i = static_cast<int>(p.phase.size()); i-- > 1;)
        if (p.phase[i] == 2 && p.phase[i - 1] != 2) return i;
    throw std::invalid_argument("heat problem: no interface to the outside phase");
}

} // namespace

void HeatProblem1D::validate() const {
    const std::size_t n = sigma.size();
    if (n < 2 || faces.size() != n + 1 || phase.size() != n || u0.size() != n)
        throw std::invalid_argument("heat problem: inconsistent cell arrays");
    for (std::size_t i = 0; i + 1 < faces.size(); ++i)
        if (!(faces[i + 1] > faces[i]))
            throw std::invalid_argument("heat problem: faces must increase");
    if (radial && (faces.front() < 0.0 || dim < 1))
        throw std::invalid_argument("heat problem: bad radial geometry");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("heat problem: conductivities must be positive");
    for (std::size_t i = 1; i < n; ++i)
        if (sigma[i] != sigma[i - 1] && phase[i] == phase[i - 1])
            throw std::invalid_argument("heat problem: conductivity jump inside one phase");
    if (times.empty() || !(times.front() > 0.0))
        throw std::invalid_argument("heat problem: sample times must be positive");
    for (std::size_t j = 1; j < times.size(); ++j)
        if (!(times[j] > times[j - 1]))
            throw std::invalid_argument("heat problem: sample times must increase");
    if (theta < 0.5 || theta > 1.0)
        throw std::invalid_argument("heat problem: theta outside [1/2, 1]");
    if (kind == HeatKind::cauchy_dirichlet) {
        if (!right_dirichlet || right_value != 1.0)
            throw std::invalid_argument("heat problem: held boundary value must be 1");
        for (double v : u0)
            if (v != 0.0) throw std::invalid_argument("heat problem: initial data must vanish");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double want = (phase[i] == 2) ? 1.0 : 0.0;
            if (u0[i] != want)
                throw std::invalid_argument(
                    "heat problem: initial data must be the indicator of the outside phase");
        }
        double sig_max = *std::max_element(sigma.begin(), sigma.end());
        double reach = box_sigmas * std::sqrt(sig_max * times.back());
        double x_if = faces[outermost_interface_face(*this)];
        if (faces.back() - x_if < reach || (!radial && x_if - faces.front() < reach))
            throw std::invalid_argument(
                "heat problem: extend the computational box; the far-field error bound fails "
                "at the horizon");
    }
}

HeatProblem1D radial_dirichlet_problem(const Conductivity& cond, int dim, double R, double t0,
                                       double T, int steps_per_decade, double h_bdry,
                                       double h_max) {
    cond.validate();
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("radial problem: R outside (0,1)");
    HeatProblem1D p;
    p.kind = HeatKind::cauchy_dirichlet;
    p.radial = true;
    p.dim = dim;
    auto core = two_sided_grid(0.0, R, h_max, 2.0 * h_bdry, h_max);
    auto shell = two_sided_grid(R, 1.0, 2.0 * h_bdry, h_bdry, h_max);
    core.insert(core.end(), shell.begin() + 1, shell.end());
    p.faces = core;
    const int n = static_cast<int>(p.faces.size()) - 1;
    for (int i = 0; i < n; ++i) {
        bool in_core = 0.5 * (p.faces[i] + p.faces[i + 1]) < R;
        p.sigma.push_back(in_core ? cond.sigma_c : cond.sigma_s);
        p.phase.push_back(in_core ? 0 : 1);
    }
    p.u0.assign(n, 0.0);
    p.right_dirichlet = true;
    p.right_value = 1.0;
    int m = std::max(1, static_cast<int>(std::ceil(std::log10(T / t0) * steps_per_decade)));
    p.times = geometric_times(t0, std::pow(T / t0, 1.0 / m), m);
    p.times.back() = T;
    p.theta = 0.5;
    p.startup_steps = 8;
    return p;
}

HeatProblem1D radial_cauchy_problem(const Conductivity& cond, int dim, double R, double t0,
                                    double T, int steps_per_decade, double h_bdry, double h_max) {
    cond.validate();
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("radial problem: R outside (0,1)");
    HeatProblem1D p;
    p.kind = HeatKind::cauchy;
    p.radial = true;
    p.dim = dim;
    double sig_max = std::max({cond.sigma_c, cond.sigma_s, cond.sigma_m});
    double L = 1.0 + 1.05 * box_sigmas * std::sqrt(sig_max * T);
    auto core = two_sided_grid(0.0, R, h_max, 2.0 * h_bdry, h_max);
    auto shell = two_sided_grid(R, 1.0, 2.0 * h_bdry, h_bdry, h_max);
    auto outside = two_sided_grid(1.0, L, h_bdry, h_max, h_max);
    core.insert(core.end(), shell.begin() + 1, shell.end());
    core.insert(core.end(), outside.begin() + 1, outside.end());
    p.faces = core;
    const int n = static_cast<int>(p.faces.size()) - 1;
    for (int i = 0; i < n; ++i) {
        double c = 0.5 * (p.faces[i] + p.faces[i + 1]);
        int ph = c < R ? 0 : (c < 1.0 ? 1 : 2);
        p.phase.push_back(ph);
        p.sigma.push_back(ph == 0 ? cond.sigma_c : (ph == 1 ? cond.sigma_s : cond.sigma_m));
        p.u0.push_back(ph == 2 ? 1.0 : 0.0);
    }
    p.right_dirichlet = true;
    p.right_value = 1.0;
    int m = std::max(1, static_cast<int>(std::ceil(std::log10(T / t0) * steps_per_decade)));
    p.times = geometric_times(t0, std::pow(T / t0, 1.0 / m), m);
    p.times.back() = T;
    p.theta = 0.5;
    p.startup_steps = 8;
    return p;
}

HeatProblem1D flat_cauchy_problem(double sigma_left, double sigma_right, double t0, double T,
                                  int steps_per_decade, double h_bdry, double h_max) {
    if (!(sigma_left > 0.0 && sigma_right > 0.0))
        throw std::invalid_argument("flat problem: conductivities must be positive");
    HeatProblem1D p;
    p.kind = HeatKind::cauchy;
    p.radial = false;
    p.dim = 1;
    double L = 1.05 * box_sigmas * std::sqrt(std::max(sigma_left, sigma_right) * T);
    auto left = two_sided_grid(-L, 0.0, h_max, h_bdry, h_max);
    auto right = two_sided_grid(0.0, L, h_bdry, h_max, h_max);
    left.insert(left.end(), right.begin() + 1, right.end());
    p.faces = left;
    const int n = static_cast<int>(p.faces.size()) - 1;
    for (int i = 0; i < n; ++i) {
        bool on_left = 0.5 * (p.faces[i] + p.faces[i + 1]) < 0.0;
        p.sigma.push_back(on_left ? sigma_left : sigma_right);
        p.phase.push_back(on_left ? 1 : 2);
        p.u0.push_back(on_left ? 0.0 : 1.0);
    }
    p.left_dirichlet = true;
    p.left_value = 0.0;
    p.right_dirichlet = true;
    p.right_value = 1.0;
    int m = std::max(1, static_cast<int>(std::ceil(std::log10(T / t0) * steps_per_decade)));
    p.times = geometric_times(t0, std::pow(T / t0, 1.0 / m), m);
    p.times.back() = T;
    p.theta = 0.5;
    p.startup_steps = 8;
    return p;
}

HeatField1D simulate1d(const HeatProblem1D& problem) {
    problem.validate();
    Tridiag op = build_operator(problem);
    HeatField1D f;
    f.kind = problem.kind;
    f.radial = problem.radial;
    f.dim = problem.dim;
    f.faces = problem.faces;
    f.centers = cell_centers(problem.faces);
    f.sigma = problem.sigma;
    f.phase = problem.phase;
    f.left_dirichlet = problem.left_dirichlet;
    f.left_value = problem.left_value;
    f.right_dirichlet = problem.right_dirichlet;
    f.right_value = problem.right_value;
    f.times = problem.times;

    std::vector<double> u = problem.u0;
    Marcher m{problem, op, u};
    double t = 0.0;
    for (double t_out : problem.times) {
        m.advance(t_out - t, 0);
        t = t_out;
        f.values.push_back(u);
    }
    return f;
}

Eigen::MatrixXd step_operator_dense(const HeatProblem1D& problem, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step operator: dt must be positive");
    Tridiag op = build_operator(problem);
    const int n = static_cast<int>(op.vol.size());
    Eigen::MatrixXd s(n, n);
    for (int j = 0; j < n; ++j) {
        std::vector<double> lo(n), di(n), up(n), rhs(n, 0.0);
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        for (int i = 0; i < n; ++i) {
            lo[i] = problem.theta * op.lo[i];
            up[i] = problem.theta * op.up[i];
            di[i] = op.vol[i] / dt + problem.theta * op.di[i];
            double ku = op.di[i] * e[i];
            if (i > 0) ku += op.lo[i] * e[i - 1];
            if (i + 1 < n) ku += op.up[i] * e[i + 1];
            rhs[i] = op.vol[i] / dt * e[i] - (1.0 - problem.theta) * ku;
        }
        tridiag_solve(lo, di, up, rhs);
        for (int i = 0; i < n; ++i) s(i, j) = rhs[i];
    }
    return s;
}

Eigen::VectorXd cell_volumes(const HeatProblem1D& problem) {
    const int n = static_cast<int>(problem.sigma.size());
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = cell_volume(problem, problem.faces[i], problem.faces[i + 1]);
    return v;
}

int HeatField1D::time_index(double t) const {
    for (std::size_t j = 0; j < times.size(); ++j)
        if (std::abs(times[j] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return static_cast<int>(j);
    throw std::invalid_argument("heat field: time " + std::to_string(t) + " not stored");
}

double HeatField1D::interface_value(double x, int j) const {
    const auto& u = values.at(j);
    for (std::size_t f = 1; f + 1 < faces.size(); ++f) {
        if (std::abs(faces[f] - x) > 1e-12) continue;
        double wl = sigma[f - 1] / (faces[f] - centers[f - 1]);
        double wr = sigma[f] / (centers[f] - faces[f]);
        return (wl * u[f - 1] + wr * u[f]) / (wl + wr);
    }
    throw std::invalid_argument("heat field: position is not an interior face");
}

double HeatField1D::sample(double x, int j) const {
    const auto& u = values.at(j);
    const int n = static_cast<int>(u.size());
    if (x <= centers.front()) {
        if (x < faces.front() - 1e-12) throw std::invalid_argument("heat field: sample out of range");
        if (left_dirichlet) {
            double s = (x - faces.front()) / (centers.front() - faces.front());
            return left_value + s * (u[0] - left_value);
        }
        return u[0];
    }
    if (x >= centers.back()) {
        if (x > faces.back() + 1e-12) throw std::invalid_argument("heat field: sample out of range");
        if (right_dirichlet) {
            double s = (x - centers.back()) / (faces.back() - centers.back());
            return u[n - 1] + s * (right_value - u[n - 1]);
        }
        return u[n - 1];
    }
    auto it = std::upper_bound(centers.begin(), centers.end(), x);
    int i = static_cast<int>(it - centers.begin());  // centers[i-1] <= x < centers[i]
    // respect the derivative kink at a conductivity interface between the cells
    if (sigma[i - 1] != sigma[i]) {
        double xf = faces[i];
        double uf = interface_value(xf, j);
        if (x <= xf) {
            double s = (x - centers[i - 1]) / (xf - centers[i - 1]);
            return u[i - 1] + s * (uf - u[i - 1]);
        }
        double s = (x - xf) / (centers[i] - xf);
        return uf + s * (u[i] - uf);
    }
    double s = (x - centers[i - 1]) / (centers[i] - centers[i - 1]);
    return u[i - 1] + s * (u[i] - u[i - 1]);
}

std::vector<double> HeatField1D::boundary_flux() const {
    if (!right_dirichlet)
        throw std::invalid_argument("heat field: no held boundary to trace the flux on");
    std::vector<double> d;
    const int n = static_cast<int>(centers.size());
    double dist = faces.back() - centers.back();
    for (const auto& u : values) d.push_back(sigma[n - 1] * (right_value - u[n - 1]) / dist);
    return d;
}

std::vector<double> HeatField1D::mass() const {
    std::vector<double> out;
    std::vector<double> vol(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        vol[i] = radial ? (std::pow(faces[i + 1], dim) - std::pow(faces[i], dim)) / dim
                        : faces[i + 1] - faces[i];
    for (const auto& u : values) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += vol[i] * u[i];
        out.push_back(s);
    }
    return out;
}

HeatField2D simulate2d(const Mesh& mesh, const Conductivity& cond,
                       const std::vector<double>& times, double bdry_value, int startup_steps) {
    if (times.empty() || !(times.front() > 0.0))
        throw std::invalid_argument("planar heat: sample times must be positive");
    for (std::size_t j = 1; j < times.size(); ++j)
        if (!(times[j] > times[j - 1]))
            throw std::invalid_argument("planar heat: sample times must increase");
    // beta = 0 makes A the pure sigma-stiffness; the gamma load F is unused
    EllipticParams stiff;
    stiff.beta = 0.0;
    stiff.gamma = 1.0;
    FemSystem sys = assemble(mesh, cond, stiff);
    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<char> is_bdry(n, 0);
    for (int i : mesh.outer_nodes) is_bdry[i] = 1;
    std::vector<int> red(n, -1), full;
    for (int i = 0; i < n; ++i)
        if (!is_bdry[i]) {
            red[i] = static_cast<int>(full.size());
            full.push_back(i);
        }
    const int ni = static_cast<int>(full.size());

    std::vector<Triplet> trips;
    Eigen::VectorXd coupling = Eigen::VectorXd::Zero(ni);
    for (int col = 0; col < sys.A.outerSize(); ++col)
        for (SpMat::InnerIterator it(sys.A, col); it; ++it) {
            int r = static_cast<int>(it.row());
            if (is_bdry[r]) continue;
            if (is_bdry[col])
                coupling[red[r]] += it.value() * bdry_value;
            else
                trips.emplace_back(red[r], red[col], it.value());
        }
    SpMat a_ii(ni, ni);
    a_ii.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd m_ii(ni);
    for (int i = 0; i < ni; ++i) m_ii[i] = sys.mass_lumped[full[i]];

    HeatField2D fld;
    fld.mesh = mesh;
    fld.cond = cond;
    fld.bdry_value = bdry_value;
    fld.times = times;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(ni);
    double t = 0.0;
    long accepted = 0;
    const double hi = std::max(0.0, bdry_value), lo = std::min(0.0, bdry_value);
    const double slack = 1e-10 * std::max(1.0, std::abs(bdry_value));

    std::function<void(double, int)> advance = [&](double dt, int depth) {
        if (depth > 20)
            throw std::runtime_error(
                "planar heat step rejected by the monotonicity monitor below the halving floor");
        SpMat mat = a_ii;
        for (int i = 0; i < ni; ++i) mat.coeffRef(i, i) += m_ii[i] / dt;
        Eigen::VectorXd rhs = (m_ii.array() * u.array()).matrix() / dt - coupling;
        Eigen::VectorXd next = SparseSolver(mat).solve(rhs);
        bool first_steps = accepted < startup_steps;
        if (!first_steps && (next.minCoeff() < lo - slack || next.maxCoeff() > hi + slack)) {
            advance(0.5 * dt, depth + 1);
            advance(0.5 * dt, depth + 1);
            return;
        }
        u = next;
        ++accepted;
    };

    for (double t_out : times) {
        advance(t_out - t, 0);
        t = t_out;
        Eigen::VectorXd uf = Eigen::VectorXd::Constant(n, bdry_value);
        for (int i = 0; i < ni; ++i) uf[full[i]] = u[i];
        fld.values.push_back(uf);
        // variational trace against the lumped-mass march: the boundary rows of
        // the stiffness residual carry the flux (the held boundary value has
        // zero rate, so no mass term appears in those rows)
        Eigen::VectorXd resid = sys.A * uf;
        std::vector<double> flux(mesh.outer_nodes.size());
        for (std::size_t i = 0; i < mesh.outer_nodes.size(); ++i)
            flux[i] = resid[mesh.outer_nodes[i]] / mesh.boundary_mass[i];
        fld.outer_flux.push_back(flux);
    }
    return fld;
}

FluxTrace flux_trace(const HeatField2D& field, double rho) {
    const Mesh& m = field.mesh;
    FluxTrace tr;
    tr.rho = rho;
    tr.times = field.times;
    const int nt = m.nt;
    const int n_rings = m.nr_core + m.nr_shell;
    auto vid = [&](int ring, int i) { return 1 + ring * nt + (i % nt); };
    const int iface_ring = m.nr_core - 1;

    if (rho >= 1.0 - 1e-12) {
        tr.theta = m.theta;
        for (std::size_t j = 0; j < field.times.size(); ++j) {
            const auto& fx = field.outer_flux[j];
            double blen = 0.0, acc = 0.0;
            double mn = fx[0], mx = fx[0];
            for (std::size_t i = 0; i < fx.size(); ++i) {
                acc += fx[i] * m.boundary_mass[i];
                blen += m.boundary_mass[i];
                mn = std::min(mn, fx[i]);
                mx = std::max(mx, fx[i]);
            }
            tr.flux.push_back(fx);
            tr.d_mean.push_back(acc / blen);
            tr.spread.push_back(mx - mn);
        }
        return tr;
    }

    for (int i = 0; i < nt; ++i)
        if (norm(m.vertices[vid(iface_ring, i)]) >= rho - 1e-12)
            throw std::invalid_argument("flux surface intersects the core");
    for (int i = 0; i < nt; ++i) {
        // bracketing node ring along this spoke
        int jlo = -1;
        for (int r = iface_ring; r + 1 < n_rings; ++r) {
            if (norm(m.vertices[vid(r, i)]) <= rho && rho <= norm(m.vertices[vid(r + 1, i)])) {
                jlo = r;
                break;
            }
        }
        if (jlo < 0) throw std::invalid_argument("flux surface outside the shell rings");
        tr.theta.push_back(two_pi_p * i / nt);
    }
    for (std::size_t j = 0; j < field.times.size(); ++j) {
        std::vector<double> fx(nt);
        const auto& u = field.values[j];
        for (int i = 0; i < nt; ++i) {
            int jlo = iface_ring;
            while (jlo + 1 < n_rings && norm(m.vertices[vid(jlo + 1, i)]) < rho) ++jlo;
            double ra = norm(m.vertices[vid(jlo, i)]);
            double rb = norm(m.vertices[vid(jlo + 1, i)]);
            fx[i] = field.cond.sigma_s * (u[vid(jlo + 1, i)] - u[vid(jlo, i)]) / (rb - ra);
        }
        double mn = fx[0], mx = fx[0], acc = 0.0;
        for (double v : fx) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            acc += v;
        }
        tr.flux.push_back(fx);
        tr.d_mean.push_back(acc / nt);
        tr.spread.push_back(mx - mn);
    }
    return tr;
}

BalanceMoment balance_moment(const HeatField2D& field, Vec2 p, Vec2 nu, double r, int n_s,
                             int n_phi) {
    const Mesh& m = field.mesh;
    double nn = norm(nu);
    if (!(nn > 0.0) || !(r > 0.0)) throw std::invalid_argument("balance moment: bad direction or radius");
    Vec2 e1{nu.x / nn, nu.y / nn};
    Vec2 e2{-e1.y, e1.x};
    double d_out = polygon_distance(m.vertices, m.outer_nodes, p);
    double d_core = polygon_distance(m.vertices, m.interface_nodes, p);
    if (r >= d_out || r >= d_core)
        throw std::invalid_argument(
            "balance moment: ball is inadmissible (reaches the boundary or the core)");

    BalanceMoment bm;
    bm.p = p;
    bm.nu = e1;
    bm.r = r;
    bm.times = field.times;
    for (std::size_t j = 0; j < field.times.size(); ++j) {
        double acc = 0.0;
        for (int is = 0; is < n_s; ++is) {
            double s = (is + 0.5) * r / n_s;
            double w_s = s * (r / n_s);  // polar area element, midpoint in radius
            for (int ip = 0; ip < n_phi; ++ip) {
                double phi = two_pi_p * ip / n_phi;
                double c = std::cos(phi), sn = std::sin(phi);
                Vec2 y{p.x + s * (c * e1.x + sn * e2.x), p.y + s * (c * e1.y + sn * e2.y)};
                double uval = eval_p1(m, field.values[j], y);
                acc += uval * (s * c) * w_s * (two_pi_p / n_phi);
            }
        }
        bm.moment.push_back(acc);
    }
    return bm;
}

ContentSeries heat_content(const HeatField2D& field, Vec2 center, double r, int n_s, int n_phi) {
    ContentSeries cs;
    cs.times = field.times;
    for (std::size_t j = 0; j < field.times.size(); ++j) {
        double acc = 0.0;
        for (int is = 0; is < n_s; ++is) {
            double s = (is + 0.5) * r / n_s;
            for (int ip = 0; ip < n_phi; ++ip) {
                double phi = two_pi_p * ip / n_phi;
                Vec2 y{center.x + s * std::cos(phi), center.y + s * std::sin(phi)};
                acc += eval_p1(field.mesh, field.values[j], y) * s;
            }
        }
        acc *= (r / n_s) * (two_pi_p / n_phi);
        cs.content.push_back(acc);
        cs.rescaled.push_back(acc * std::pow(field.times[j], -0.75));
    }
    return cs;
}

ContentSeries heat_content_radial(const HeatField1D& field, double center_dist, double r,
                                  int n_quad) {
    if (!field.radial) throw std::invalid_argument("radial content: field is not radial");
    if (field.dim != 2 && field.dim != 3)
        throw std::invalid_argument("radial content: only dimensions 2 and 3 carry arc weights");
    const double c = center_dist;
    if (c < 0.0 || !(r > 0.0)) throw std::invalid_argument("radial content: bad geometry");

    // cross-section weight of the ball B_r(p), |p| = c, on the sphere |y| = rho:
    // arc angle in 2D, spherical cap angle in 3D
    auto weight = [&](double rho) {
        if (rho <= 0.0) return 0.0;
        if (c < 1e-14) return rho < r ? (field.dim == 2 ? two_pi_p : 2.0 * two_pi_p) : 0.0;
        double cosa = (rho * rho + c * c - r * r) / (2.0 * rho * c);
        if (cosa <= -1.0) return field.dim == 2 ? two_pi_p : 2.0 * two_pi_p;
        if (cosa >= 1.0) return 0.0;
        if (field.dim == 2) return 2.0 * std::acos(cosa);
        return two_pi_p * (1.0 - cosa);  // solid angle of the cap
    };
    auto metric = [&](double rho) { return field.dim == 2 ? rho : rho * rho; };

    ContentSeries cs;
    cs.times = field.times;
    const double rexp = -0.25 * (field.dim + 1);
    // Gauss-Legendre 16 point rule on [0,1]
    static const double gx[8] = {0.0483076656877383, 0.1444719615827965, 0.2392873622521371,
                                 0.3318686022821277, 0.4213512761306353, 0.5068999089322294,
                                 0.5877157572407623, 0.6630442669302152};
    static const double gw[8] = {0.0965400885147278, 0.0956387200792749, 0.0938443990808046,
                                 0.0911738786957639, 0.0876520930044038, 0.0833119242269467,
                                 0.0782610920513870, 0.0725514970451581};
    auto panel = [&](double a, double b, int idx) {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a), acc = 0.0;
        for (int k = 0; k < 8; ++k) {
            for (double sgn : {-1.0, 1.0}) {
                double rho = mid + sgn * half * gx[k];
                acc += gw[k] * half * field.sample(rho, idx) * weight(rho) * metric(rho);
            }
        }
        return acc;
    };
    double lo = std::max(0.0, c - r), hi = c + r;
    hi = std::min(hi, field.faces.back());
    // short-time heat content concentrates in a sqrt(t) layer at the outer
    // tangency end, so grade the quadrature panels toward it
    int panels = std::max(8, n_quad / 16);
    std::vector<double> cuts(panels + 1);
    for (int q = 0; q <= panels; ++q) {
        double s = static_cast<double>(q) / panels;
        cuts[q] = hi - (hi - lo) * std::pow(1.0 - s, 3.0);
    }
    for (std::size_t j = 0; j < field.times.size(); ++j) {
        double acc = 0.0;
        for (int q = 0; q < panels; ++q) acc += panel(cuts[q], cuts[q + 1], static_cast<int>(j));
        cs.content.push_back(acc);
        cs.rescaled.push_back(acc * std::pow(field.times[j], rexp));
    }
    return cs;
}

Richardson richardson_sqrt(double f_t, double f_t4, double f_t16) {
    Richardson r;
    double g_fine = 2.0 * f_t16 - f_t4;
    double g_coarse = 2.0 * f_t4 - f_t;
    r.limit = (4.0 * g_fine - g_coarse) / 3.0;
    r.flagged = (f_t4 - f_t16) * (f_t - f_t4) < 0.0;
    return r;
}

std::vector<LimitEstimate> interface_limit(const HeatField1D& field,
                                           const std::vector<double>& positions, double t_top) {
    if (field.kind != HeatKind::cauchy)
        throw std::invalid_argument("interface limit: field must come from an exterior-data problem");
    int j0 = field.time_index(t_top);
    int j1 = field.time_index(t_top / 4.0);
    int j2 = field.time_index(t_top / 16.0);
    std::vector<LimitEstimate> out;
    for (double x : positions) {
        bool face_hit = false;
        for (std::size_t f = 1; f + 1 < field.faces.size(); ++f)
            if (std::abs(field.faces[f] - x) <= 1e-12 &&
                field.sigma[f - 1] != field.sigma[f])
                face_hit = true;
        auto value = [&](int j) {
            return face_hit ? field.interface_value(x, j) : field.sample(x, j);
        };
        Richardson r = richardson_sqrt(value(j0), value(j1), value(j2));
        out.push_back({x, r.limit, r.flagged});
    }
    return out;
}

} // namespace twophase
