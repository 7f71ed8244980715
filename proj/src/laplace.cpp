#include "twophase/laplace.hpp"
#include "twophase/fem.hpp"
#include "twophase/gridding.hpp"
#include "twophase/linalg.hpp"
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twophase {

namespace {

// lambda int_a^b exp(-lambda t) (alpha + beta sqrt(t)) dt in closed form;
// the sqrt part integrates to sqrt(pi/lambda)/2 erf(sqrt(lambda t)) - sqrt(t)
// exp(-lambda t).
double transform_piece(double lambda, double ta, double tb, double alpha, double beta) {
    double ea = std::exp(-lambda * ta), eb = std::exp(-lambda * tb);
    double out = alpha * (ea - eb);
    if (beta != 0.0) {
        double sa = std::sqrt(ta), sb = std::sqrt(tb);
        double sl = std::sqrt(lambda);
        out += beta * (0.5 * std::sqrt(M_PI) / sl * (std::erf(sl * sb) - std::erf(sl * sa)) -
                       (sb * eb - sa * ea));
    }
    return out;
}

// Normalized transform of one sampled series: sqrt(t)-linear interpolation on
// every interval (exact for data of the form c1 + c2 sqrt(t), the short-time
// shape of boundary series), the head anchored at the known initial value,
// and the tail beyond the horizon modeled by freezing the last sample.
double transform_series(const std::vector<double>& times, const std::vector<double>& vals,
                        double v0, double lambda) {
    double acc = transform_piece(lambda, 0.0, times.front(), v0,
                                 (vals.front() - v0) / std::sqrt(times.front()));
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
        double sa = std::sqrt(times[j]), sb = std::sqrt(times[j + 1]);
        double beta = (vals[j + 1] - vals[j]) / (sb - sa);
        double alpha = vals[j] - beta * sa;
        acc += transform_piece(lambda, times[j], times[j + 1], alpha, beta);
    }
    acc += vals.back() * std::exp(-lambda * times.back());
    return acc;
}

} // namespace

double LaplaceField::sample(double radius) const {
    if (r.empty()) throw std::logic_error("LaplaceField::sample: empty field");
    if (radius <= r.front()) return w.front();
    if (radius >= r.back()) return w.back();
    auto it = std::upper_bound(r.begin(), r.end(), radius);
    std::size_t i = (std::size_t)(it - r.begin());
    double s = (radius - r[i - 1]) / (r[i] - r[i - 1]);
    return (1.0 - s) * w[i - 1] + s * w[i];
}

LaplaceField solve_elliptic_lambda(const RadialConfig& config, const Conductivity& cond,
                                   double lambda, int dim) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_elliptic_lambda: lambda must be positive");
    // v = 1 - w turns div(sigma grad w) = lambda w, w = 1 on the rim, into the
    // transmission problem div(sigma grad v) = lambda v - lambda, v = 0
    EllipticParams params;
    params.beta = lambda;
    params.gamma = lambda;
    params.c_bdry = 0.0;
    params.dim = dim;
    RadialSolution sol = solve_base_radial(params, cond, config);

    LaplaceField out;
    out.lambda = lambda;
    out.sigma_s = cond.sigma_s;
    out.provenance = Provenance::direct;
    out.r = config.grid;
    out.w.resize(sol.values.size());
    for (std::size_t i = 0; i < sol.values.size(); ++i) out.w[i] = 1.0 - sol.values[i];
    // variational flux: the divergence theorem gives sigma_s dw/dnu * |bdry| =
    // lambda int w, far more robust than differentiating the discrete field
    double Ro = config.R_outer;
    double int_w = std::pow(Ro, dim) / dim - sol.integral_u;
    out.d0 = lambda * int_w / std::pow(Ro, dim - 1);
    out.tail_bound = 0.0;
    return out;
}

LaplaceField transform_field(const HeatField1D& field, double lambda, double tail_tol) {
    if (!(lambda > 0.0)) throw std::invalid_argument("transform_field: lambda must be positive");
    double tail = std::exp(-lambda * field.times.back());
    if (tail > tail_tol)
        throw std::invalid_argument("transform_field: extend the time horizon (tail bound " +
                                    std::to_string(tail) + " exceeds tolerance)");

    LaplaceField out;
    out.lambda = lambda;
    out.sigma_s = field.sigma.back();
    out.provenance = Provenance::transformed;
    out.r = field.centers;
    out.tail_bound = tail;
    out.w.resize(field.centers.size());

    std::vector<double> series(field.times.size());
    for (std::size_t i = 0; i < field.centers.size(); ++i) {
        for (std::size_t j = 0; j < field.times.size(); ++j) series[j] = field.values[j][i];
        double v0 = field.kind == HeatKind::cauchy ? (field.phase[i] == 2 ? 1.0 : 0.0) : 0.0;
        out.w[i] = transform_series(field.times, series, v0, lambda);
    }

    if (field.kind == HeatKind::cauchy_dirichlet && field.right_dirichlet) {
        // the discrete boundary flux is affine in the last cell value and the
        // transform is normalized, so it commutes with the flux extraction
        double dist = field.faces.back() - field.centers.back();
        out.d0 = field.sigma.back() * (field.right_value - out.w.back()) / dist;
    }
    return out;
}

LaplaceField2D solve_elliptic_lambda(const Mesh& mesh, const Conductivity& cond, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_elliptic_lambda: lambda must be positive");
    EllipticParams params;
    params.beta = lambda;
    params.gamma = lambda;
    params.c_bdry = 0.0;
    params.dim = 2;
    FemSystem sys = assemble(mesh, cond, params);
    Eigen::VectorXd v = solve_dirichlet(mesh, sys.A, sys.F, 0.0);
    Field f = make_field(mesh, sys, params, v);

    LaplaceField2D out;
    out.lambda = lambda;
    out.provenance = Provenance::direct;
    out.w = Eigen::VectorXd::Ones(v.size()) - v;
    out.flux.resize(f.flux.size());
    double acc = 0.0, blen = 0.0;
    for (std::size_t i = 0; i < f.flux.size(); ++i) {
        out.flux[i] = -f.flux[i]; // flux of w = 1 - v
        acc += out.flux[i] * mesh.boundary_mass[i];
        blen += mesh.boundary_mass[i];
    }
    out.d0_mean = acc / blen;
    return out;
}

LaplaceField2D transform_field(const HeatField2D& field, double lambda, double tail_tol) {
    if (!(lambda > 0.0)) throw std::invalid_argument("transform_field: lambda must be positive");
    double tail = std::exp(-lambda * field.times.back());
    if (tail > tail_tol)
        throw std::invalid_argument("transform_field: extend the time horizon (tail bound " +
                                    std::to_string(tail) + " exceeds tolerance)");

    const Mesh& mesh = field.mesh;
    Eigen::Index n = (Eigen::Index)mesh.vertices.size();
    LaplaceField2D out;
    out.lambda = lambda;
    out.provenance = Provenance::transformed;
    out.tail_bound = tail;
    out.w.resize(n);

    std::vector<double> series(field.times.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < field.times.size(); ++j) series[j] = field.values[j][i];
        out.w[i] = transform_series(field.times, series, 0.0, lambda);
    }
    // boundary nodes are held at the boundary value for all positive times, so
    // their transform is that value exactly
    for (int b : mesh.outer_nodes) out.w[b] = field.bdry_value;

    // variational flux of the transformed field (transform and flux extraction
    // commute: both are normalized linear-in-time operations)
    EllipticParams params;
    params.beta = 0.0;
    params.gamma = 1.0;
    params.dim = 2;
    FemSystem sys = assemble(mesh, field.cond, params);
    Eigen::VectorXd resid = sys.A * out.w;
    out.flux.resize(mesh.outer_nodes.size());
    double acc = 0.0, blen = 0.0;
    for (std::size_t i = 0; i < mesh.outer_nodes.size(); ++i) {
        out.flux[i] = resid[mesh.outer_nodes[i]] / mesh.boundary_mass[i];
        acc += out.flux[i] * mesh.boundary_mass[i];
        blen += mesh.boundary_mass[i];
    }
    out.d0_mean = acc / blen;
    return out;
}

void TransformedBoundaryData::validate_unit_range() const {
    for (double v : value)
        if (!(v > 0.0 && v < 1.0))
            throw std::runtime_error("TransformedBoundaryData: transform left the unit interval");
}

TransformedBoundaryData tilde_a(const std::vector<double>& t, const std::vector<double>& a,
                                const std::vector<double>& lambdas) {
    if (t.size() != a.size() || t.size() < 4)
        throw std::invalid_argument("tilde_a: need at least four samples");
    for (std::size_t j = 0; j + 1 < t.size(); ++j)
        if (!(t[j] > 0.0 && t[j + 1] > t[j])) throw std::invalid_argument("tilde_a: bad time grid");

    // cross-validation residual of the sqrt(t) head model: predict the first
    // sample from the next two and record the miss
    double s1 = std::sqrt(t[0]), s2 = std::sqrt(t[1]), s3 = std::sqrt(t[2]);
    double beta23 = (a[2] - a[1]) / (s3 - s2);
    double head_miss = std::abs(a[0] - (a[1] + beta23 * (s1 - s2)));
    double lo = *std::min_element(a.begin(), a.end());
    double hi = *std::max_element(a.begin(), a.end());

    TransformedBoundaryData out;
    out.lambdas = lambdas;
    for (double lambda : lambdas) {
        if (!(lambda > 0.0)) throw std::invalid_argument("tilde_a: lambda must be positive");
        if (lambda * t.front() > 0.25)
            throw std::invalid_argument("tilde_a: refine the series near t = 0 for this rate");
        // head: extrapolate the sqrt(t) model through the first two samples
        double beta = (a[1] - a[0]) / (s2 - s1);
        double alpha = a[0] - beta * s1;
        double acc = transform_piece(lambda, 0.0, t.front(), alpha, beta);
        for (std::size_t j = 0; j + 1 < t.size(); ++j) {
            double sa = std::sqrt(t[j]), sb = std::sqrt(t[j + 1]);
            double b = (a[j + 1] - a[j]) / (sb - sa);
            acc += transform_piece(lambda, t[j], t[j + 1], a[j] - b * sa, b);
        }
        acc += a.back() * std::exp(-lambda * t.back());
        out.value.push_back(acc);
        out.error_bound.push_back((1.0 - std::exp(-lambda * t.front())) * head_miss +
                                  std::exp(-lambda * t.back()) * (hi - lo));
    }
    return out;
}

double BarrierData::A0(double delta) const {
    double p = 1.0;
    for (double k : kappas) p *= 1.0 - k * delta;
    return 1.0 / std::sqrt(p);
}

double BarrierData::lap_delta(double delta) const {
    double s = 0.0;
    for (double k : kappas) s += k / (1.0 - k * delta);
    return -s;
}

double BarrierData::lap_A0(double delta) const {
    // A0(delta(x)) has Laplacian A0'' - A0' sum kappa/(1-kappa delta) since
    // |grad delta| = 1; both derivatives are available in closed form
    double s1 = 0.0, s2 = 0.0;
    for (double k : kappas) {
        double q = k / (1.0 - k * delta);
        s1 += q;
        s2 += q * q;
    }
    double a0 = A0(delta);
    double d1 = 0.5 * a0 * s1;
    double d2 = 0.25 * a0 * s1 * s1 + 0.5 * a0 * s2;
    return d2 - d1 * s1;
}

double BarrierData::Apm(double delta, int sign) const {
    if (delta == 0.0) return 0.0;
    // composite 16-point Gauss on 8 panels along the inward normal ray; the
    // inner weight exp(-1/2 int_tau^delta lap delta) has the closed log form
    // prod (1 - kappa tau)/(1 - kappa delta) under the square root
    static const double xs[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double ws[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    auto log_prod = [&](double x) {
        double s = 0.0;
        for (double k : kappas) s += std::log1p(-k * x);
        return s;
    };
    double lp_delta = log_prod(delta);
    double acc = 0.0;
    int panels = 8;
    for (int p = 0; p < panels; ++p) {
        double a = delta * p / panels, b = delta * (p + 1) / panels;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < 8; ++q) {
            for (double tau : {mid - half * xs[q], mid + half * xs[q]}) {
                double weight = std::exp(0.5 * (log_prod(tau) - lp_delta));
                acc += ws[q] * half * (0.5 * lap_A0(tau) + sign) * weight;
            }
        }
    }
    return acc;
}

double BarrierData::psi_at(double delta) const {
    double r = rho - delta;
    if (r <= psi_grid.front()) return psi_values.front();
    if (r >= psi_grid.back()) return psi_values.back();
    auto it = std::upper_bound(psi_grid.begin(), psi_grid.end(), r);
    std::size_t i = (std::size_t)(it - psi_grid.begin());
    double s = (r - psi_grid[i - 1]) / (psi_grid[i] - psi_grid[i - 1]);
    return (1.0 - s) * psi_values[i - 1] + s * psi_values[i];
}

double BarrierData::f_pm(double delta, double lambda, int sign) const {
    double root = std::sqrt(lambda / sigma_s);
    return std::exp(-root * delta) * (A0(delta) + std::sqrt(sigma_s / lambda) * Apm(delta, sign));
}

void BarrierData::validate() const {
    if (kappas.empty() || delta0 <= 0.0) throw std::logic_error("BarrierData: not built");
    for (double k : kappas)
        if (!(k < 1.0 / (2.0 * delta0)))
            throw std::logic_error("BarrierData: curvature exceeds the tube bound");
    if (std::abs(A0(0.0) - 1.0) > 1e-14 || std::abs(Apm(0.0, +1)) > 1e-14 ||
        std::abs(Apm(0.0, -1)) > 1e-14)
        throw std::logic_error("BarrierData: boundary normalization violated");
    for (std::size_t i = 0; i < stations.size(); ++i) {
        if (!(stations[i] > 0.0 && stations[i] <= delta0 + 1e-12))
            throw std::logic_error("BarrierData: station outside the tube");
        if (i > 0 && !(stations[i] > stations[i - 1]))
            throw std::logic_error("BarrierData: stations not increasing");
    }
}

namespace {

RadialConfig tube_config(double R_inner, double rho, double lambda, double sigma_min) {
    double layer = std::sqrt(sigma_min / lambda);
    double hb = std::min(1e-3, 0.1 * layer);
    auto shell = two_sided_grid(R_inner, rho, 1e-3, hb, 4e-3);
    auto core = uniform_grid(0.0, R_inner, std::max(8, (int)std::ceil(R_inner / 4e-3)));
    core.insert(core.end(), shell.begin() + 1, shell.end());
    RadialConfig config;
    config.R_inner = R_inner;
    config.R_outer = rho;
    config.grid = core;
    return config;
}

} // namespace

BarrierData make_barrier_data(int dim, const Conductivity& cond, double R_inner, double rho,
                              int n_stations) {
    if (dim < 2 || dim > 3) throw std::invalid_argument("make_barrier_data: dim must be 2 or 3");
    if (!(R_inner > 0.0 && R_inner < rho))
        throw std::invalid_argument("make_barrier_data: core must sit inside the boundary sphere");

    BarrierData b;
    b.dim = dim;
    b.rho = rho;
    b.sigma_s = cond.sigma_s;
    b.kappas.assign(dim - 1, 1.0 / rho);
    double kmax = 1.0 / rho;
    b.delta0 = 0.4 / kmax;
    if (rho - b.delta0 <= R_inner)
        throw std::invalid_argument("make_barrier_data: tube would touch the core");
    b.eta = b.delta0 / (2.0 * std::sqrt(cond.sigma_s));

    b.stations.resize(n_stations);
    for (int i = 0; i < n_stations; ++i) b.stations[i] = b.delta0 * (i + 1) / n_stations;
    b.stations.back() = b.delta0;

    // discrete harmonic corrector on the tube: (r^(N-1) psi')' = 0 with
    // psi = 2 on the inner edge and 0 on the boundary (midpoint conductances)
    int n = 3000;
    b.psi_grid = uniform_grid(rho - b.delta0, rho, n);
    {
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) {
            double rm = 0.5 * (b.psi_grid[i] + b.psi_grid[i + 1]);
            double h = b.psi_grid[i + 1] - b.psi_grid[i];
            g[i] = std::pow(rm, dim - 1) / h;
        }
        int m = n - 1; // interior unknowns
        std::vector<double> lo(m), di(m), up(m), rhs(m, 0.0);
        for (int i = 0; i < m; ++i) {
            lo[i] = -g[i];
            di[i] = g[i] + g[i + 1];
            up[i] = -g[i + 1];
        }
        rhs[0] += g[0] * 2.0; // inner edge value
        tridiag_solve(lo, di, up, rhs);
        b.psi_values.assign(n + 1, 0.0);
        b.psi_values[0] = 2.0;
        for (int i = 0; i < m; ++i) b.psi_values[i + 1] = rhs[i];
        b.psi_values[n] = 0.0;
    }

    // lambda0 search on a geometric grid: smallest rate from which on the
    // discrete barrier inequalities hold with half of the ideal margin, the
    // barriers decay at rate eta on the inner edge, and so does the solved
    // field itself
    std::vector<double> grid;
    for (int k = 0; k <= 14; ++k) grid.push_back(std::ldexp(1.0, k));
    std::vector<bool> ok(grid.size(), true);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        double lambda = grid[gi];
        double edge = std::exp(-b.eta * std::sqrt(lambda));
        if (std::max(std::abs(b.f_pm(b.delta0, lambda, +1)),
                     std::abs(b.f_pm(b.delta0, lambda, -1))) > edge) {
            ok[gi] = false;
            continue;
        }
        LaplaceField wf = solve_elliptic_lambda(
            tube_config(R_inner, rho, lambda, std::min(cond.sigma_c, cond.sigma_s)), cond, lambda,
            dim);
        if (wf.sample(rho - b.delta0) > edge) {
            ok[gi] = false;
            continue;
        }
        for (double d : b.stations) {
            double margin = cond.sigma_s * std::exp(-std::sqrt(lambda / cond.sigma_s) * d);
            if (!(barrier_residual(b, d, lambda, +1) <= -margin) ||
                !(barrier_residual(b, d, lambda, -1) >= margin)) {
                ok[gi] = false;
                break;
            }
        }
    }
    b.lambda0 = 0.0;
    for (std::size_t gi = grid.size(); gi-- > 0;) {
        if (!ok[gi]) break;
        b.lambda0 = grid[gi];
    }
    if (b.lambda0 == 0.0)
        throw std::runtime_error("make_barrier_data: no admissible rate found on the search grid");
    b.validate();
    return b;
}

BarrierValues barrier_profile(const BarrierData& b, double delta, double lambda) {
    if (!(delta >= 0.0 && delta <= b.delta0 * (1.0 + 1e-12)))
        throw std::invalid_argument("barrier_profile: point outside the tube");
    BarrierValues v;
    v.f_minus = b.f_pm(delta, lambda, -1);
    v.f_plus = b.f_pm(delta, lambda, +1);
    double corr = b.psi_at(delta) * std::exp(-b.eta * std::sqrt(lambda));
    v.w_minus = v.f_minus - corr;
    v.w_plus = v.f_plus + corr;
    return v;
}

BarrierValues barrier_eval(const BarrierData& b, Vec2 x, double lambda) {
    if (b.dim != 2) throw std::logic_error("barrier_eval: planar wrapper needs a planar package");
    double delta = b.rho - std::hypot(x.x, x.y);
    if (!(delta > 0.0 && delta < b.delta0))
        throw std::invalid_argument("barrier_eval: point outside the tube");
    return barrier_profile(b, delta, lambda);
}

double eikonal_residual(const BarrierData& b, Vec2 x, double h) {
    auto dist = [&](Vec2 p) { return b.rho - std::hypot(p.x, p.y); };
    double gx = (dist({x.x + h, x.y}) - dist({x.x - h, x.y})) / (2.0 * h);
    double gy = (dist({x.x, x.y + h}) - dist({x.x, x.y - h})) / (2.0 * h);
    return std::abs(std::hypot(gx, gy) - 1.0);
}

double barrier_residual(const BarrierData& b, double delta, double lambda, int sign, double h) {
    double r = b.rho - delta;
    auto f = [&](double rr) { return b.f_pm(b.rho - rr, lambda, sign); };
    double f0 = f(r), fp = f(r + h), fm = f(r - h);
    double lap = (fp - 2.0 * f0 + fm) / (h * h) + (b.dim - 1) / r * (fp - fm) / (2.0 * h);
    return b.sigma_s * lap - lambda * f0;
}

CurvatureFit flux_asymptotics(const std::vector<LaplaceField>& sweep) {
    if (sweep.size() < 4) throw std::invalid_argument("flux_asymptotics: need at least four rates");
    CurvatureFit fit;
    double sigma_s = sweep.front().sigma_s;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const auto& f = sweep[i];
        if (std::abs(f.sigma_s - sigma_s) > 1e-14)
            throw std::invalid_argument("flux_asymptotics: mixed shell conductivities");
        if (i > 0 && !(f.lambda > sweep[i - 1].lambda))
            throw std::invalid_argument("flux_asymptotics: rates must increase");
        fit.lambdas.push_back(f.lambda);
        fit.deficit.push_back(f.d0 / sigma_s - std::sqrt(f.lambda / sigma_s));
    }
    Eigen::MatrixXd A(fit.lambdas.size(), 2);
    Eigen::VectorXd rhs(fit.lambdas.size());
    for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / std::sqrt(fit.lambdas[i]);
        rhs(i) = fit.deficit[i];
    }
    Eigen::VectorXd c = lstsq(A, rhs);
    fit.c_inf = c(0);
    fit.slope = c(1);
    fit.max_residual = (A * c - rhs).cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i + 2 < fit.deficit.size(); ++i)
        if ((fit.deficit[i + 1] - fit.deficit[i]) * (fit.deficit[i + 2] - fit.deficit[i + 1]) < 0.0)
            fit.flagged = true;
    return fit;
}

CurvatureEstimate cauchy_curvature_formula(const TransformedBoundaryData& tbd, double sigma_s,
                                           double sigma_m, const std::vector<double>& flux_minus,
                                           const std::vector<double>& flux_plus,
                                           double transmission_tol) {
    if (tbd.lambdas.size() < 4)
        throw std::invalid_argument("cauchy_curvature_formula: need at least four rates");
    if (!flux_minus.empty() || !flux_plus.empty()) {
        if (flux_minus.size() != tbd.lambdas.size() || flux_plus.size() != tbd.lambdas.size())
            throw std::invalid_argument("cauchy_curvature_formula: flux trace length mismatch");
        for (std::size_t i = 0; i < flux_minus.size(); ++i) {
            double a = sigma_s * flux_minus[i], b = sigma_m * flux_plus[i];
            double scale = std::max({std::abs(a), std::abs(b), 1e-30});
            if (std::abs(a - b) > transmission_tol * scale)
                throw std::runtime_error(
                    "cauchy_curvature_formula: transmission identity violated by the data");
        }
    }
    CurvatureEstimate out;
    out.lambdas = tbd.lambdas;
    for (std::size_t i = 0; i < tbd.lambdas.size(); ++i) {
        double at = tbd.value[i];
        double num = 2.0 * (at * std::sqrt(sigma_s) - (1.0 - at) * std::sqrt(sigma_m));
        double den = sigma_m * (1.0 - at) + sigma_s * at;
        out.estimate.push_back(num / den * std::sqrt(tbd.lambdas[i]));
    }
    Eigen::MatrixXd A(out.lambdas.size(), 2);
    Eigen::VectorXd rhs(out.lambdas.size());
    for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / std::sqrt(out.lambdas[i]);
        rhs(i) = out.estimate[i];
    }
    Eigen::VectorXd c = lstsq(A, rhs);
    out.limit = c(0);
    for (std::size_t i = 0; i + 2 < out.estimate.size(); ++i)
        if ((out.estimate[i + 1] - out.estimate[i]) * (out.estimate[i + 2] - out.estimate[i + 1]) <
            -1e-30)
            out.flagged = true;
    return out;
}

} // namespace twophase
