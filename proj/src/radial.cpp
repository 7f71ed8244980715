#include "twophase/radial.hpp"
#include "twophase/fdweights.hpp"
#include "twophase/gridding.hpp"
#include "twophase/linalg.hpp"
#include <cmath>
#include <sstream>
#include <iomanip>
#include <stdexcept>

namespace twophase {

void Conductivity::validate() const {
    if (!(sigma_c > 0.0) || !(sigma_s > 0.0) || !(sigma_m > 0.0))
        throw std::invalid_argument("Conductivity: all phases must be strictly positive");
}

void EllipticParams::validate() const {
    if (beta < 0.0) throw std::invalid_argument("EllipticParams: beta must be nonnegative");
    if (!(gamma > 0.0)) throw std::invalid_argument("EllipticParams: gamma must be positive");
    if (dim < 2) throw std::invalid_argument("EllipticParams: dim must be >= 2");
    if (beta * c_bdry - gamma >= 0.0)
        throw std::invalid_argument("EllipticParams: require beta*c_bdry - gamma < 0");
}

void RadialConfig::validate() const {
    if (!(R_inner > 0.0 && R_inner < R_outer))
        throw std::invalid_argument("RadialConfig: need 0 < R_inner < R_outer");
    if (grid.size() < 7) throw std::invalid_argument("RadialConfig: grid too small");
    if (grid.front() != 0.0 || grid.back() != R_outer)
        throw std::invalid_argument("RadialConfig: grid must span [0, R_outer]");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("RadialConfig: grid must be strictly increasing");
    interface_index();
}

int RadialConfig::interface_index() const {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] == R_inner) return static_cast<int>(i);
    throw std::invalid_argument("RadialConfig: interface radius is not a grid node");
}

RadialConfig make_radial_config(double R, int n_core, int n_shell, double R_outer) {
    RadialConfig cfg;
    cfg.R_inner = R;
    cfg.R_outer = R_outer;
    cfg.grid = radial_grid(R, n_core, n_shell, R_outer);
    cfg.validate();
    return cfg;
}

namespace {

// Internal node layout with the interface duplicated: core nodes
// 0..iface hold u(R-) at iface, shell nodes iface+1..m-1 hold u(R+) at
// iface+1; both coordinates equal R.
struct Layout {
    std::vector<double> x;
    int iface;  // last core node
    int m;      // total unknowns
};

Layout duplicated_layout(const RadialConfig& cfg) {
    Layout L;
    int i0 = cfg.interface_index();
    L.x.assign(cfg.grid.begin(), cfg.grid.begin() + i0 + 1);
    L.x.insert(L.x.end(), cfg.grid.begin() + i0, cfg.grid.end());
    L.iface = i0;
    L.m = static_cast<int>(L.x.size());
    return L;
}

// ODE row at interior node i using the 3-point stencil {i-1, i, i+1}:
// sigma*(u'' + (N-1)/r u' - angular/r^2 u) - beta*u = rhs.
void ode_row(std::vector<Triplet>& T, Eigen::VectorXd& rhs, const std::vector<double>& x,
             int i, double sigma, double beta, int N, double angular, double load) {
    std::vector<double> nds = {x[i - 1], x[i], x[i + 1]};
    auto w2 = fd_weights(x[i], nds, 2);
    auto w1 = fd_weights(x[i], nds, 1);
    double r = x[i];
    for (int j = 0; j < 3; ++j) {
        double c = sigma * (w2[j] + (N - 1) / r * w1[j]);
        T.emplace_back(i, i - 1 + j, c);
    }
    T.emplace_back(i, i, -sigma * angular / (r * r) - beta);
    rhs[i] = load;
}

// One-sided 3-point first-derivative weights at x[at] over nodes idx.
void deriv_row(std::vector<Triplet>& T, int row, const std::vector<double>& x,
               int at, const std::vector<int>& idx, double scale) {
    std::vector<double> nds;
    for (int j : idx) nds.push_back(x[j]);
    auto w = fd_weights(x[at], nds, 1);
    for (std::size_t j = 0; j < idx.size(); ++j) T.emplace_back(row, idx[j], scale * w[j]);
}

double deriv_at(const std::vector<double>& x, const Eigen::VectorXd& v, int at,
                const std::vector<int>& idx) {
    std::vector<double> nds;
    for (int j : idx) nds.push_back(x[j]);
    auto w = fd_weights(x[at], nds, 1);
    double d = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) d += w[j] * v[idx[j]];
    return d;
}

double trapezoid_weighted(const std::vector<double>& r, const std::vector<double>& u, int N) {
    double s = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        double fa = u[i - 1] * std::pow(r[i - 1], N - 1);
        double fb = u[i] * std::pow(r[i], N - 1);
        s += 0.5 * (fa + fb) * (r[i] - r[i - 1]);
    }
    return s;
}

struct AssembledSolve {
    Eigen::VectorXd sol;
    double condest;
};

AssembledSolve solve_transmission(const Layout& L, const Conductivity& cond,
                                  const EllipticParams& params, double angular,
                                  double origin_value_row,  // true: s(0)=0, false: u'(0)=0
                                  double frobenius_k,       // >0: use Frobenius closure at node 1
                                  double jump, double bdry_value, double gamma_load,
                                  bool want_cond) {
    const auto& x = L.x;
    const int m = L.m, iface = L.iface, N = params.dim;
    std::vector<Triplet> T;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);

    if (origin_value_row > 0.5) {
        T.emplace_back(0, 0, 1.0);  // s(0) = 0
        rhs[0] = 0.0;
    } else {
        deriv_row(T, 0, x, 0, {0, 1, 2}, 1.0);  // u'(0) = 0
        rhs[0] = 0.0;
    }

    int first_interior = 1;
    if (frobenius_k > 0.0) {
        // Regularity closure: s ~ r^k (1 + c1 r^2) near the origin, imposed as
        // a two-node relation s(r1)/s(r2) = p(r1)/p(r2), scaled to unit max.
        double k = frobenius_k;
        double c1 = params.beta / (cond.sigma_c * (4.0 * k + 2.0 * N));
        double ratio = std::exp(k * std::log(x[1] / x[2])) * (1.0 + c1 * x[1] * x[1]) /
                       (1.0 + c1 * x[2] * x[2]);
        T.emplace_back(1, 1, 1.0);
        T.emplace_back(1, 2, -ratio);
        rhs[1] = 0.0;
        first_interior = 2;
    }

    for (int i = first_interior; i < iface; ++i)
        ode_row(T, rhs, x, i, cond.sigma_c, params.beta, N, angular, gamma_load);

    // Transmission pair at the duplicated interface node.
    T.emplace_back(iface, iface + 1, 1.0);
    T.emplace_back(iface, iface, -1.0);
    rhs[iface] = jump;  // value jump (shell minus core); 0 for the base problem
    deriv_row(T, iface + 1, x, iface, {iface - 2, iface - 1, iface}, cond.sigma_c);
    deriv_row(T, iface + 1, x, iface + 1, {iface + 1, iface + 2, iface + 3}, -cond.sigma_s);
    rhs[iface + 1] = 0.0;

    for (int i = iface + 2; i < m - 1; ++i)
        ode_row(T, rhs, x, i, cond.sigma_s, params.beta, N, angular, gamma_load);

    T.emplace_back(m - 1, m - 1, 1.0);
    rhs[m - 1] = bdry_value;

    SpMat A(m, m);
    A.setFromTriplets(T.begin(), T.end());
    SparseSolver solver(A);
    AssembledSolve out{solver.solve(rhs), 0.0};
    if (want_cond) out.condest = solver.condest();
    return out;
}

} // namespace

RadialSolution solve_base_radial(const EllipticParams& params, const Conductivity& cond,
                                 const RadialConfig& config) {
    params.validate();
    cond.validate();
    config.validate();
    Layout L = duplicated_layout(config);

    auto res = solve_transmission(L, cond, params, /*angular=*/0.0, /*origin_value_row=*/0.0,
                                  /*frobenius_k=*/0.0, /*jump=*/0.0, params.c_bdry,
                                  -params.gamma, false);
    const Eigen::VectorXd& v = res.sol;

    RadialSolution sol;
    sol.config = config;
    sol.params = params;
    sol.cond = cond;
    const int n = static_cast<int>(config.grid.size());
    const int iface = L.iface;
    sol.values.resize(n);
    for (int i = 0; i <= iface; ++i) sol.values[i] = v[i];
    for (int i = iface + 1; i < n; ++i) sol.values[i] = v[i + 1];
    sol.values.back() = params.c_bdry;  // constrained node holds its datum exactly

    sol.deriv.resize(n);
    for (int i = 0; i < n; ++i) {
        int a, b, c;
        bool core = i <= iface;
        // u is continuous, so shell stencils may include the interface node
        int lob = core ? 0 : iface, hib = core ? iface : n - 1;
        a = std::max(lob, std::min(i - 1, hib - 2));
        b = a + 1; c = a + 2;
        std::vector<double> nds = {config.grid[a], config.grid[b], config.grid[c]};
        auto w = fd_weights(config.grid[i], nds, 1);
        sol.deriv[i] = w[0] * sol.values[a] + w[1] * sol.values[b] + w[2] * sol.values[c];
    }
    sol.du_iface_core = deriv_at(L.x, v, iface, {iface - 2, iface - 1, iface});
    sol.du_iface_shell = deriv_at(L.x, v, iface + 1, {iface + 1, iface + 2, iface + 3});
    sol.deriv[iface] = sol.du_iface_core;

    sol.integral_u = trapezoid_weighted(config.grid, sol.values, params.dim);
    double Ro = config.R_outer;
    // Lambda = (gamma|Omega| - beta int u) / |bdry|; angular measures cancel.
    sol.lambda_serrin = params.gamma * Ro / params.dim -
                        params.beta * sol.integral_u / std::pow(Ro, params.dim - 1);
    return sol;
}

ModeSolution solve_mode_scaled(int k, const RadialSolution& base, const EllipticParams& params,
                               const Conductivity& cond, double jump_scale) {
    if (k < 1) throw std::invalid_argument("solve_mode: k must be >= 1 (perturbations are zero-mean)");
    if (k > k_max_cap) throw std::invalid_argument("solve_mode: k exceeds the supported cap");
    Layout L = duplicated_layout(base.config);
    const int N = params.dim;
    double angular = static_cast<double>(k) * (k + N - 2);
    double jump = (base.du_iface_core - base.du_iface_shell) * jump_scale;

    auto res = solve_transmission(L, cond, params, angular, /*origin_value_row=*/1.0,
                                  /*frobenius_k=*/static_cast<double>(k), jump,
                                  /*bdry_value=*/0.0, /*gamma_load=*/0.0, true);
    const Eigen::VectorXd& v = res.sol;

    ModeSolution mode;
    mode.k = k;
    mode.eig = angular;
    mode.jump_data = jump;
    mode.condition_estimate = res.condest;
    const int n = static_cast<int>(base.config.grid.size());
    const int iface = L.iface;
    mode.values.resize(n);
    for (int i = 0; i <= iface; ++i) mode.values[i] = v[i];
    for (int i = iface + 1; i < n; ++i) mode.values[i] = v[i + 1];
    mode.values.front() = 0.0;  // constrained endpoints hold their data exactly
    mode.values.back() = 0.0;
    mode.ds_iface_core = deriv_at(L.x, v, iface, {iface - 2, iface - 1, iface});
    mode.ds_iface_shell = deriv_at(L.x, v, iface + 1, {iface + 1, iface + 2, iface + 3});
    mode.deriv_at_one = deriv_at(L.x, v, L.m - 1, {L.m - 3, L.m - 2, L.m - 1});
    return mode;
}

ModeSolution solve_mode(int k, const RadialSolution& base, const EllipticParams& params,
                        const Conductivity& cond) {
    return solve_mode_scaled(k, base, params, cond, 1.0);
}

std::vector<InvertibilityEntry> invertibility_report(const RadialSolution& base, int k_max,
                                                     double flag_threshold) {
    if (k_max < 1) throw std::invalid_argument("invertibility_report: k_max must be >= 1");
    if (k_max > k_max_cap) throw std::invalid_argument("invertibility_report: k_max exceeds cap");
    std::vector<InvertibilityEntry> out;
    for (int k = 1; k <= k_max; ++k) {
        ModeSolution m = solve_mode(k, base, base.params, base.cond);
        out.push_back({k, m.deriv_at_one, std::abs(m.deriv_at_one) < flag_threshold,
                       m.condition_estimate});
    }
    return out;
}

namespace {
void csv_rows(std::ostringstream& os, const RadialConfig& cfg, const std::vector<double>& val,
              const std::vector<double>& deriv, double d_core, double d_shell) {
    int iface = cfg.interface_index();
    os << "r,phase,value,derivative\n";
    os << std::setprecision(16);
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        if (static_cast<int>(i) == iface) {
            os << cfg.grid[i] << ",core," << val[i] << "," << d_core << "\n";
            os << cfg.grid[i] << ",shell," << val[i] << "," << d_shell << "\n";
        } else {
            os << cfg.grid[i] << "," << (static_cast<int>(i) < iface ? "core" : "shell") << ","
               << val[i] << "," << deriv[i] << "\n";
        }
    }
}
} // namespace

std::string radial_to_csv(const RadialSolution& sol) {
    std::ostringstream os;
    csv_rows(os, sol.config, sol.values, sol.deriv, sol.du_iface_core, sol.du_iface_shell);
    return os.str();
}

std::string mode_to_csv(const ModeSolution& mode, const RadialConfig& config) {
    std::vector<double> deriv(mode.values.size(), 0.0);
    int iface = config.interface_index();
    int n = static_cast<int>(config.grid.size());
    for (int i = 0; i < n; ++i) {
        bool core = i <= iface;
        // s_k jumps across the interface: shell stencils must stay strictly
        // inside the shell (values[iface] stores the core-side limit)
        int lob = core ? 0 : iface + 1, hib = core ? iface : n - 1;
        int a = std::max(lob, std::min(i - 1, hib - 2));
        std::vector<double> nds = {config.grid[a], config.grid[a + 1], config.grid[a + 2]};
        auto w = fd_weights(config.grid[i], nds, 1);
        deriv[i] = w[0] * mode.values[a] + w[1] * mode.values[a + 1] + w[2] * mode.values[a + 2];
    }
    std::ostringstream os;
    csv_rows(os, config, mode.values, deriv, mode.ds_iface_core, mode.ds_iface_shell);
    return os.str();
}

} // namespace twophase
