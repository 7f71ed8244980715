#include "twophase/shape.hpp"
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twophase {

Residual residual(const Field& field, const Mesh& mesh, const Conductivity& cond, int K) {
    Residual res;
    res.lambda = field.lambda;
    for (std::size_t i = 0; i < field.flux.size(); ++i)
        res.values.push_back((field.flux[i] + field.lambda) * mesh.jtau[i] / cond.sigma_s);
    res.modal = project_modes(res.values, K);
    res.modal_mean = modal_mean(res.values);
    for (double v : res.values) res.sup_norm = std::max(res.sup_norm, std::abs(v));
    return res;
}

std::vector<std::pair<double, double>> apply_frozen_jacobian(
    const Perturbation& p, const std::vector<InvertibilityEntry>& modal_derivs) {
    std::vector<std::pair<double, double>> out;
    for (int k = 1; k <= p.K(); ++k) {
        const auto& entry = modal_derivs.at(k - 1);
        out.push_back({p.modes[k - 1].first * entry.deriv_at_one,
                       p.modes[k - 1].second * entry.deriv_at_one});
    }
    return out;
}

Perturbation apply_inverse_frozen_jacobian(const Residual& res,
                                           const std::vector<InvertibilityEntry>& modal_derivs,
                                           double base_radius) {
    Perturbation p;
    p.base_radius = base_radius;
    for (std::size_t k = 0; k < res.modal.size(); ++k) {
        const auto& entry = modal_derivs.at(k);
        if (entry.flagged)
            throw std::runtime_error("Jacobian not invertible: mode " + std::to_string(entry.k) +
                                     " has vanishing modal derivative");
        p.modes.push_back({res.modal[k].first / entry.deriv_at_one,
                           res.modal[k].second / entry.deriv_at_one});
    }
    return p;
}

NewtonReport newton_solve(const Perturbation& g, const Conductivity& cond,
                          const EllipticParams& params, const NewtonOptions& opts) {
    g.validate();
    if (params.dim != 2)
        throw std::invalid_argument("newton_solve: the nonlinear solve is planar (dim = 2)");

    // frozen modal derivatives s_k'(1) from the radial configuration
    auto config = make_radial_config(opts.R_inner, opts.radial_n, opts.radial_n,
                                     g.base_radius);
    auto base1d = solve_base_radial(params, cond, config);
    auto derivs = invertibility_report(base1d, opts.K);

    NewtonReport report;
    report.lambda0 = std::abs(base1d.lambda_serrin);

    Perturbation f;
    f.base_radius = opts.R_inner;
    f.modes.assign(opts.K, {0.0, 0.0});
    Perturbation best = f;
    double best_sup = 1e300;
    int grow_run = 0;

    for (int n = 0; n < opts.max_iter; ++n) {
        auto map = extend_perturbation(f, g);
        auto mesh = build_mesh(map, opts.resolution);
        auto field = solve_transmission(mesh, cond, params);
        auto res = residual(field, mesh, cond, opts.K);
        ++report.iterations;
        report.residual_history.push_back(res.sup_norm);
        if (report.residual_history.size() > 1) {
            double prev = report.residual_history[report.residual_history.size() - 2];
            report.contraction.push_back(res.sup_norm / prev);
            grow_run = res.sup_norm > prev ? grow_run + 1 : 0;
        }
        if (res.sup_norm < best_sup) {
            best_sup = res.sup_norm;
            best = f;
            report.final_residual = res;
        }
        if (res.sup_norm <= opts.tol * report.lambda0) {
            report.converged = true;
            report.f = f;
            report.final_residual = res;
            return report;
        }
        if (grow_run >= 3)
            throw std::runtime_error(
                "outside IFT neighborhood; reduce the outer perturbation norm");

        auto delta = apply_inverse_frozen_jacobian(res, derivs, opts.R_inner);
        for (int k = 0; k < opts.K; ++k) {
            f.modes[k].first -= delta.modes[k].first;
            f.modes[k].second -= delta.modes[k].second;
        }
    }
    report.f = best;
    return report;
}

namespace {

// quintic ramp equal to 1 (with zero slope) at the interface circle and 0
// (with zero slope) at the inner support radius
double lift_profile(double r, double R) {
    double a = 0.3 * R;
    double x = (r - a) / (R - a);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

} // namespace

Field shape_derivative_direct(const Perturbation& f, const Mesh& mesh,
                              const Conductivity& cond, const EllipticParams& params) {
    // interface jump of the base normal derivative from the radial profile
    auto config = make_radial_config(mesh.R_ref, 2048, 2048);
    auto base1d = solve_base_radial(params, cond, config);
    double jump = base1d.du_iface_core - base1d.du_iface_shell;

    const int n = static_cast<int>(mesh.vertices.size());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    // the lifting lives on core-side nodes; reference and mapped coordinates
    // agree because the base configuration is unperturbed
    for (int i = 0; i < n; ++i) {
        double r = std::hypot(mesh.vertices[i].x, mesh.vertices[i].y);
        if (r > mesh.R_ref + 1e-12) continue;
        double th = std::atan2(mesh.vertices[i].y, mesh.vertices[i].x);
        w[i] = -jump * f.eval(th) * lift_profile(r, mesh.R_ref);
    }

    FemSystem sys = assemble(mesh, cond, params);
    SpMat core = assemble_restricted(mesh, cond, params, 0);
    FemSystem lin;
    lin.A = sys.A;
    lin.F = -(core * w);
    lin.mass_lumped = sys.mass_lumped;
    lin.volume = sys.volume;
    Eigen::VectorXd v = solve_dirichlet(mesh, lin.A, lin.F, 0.0);
    EllipticParams hom = params;
    hom.gamma = 0.0;
    hom.c_bdry = 0.0;
    // boundary rows of the core operator vanish (outer nodes touch only shell
    // triangles, where w = 0), so the trace of v alone carries the flux of u'
    Field out = make_field(mesh, lin, hom, v);
    out.values = v + w;
    out.integral_u = out.values.dot(sys.mass_lumped);
    return out;
}

} // namespace twophase
