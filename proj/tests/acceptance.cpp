// Acceptance suite: one line per criterion, [PASS]/[FAIL] with the measured
// values at the stated tolerances. Returns the number of failed criteria.
#include "twophase/radial.hpp"
#include "twophase/shape.hpp"
#include "twophase/parabolic.hpp"
#include "twophase/laplace.hpp"
#include "twophase/geometry.hpp"
#include "twophase/gridding.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace twophase;

namespace {

constexpr double pi = std::numbers::pi;

int g_failed = 0;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void report(int id, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failed;
}

void run(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, fmt("exception: %s", e.what()));
    }
}

EllipticParams torsion_params(int N = 2) {
    EllipticParams p;
    p.beta = 0.0;
    p.gamma = 1.0;
    p.c_bdry = 0.0;
    p.dim = N;
    return p;
}

Conductivity two_phase() { return {2.0, 1.0, 1.0}; }

Mesh annulus_mesh(int nt, double eps_mode2 = 0.0) {
    Perturbation f, g;
    f.base_radius = 0.5;
    if (eps_mode2 != 0.0) f.modes = {{0.0, 0.0}, {eps_mode2, 0.0}};
    g.base_radius = 1.0;
    return build_mesh(extend_perturbation(f, g), nt);
}

std::vector<double> quarter_ladder(double t_top, double t_floor) {
    std::vector<double> times;
    double q = std::pow(4.0, 1.0 / 8.0);
    for (double t = t_top; t > t_floor; t /= q) times.insert(times.begin(), t);
    return times;
}

double similarity_value(double sigma_l, double sigma_r) {
    return std::sqrt(sigma_r) / (std::sqrt(sigma_l) + std::sqrt(sigma_r));
}

// ---- 1: radial oracles --------------------------------------------------

void criterion1() {
    auto sol = solve_base_radial(torsion_params(), two_phase(), make_radial_config(0.5, 4096, 4096));
    oracle::BaseClosedForm cf{2.0, 1.0, 1.0, 0.5, 0.0, 2};
    double linf = 0.0;
    for (std::size_t i = 0; i < sol.values.size(); ++i)
        linf = std::max(linf, std::abs(sol.values[i] - cf.value(sol.config.grid[i])));

    std::mt19937 rng(20260819);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst_flux = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        Conductivity cond{0.3 + 3.0 * U(rng), 0.3 + 3.0 * U(rng), 1.0};
        auto p = torsion_params(2 + trial % 3);
        p.gamma = 0.5 + 2.0 * U(rng);
        double R = 0.2 + 0.6 * U(rng);
        auto s = solve_base_radial(p, cond, make_radial_config(R, 768, 768));
        worst_flux = std::max(worst_flux,
                              std::abs(cond.sigma_s * s.deriv.back() + p.gamma / p.dim));
    }
    bool pass = linf <= 1e-8 && worst_flux <= 1e-8;
    report(1, pass,
           fmt("torsion closed form Linf = %.2e (tol 1e-8); flux identity worst = %.2e over 5 draws (tol 1e-8)",
               linf, worst_flux));
}

// ---- 2: mode oracle and invertibility -----------------------------------

void criterion2() {
    auto base = solve_base_radial(torsion_params(), two_phase(), make_radial_config(0.5, 4096, 4096));
    auto m1 = solve_mode(1, base, base.params, two_phase());
    double err = std::abs(m1.deriv_at_one + 1.0 / 11.0);

    auto count_flags = [](const std::vector<InvertibilityEntry>& rep) {
        int n = 0;
        for (const auto& e : rep)
            if (e.flagged) ++n;
        return n;
    };
    int flags_distinct = count_flags(invertibility_report(base, 8));
    auto base_eq = solve_base_radial(torsion_params(), Conductivity{1.0, 1.0, 1.0},
                                     make_radial_config(0.5, 2048, 2048));
    int flags_equal = count_flags(invertibility_report(base_eq, 8));

    bool pass = err <= 1e-8 && flags_distinct == 0 && flags_equal == 8;
    report(2, pass,
           fmt("|s1'(1) + 1/11| = %.2e (tol 1e-8); flags k=1..8: %d/8 for sigma_c != sigma_s (want 0), %d/8 for sigma_c == sigma_s (want 8)",
               err, flags_distinct, flags_equal));
}

// ---- 3: counterexample run ----------------------------------------------

struct NewtonSummary {
    bool converged = false;
    int iterations = 0;
    double rel = std::numeric_limits<double>::quiet_NaN();
    NewtonReport rep;
    std::string error;
};

NewtonSummary run_newton(const Perturbation& g, double beta, const NewtonOptions& opts) {
    NewtonSummary s;
    EllipticParams p = torsion_params();
    p.beta = beta;
    try {
        s.rep = newton_solve(g, two_phase(), p, opts);
        s.converged = s.rep.converged;
        s.iterations = s.rep.iterations;
        s.rel = s.rep.final_residual.sup_norm / s.rep.lambda0;
    } catch (const std::exception& e) {
        s.error = e.what();  // iteration left the contraction neighborhood
    }
    return s;
}

double coeff_distance(const Perturbation& a, const Perturbation& b, double scale_b) {
    double d = 0.0;
    std::size_t K = std::max(a.modes.size(), b.modes.size());
    for (std::size_t i = 0; i < K; ++i) {
        double aa = i < a.modes.size() ? a.modes[i].first : 0.0;
        double ab = i < a.modes.size() ? a.modes[i].second : 0.0;
        double ba = i < b.modes.size() ? b.modes[i].first : 0.0;
        double bb = i < b.modes.size() ? b.modes[i].second : 0.0;
        d = std::max(d, std::abs(aa - scale_b * ba));
        d = std::max(d, std::abs(ab - scale_b * bb));
    }
    return d;
}

void criterion3() {
    auto t0 = std::chrono::steady_clock::now();
    auto g = Perturbation::single_mode(2, 0.01, 1.0);

    NewtonOptions stated;  // K = 8, tol = 1e-6, max_iter = 10 (the stated run)
    NewtonOptions robust;  // truncation below the first slowly-divergent band
    robust.K = 6;
    robust.tol = 1e-5;
    robust.max_iter = 60;

    std::string detail;
    bool pass_conv = true, pass_dom = true, pass_sweep = true;
    for (double beta : {0.0, 1.0}) {
        auto head = run_newton(g, beta, stated);
        bool conv = head.converged && head.iterations <= 10 && head.rel <= 1e-6;
        pass_conv = pass_conv && conv;

        auto best = run_newton(g, beta, robust);
        double f2 = best.rep.f.modes.size() >= 2 ? std::abs(best.rep.f.modes[1].first) : 0.0;
        double other = 0.0;
        for (std::size_t i = 0; i < best.rep.f.modes.size(); ++i) {
            if (i != 1) other = std::max(other, std::abs(best.rep.f.modes[i].first));
            other = std::max(other, std::abs(best.rep.f.modes[i].second));
        }
        double dom = other > 0.0 ? f2 / other : 0.0;
        pass_dom = pass_dom && best.converged && dom > 10.0;

        bool sweep_ok = true;
        Perturbation fe[3];
        double eps[3] = {0.02, 0.01, 0.005};
        for (int i = 0; i < 3; ++i) {
            auto sw = run_newton(Perturbation::single_mode(2, eps[i], 1.0), beta, robust);
            sweep_ok = sweep_ok && sw.converged;
            fe[i] = sw.rep.f;
        }
        double d1 = coeff_distance(fe[0], fe[1], 2.0);
        double d2 = coeff_distance(fe[1], fe[2], 2.0);
        double slope = std::log(d1 / d2) / std::log(2.0);
        pass_sweep = pass_sweep && sweep_ok && std::abs(slope - 2.0) <= 0.3;

        std::string head_state = head.converged ? "yes" : (head.error.empty() ? "no" : "no (diverged)");
        detail += fmt("beta=%g: converged=%s rel=%.1e its=%d (need <=1e-6 in <=10); dominance %.2fx (need >10x); sweep slope %.2f (need 2+-0.3).  ",
                      beta, head_state.c_str(), head.rel, head.iterations, dom, slope);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass_time = secs <= 600.0;
    detail += fmt("runtime %.0fs (cap 600s)", secs);
    report(3, pass_conv && pass_dom && pass_sweep && pass_time, detail);
}

// ---- 4: shape-derivative cross-check ------------------------------------

void criterion4() {
    Perturbation ann_f, ann_g;
    ann_f.base_radius = 0.5;
    ann_g.base_radius = 1.0;
    Mesh mesh = build_mesh(extend_perturbation(ann_f, ann_g), 128);
    auto base = solve_base_radial(torsion_params(), two_phase(), make_radial_config(0.5, 4096, 4096));
    double worst = 0.0;
    for (int k : {1, 2, 3}) {
        auto f = Perturbation::single_mode(k, 1.0, 0.5);
        auto up = shape_derivative_direct(f, mesh, two_phase(), torsion_params());
        auto mode = solve_mode(k, base, base.params, two_phase());
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < up.flux.size(); ++j) {
            double want = mode.deriv_at_one * std::cos(k * mesh.theta[j]);
            num += (up.flux[j] - want) * (up.flux[j] - want);
            den += want * want;
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    report(4, worst <= 0.02,
           fmt("direct flux vs modal prediction: worst relative L2 over k=1..3 is %.3f%% (tol 2%%)",
               100.0 * worst));
}

// ---- 5: flat-interface similarity value ---------------------------------

void criterion5() {
    double worst = 0.0;
    for (auto [sl, sr] : {std::pair{1.0, 4.0}, {4.0, 1.0}, {1.0, 1.0}}) {
        double target = similarity_value(sl, sr);
        auto field = simulate1d(flat_cauchy_problem(sl, sr, 1e-6, 1.0, 16));
        for (std::size_t j = 0; j < field.times.size(); ++j) {
            if (field.times[j] < 1e-4) continue;
            worst = std::max(worst, std::abs(field.interface_value(0.0, (int)j) - target));
        }
    }
    report(5, worst <= 1e-3,
           fmt("worst |u(0,t) - similarity value| = %.2e over pairs (1,4),(4,1),(1,1), t in [1e-4,1] (tol 1e-3)",
               worst));
}

// ---- 6: tangent-ball heat-content ratio ---------------------------------

void criterion6() {
    Conductivity one{1.0, 1.0, 1.0};
    double t_top = 4e-3;
    auto times = quarter_ladder(t_top, 1.2e-6);
    auto prob = radial_cauchy_problem(one, 2, 0.5, times.front(), t_top, 8, 5e-4, 4e-3);
    prob.times = times;
    auto field = simulate1d(prob);
    int j0 = field.time_index(t_top);
    int j1 = field.time_index(t_top / 4);
    int j2 = field.time_index(t_top / 16);

    double lim[2];
    bool clean = true;
    int idx = 0;
    for (double rad : {0.2, 0.3}) {
        auto cs = heat_content_radial(field, 1.0 - rad, rad, 240);
        auto rich = richardson_sqrt(cs.rescaled[j0], cs.rescaled[j1], cs.rescaled[j2]);
        clean = clean && !rich.flagged && rich.limit > 0.0;
        lim[idx++] = rich.limit;
    }
    double want = std::sqrt(7.0 / 12.0);
    double ratio = lim[0] / lim[1];
    double rel = std::abs(ratio - want) / want;
    report(6, clean && rel <= 0.05,
           fmt("rescaled content ratio %.4f vs sqrt(7/12) = %.4f, rel err %.2f%% (tol 5%%)%s",
               ratio, want, 100.0 * rel, clean ? "" : "; Richardson flagged"));
}

// ---- 7: constant-flow equivalence ---------------------------------------

void criterion7() {
    Conductivity cond = two_phase();
    auto times = geometric_times(1e-3, std::pow(500.0, 1.0 / 24.0), 24);
    auto radial_field = simulate2d(annulus_mesh(96), cond, times);
    auto bent_field = simulate2d(annulus_mesh(96, 0.05), cond, times);

    auto scaled_spread = [](const HeatField2D& f, double rho) {
        auto tr = flux_trace(f, rho);
        double worst = 0.0;
        for (std::size_t j = 0; j < tr.times.size(); ++j)
            worst = std::max(worst, tr.spread[j] / std::abs(tr.d_mean[j]));
        return worst;
    };
    auto moment_mismatch = [](const HeatField2D& f, double* scale_out) {
        BalanceMoment ref;
        double worst = 0.0, scale = 0.0;
        for (int k = 0; k < 8; ++k) {
            double th = 2.0 * pi * k / 8;
            auto bm = balance_moment(f, Vec2{0.75 * std::cos(th), 0.75 * std::sin(th)},
                                     Vec2{std::cos(th), std::sin(th)}, 0.12);
            if (k == 0) {
                ref = bm;
                for (double v : bm.moment) scale = std::max(scale, std::abs(v));
                continue;
            }
            for (std::size_t j = 0; j < bm.times.size(); ++j)
                worst = std::max(worst, std::abs(bm.moment[j] - ref.moment[j]));
        }
        *scale_out = scale;
        return worst;
    };

    double spread_tol = 1e-6;
    double radial_spread = std::max(scaled_spread(radial_field, 1.0),
                                    scaled_spread(radial_field, 0.8));
    double bent_spread = scaled_spread(bent_field, 1.0);
    double radial_scale = 0.0, bent_scale = 0.0;
    double radial_mm = moment_mismatch(radial_field, &radial_scale);
    double bent_mm = moment_mismatch(bent_field, &bent_scale);

    bool pass = radial_spread <= spread_tol && radial_mm <= 1e-10 * radial_scale &&
                bent_spread > 10.0 * spread_tol && bent_mm > 10.0 * (1e-10 * bent_scale);
    report(7, pass,
           fmt("radial: spread %.1e (tol 1e-6), moment mismatch %.1e (tol %.1e); mode-2 eps=0.05: spread %.1e (need > 1e-5), mismatch %.1e (need > %.1e)",
               radial_spread, radial_mm, 1e-10 * radial_scale, bent_spread, bent_mm,
               1e-9 * bent_scale));
}

// ---- 8: transformed parabolic vs direct elliptic ------------------------

void criterion8() {
    Conductivity cond = two_phase();
    auto field = simulate1d(radial_dirichlet_problem(cond, 2, 0.5, 1e-6, 16.0, 32, 5e-4, 2e-3));
    auto w = transform_field(field, 1.0);

    EllipticParams p = torsion_params();
    p.beta = 1.0;  // resolvent problem: v = 1 - w solves div(sigma grad v) = v - 1
    auto v = solve_base_radial(p, cond, make_radial_config(0.5, 500, 5000));
    // interpolate v on its own grid (node at the interface, so the derivative
    // kink never falls inside an interpolation cell) and compare at the
    // transformed field's sample radii
    const auto& vg = v.config.grid;
    auto v_at = [&](double r) {
        auto it = std::upper_bound(vg.begin(), vg.end(), r);
        if (it == vg.begin()) return v.values.front();
        if (it == vg.end()) return v.values.back();
        std::size_t i = (std::size_t)(it - vg.begin());
        double s = (r - vg[i - 1]) / (vg[i] - vg[i - 1]);
        return (1.0 - s) * v.values[i - 1] + s * v.values[i];
    };
    double sup = 0.0;
    for (std::size_t i = 0; i < w.r.size(); ++i)
        sup = std::max(sup, std::abs(1.0 - w.w[i] - v_at(w.r[i])));
    report(8, sup <= 1e-4,
           fmt("sup |1 - w(.,1) - v| = %.2e on the two-phase radial configuration (tol 1e-4)", sup));
}

// ---- 9: flux asymptotics and barrier sandwich ---------------------------

void criterion9() {
    Conductivity one{1.0, 1.0, 1.0};
    auto cfg = make_radial_config(0.5, 500, 10000);

    double cerr[2];
    bool fit_ok = true;
    int idx = 0;
    for (int dim : {2, 3}) {
        std::vector<LaplaceField> sweep;
        for (double lambda : {100.0, 400.0, 1600.0, 6400.0})
            sweep.push_back(solve_elliptic_lambda(cfg, one, lambda, dim));
        auto fit = flux_asymptotics(sweep);
        double target = -(dim - 1) / 2.0;
        cerr[idx++] = std::abs(fit.c_inf - target) / std::abs(target);
        fit_ok = fit_ok && !fit.flagged;
    }

    auto sandwich_margin = [&](const BarrierData& b, const Conductivity& cond, int dim) {
        double margin = 1.0;
        for (double mult : {1.0, 2.0, 4.0}) {
            double lambda = mult * b.lambda0;
            auto f = solve_elliptic_lambda(cfg, cond, lambda, dim);
            for (double d : b.stations) {
                auto bv = barrier_profile(b, d, lambda);
                double w = f.sample(b.rho - d);
                margin = std::min(margin, std::min(w - bv.w_minus, bv.w_plus - w));
            }
        }
        return margin;
    };
    auto b2 = make_barrier_data(2, two_phase(), 0.5);
    auto b3 = make_barrier_data(3, one, 0.5);
    double m2 = sandwich_margin(b2, two_phase(), 2);
    double m3 = sandwich_margin(b3, one, 3);

    bool pass = fit_ok && cerr[0] <= 0.02 && cerr[1] <= 0.02 && m2 > 0.0 && m3 > 0.0;
    report(9, pass,
           fmt("c_inf rel err: disk %.2f%%, sphere %.2f%% (tol 2%%); sandwich min margin at lambda in {l0,2l0,4l0}: disk %.1e (l0=%g), sphere %.1e (l0=%g)",
               100.0 * cerr[0], 100.0 * cerr[1], m2, b2.lambda0, m3, b3.lambda0));
}

// ---- 10: moment expansion -----------------------------------------------

void criterion10() {
    double errs[2];
    bool clean = true;
    int idx = 0;
    for (double rho : {1.0, 2.0}) {
        std::vector<double> radii = rho == 1.0 ? std::vector<double>{0.2, 0.1, 0.05}
                                               : std::vector<double>{0.4, 0.2, 0.1};
        auto fit = fit_moment_expansion(Boundary::circle(rho), 0.3, radii);
        clean = clean && !fit.flagged;
        double r = fit.radii.back();
        double lead = 2.0 * r * r * r / 3.0;
        double c_fin = (1.0 - fit.moments.back() / lead) * 40.0 / (r * r);
        errs[idx++] = std::abs(c_fin - 3.0 / (rho * rho)) / (3.0 / (rho * rho));
    }
    auto cd = curvatures(Boundary::ellipse_radial(2.0, 1.0), 32, 0.4);
    double cmin = 1e300, cmax = -1e300;
    for (const auto& s : cd.samples) {
        cmin = std::min(cmin, s.C);
        cmax = std::max(cmax, s.C);
    }
    double spread = (cmax - cmin) / cmax;

    bool pass = clean && errs[0] <= 0.03 && errs[1] <= 0.03 && spread > 0.2;
    report(10, pass,
           fmt("C at finest r: rho=1 rel err %.2f%%, rho=2 rel err %.2f%% (tol 3%%); ellipse C spread %.0f%% across samples (need > 20%%)",
               100.0 * errs[0], 100.0 * errs[1], 100.0 * spread));
}

}  // namespace

int main() {
    run(1, criterion1);
    run(2, criterion2);
    run(3, criterion3);
    run(4, criterion4);
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(8, criterion8);
    run(9, criterion9);
    run(10, criterion10);
    std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failed);
    return g_failed;
}
