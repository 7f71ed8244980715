// Batch front-end: every experiment is a subcommand emitting tidy CSV plus a
// manifest.json (inputs, grid sizes, tolerances, checksummed artifact list).
// Exit codes: 0 success, 1 numerical failure (report still written), 2 usage
// or config error.
#include <CLI11.hpp>
#include <json.hpp>
#include "twophase/fourier.hpp"
#include "twophase/geometry.hpp"
#include "twophase/gridding.hpp"
#include "twophase/io.hpp"
#include "twophase/laplace.hpp"
#include "twophase/mesh.hpp"
#include "twophase/parabolic.hpp"
#include "twophase/radial.hpp"
#include "twophase/shape.hpp"
#include <cmath>
#include <iostream>
#include <numbers>
#include <regex>
#include <string>
#include <vector>

namespace {

using namespace twophase;
using nlohmann::json;
constexpr double pi = std::numbers::pi;

// Accepts "A*cos(kθ)", "A*sin(k*theta)" and friends; the perturbation is a
// single Fourier mode of the named amplitude.
Perturbation parse_mode_expr(const std::string& expr, double base_radius) {
    static const std::regex pat(
        R"(^\s*([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*\*\s*(cos|sin)\s*\(\s*([0-9]+)\s*\*?\s*(?:θ|theta|t)?\s*\)\s*$)");
    std::smatch m;
    if (!std::regex_match(expr, m, pat))
        throw std::invalid_argument("cannot parse perturbation expression '" + expr +
                                    "' (expected e.g. \"0.01*cos(2θ)\")");
    double amp = std::stod(m[1].str());
    int k = std::stoi(m[3].str());
    return Perturbation::single_mode(k, amp, base_radius, m[2].str() == "sin");
}

std::vector<double> sim_times(double t0, double T, int steps_per_decade) {
    int m = (int)std::ceil(std::log10(T / t0) * steps_per_decade);
    auto times = geometric_times(t0, std::pow(T / t0, 1.0 / m), m);
    times.back() = T;
    return times;
}

std::vector<double> quarter_ladder(double t_top, double t_floor) {
    std::vector<double> times;
    double q = std::pow(4.0, 1.0 / 8.0);
    for (double t = t_top; t > t_floor; t /= q) times.insert(times.begin(), t);
    return times;
}

// ---------------------------------------------------------------- radial ---

struct RadialOpts {
    int dim = 2, kmax = 8, n_core = 600, n_shell = 600;
    double sigma_c = 2.0, sigma_s = 1.0, beta = 0.0, gamma = 1.0, r = 0.5;
    std::string out = "out/radial";
};

int run_radial(const RadialOpts& o) {
    Conductivity cond{o.sigma_c, o.sigma_s, 1.0};
    cond.validate();
    EllipticParams params{o.beta, o.gamma, 0.0, o.dim};
    params.validate();
    auto cfg = make_radial_config(o.r, o.n_core, o.n_shell);
    cfg.validate();

    auto base = solve_base_radial(params, cond, cfg);
    auto entries = invertibility_report(base, o.kmax);

    ArtifactWriter w(o.out, "radial");
    json config{{"dim", o.dim},   {"sigma_c", o.sigma_c}, {"sigma_s", o.sigma_s},
                {"beta", o.beta}, {"gamma", o.gamma},     {"r", o.r},
                {"kmax", o.kmax}, {"n_core", o.n_core},   {"n_shell", o.n_shell}};
    w.set_config(config);
    w.inputs() = config;
    w.grids() = {{"n_core", o.n_core}, {"n_shell", o.n_shell}};
    w.tolerances() = {{"flag_threshold", 1e-8}};

    w.write("base.csv", radial_to_csv(base));

    CsvTable modes;
    modes.columns = {"k", "sk_prime_1", "flagged", "condition_estimate"};
    for (const auto& e : entries)
        modes.add_row({std::to_string(e.k), format_number(e.deriv_at_one),
                       e.flagged ? "1" : "0", format_number(e.condition_estimate)});
    w.write("modes.csv", modes.str());

    json summary{{"lambda_serrin", base.lambda_serrin},
                 {"integral_u", base.integral_u},
                 {"du_iface_core", base.du_iface_core},
                 {"du_iface_shell", base.du_iface_shell}};
    w.write("summary.json", summary.dump(2) + "\n");
    w.finalize();
    return 0;
}

// -------------------------------------------------------- counterexample ---

struct CounterOpts {
    std::string g_expr;
    int K = 6, max_iter = 60, resolution = 96, radial_n = 2048;
    double tol = 1e-5, r = 0.5;
    double sigma_c = 2.0, sigma_s = 1.0, beta = 0.0, gamma = 1.0;
    std::string out = "out/counterexample";
};

int run_counterexample(const CounterOpts& o) {
    Conductivity cond{o.sigma_c, o.sigma_s, 1.0};
    cond.validate();
    EllipticParams params{o.beta, o.gamma, 0.0, 2};
    params.validate();
    auto g = parse_mode_expr(o.g_expr, 1.0);
    g.validate();

    NewtonOptions opts;
    opts.K = o.K;
    opts.tol = o.tol;
    opts.max_iter = o.max_iter;
    opts.resolution = o.resolution;
    opts.R_inner = o.r;
    opts.radial_n = o.radial_n;
    auto report = newton_solve(g, cond, params, opts);

    ArtifactWriter w(o.out, "counterexample");
    json config{{"g", o.g_expr},       {"K", o.K},
                {"tol", o.tol},        {"max_iter", o.max_iter},
                {"resolution", o.resolution}, {"radial_n", o.radial_n},
                {"r", o.r},            {"sigma_c", o.sigma_c},
                {"sigma_s", o.sigma_s},{"beta", o.beta},
                {"gamma", o.gamma}};
    w.set_config(config);
    w.inputs() = config;
    w.grids() = {{"resolution", o.resolution}, {"radial_n", o.radial_n}};
    w.tolerances() = {{"tol", o.tol}, {"max_iter", o.max_iter}};

    CsvTable hist;
    hist.columns = {"iteration", "sup_residual", "contraction"};
    for (std::size_t j = 0; j < report.residual_history.size(); ++j)
        hist.add_row({std::to_string(j), format_number(report.residual_history[j]),
                      j ? format_number(report.contraction[j - 1]) : std::string()});
    w.write("residuals.csv", hist.str());

    CsvTable iface;
    iface.columns = {"theta", "displacement"};
    for (int j = 0; j < 256; ++j) {
        double th = 2.0 * pi * j / 256.0;
        iface.add_row({th, report.f.eval(th)});
    }
    w.write("interface.csv", iface.str());

    json modes = json::array();
    for (const auto& [a, b] : report.f.modes) modes.push_back({a, b});
    json rep{{"converged", report.converged},
             {"iterations", report.iterations},
             {"lambda0", report.lambda0},
             {"residual_history", report.residual_history},
             {"contraction", report.contraction},
             {"final_sup_residual", report.residual_history.back()},
             {"f_modes", modes},
             {"g", o.g_expr}};
    w.write("report.json", rep.dump(2) + "\n");
    w.finalize();
    return report.converged ? 0 : 1;
}

// --------------------------------------------------------------- heatsim ---

struct HeatsimOpts {
    bool planar = false;
    // radial lab
    int dim = 2, spd = 16;
    double sigma_c = 2.0, sigma_s = 1.0, sigma_m = 1.0, r = 0.5;
    double t0 = 1e-5, T = 1.0, h_bdry = 1e-3, h_max = 6e-3;
    std::string kind = "dirichlet";
    // planar lab
    int nt = 64, mode = 2, spd_planar = 12;
    double eps = 0.0, rho_trace = 0.75, t0_planar = 1e-3, T_planar = 4.0;
    std::string out = "out/heatsim";
};

int run_heatsim(const HeatsimOpts& o) {
    Conductivity cond{o.sigma_c, o.sigma_s, o.sigma_m};
    cond.validate();
    ArtifactWriter w(o.out, "heatsim");

    if (!o.planar) {
        auto prob = o.kind == "dirichlet"
                        ? radial_dirichlet_problem(cond, o.dim, o.r, o.t0, o.T, o.spd,
                                                   o.h_bdry, o.h_max)
                        : radial_cauchy_problem(cond, o.dim, o.r, o.t0, o.T, o.spd,
                                                o.h_bdry, o.h_max);
        auto field = simulate1d(prob);

        json config{{"planar", false}, {"dim", o.dim},       {"kind", o.kind},
                    {"sigma_c", o.sigma_c}, {"sigma_s", o.sigma_s}, {"sigma_m", o.sigma_m},
                    {"r", o.r},        {"t0", o.t0},         {"T", o.T},
                    {"spd", o.spd},    {"h_bdry", o.h_bdry}, {"h_max", o.h_max}};
        w.set_config(config);
        w.inputs() = config;
        w.grids() = {{"cells", field.centers.size()}, {"steps", field.times.size()}};
        w.tolerances() = json::object();

        CsvTable flux;
        flux.columns = {"t", "d"};
        auto d = field.boundary_flux();
        for (std::size_t j = 0; j < field.times.size(); ++j)
            flux.add_row({field.times[j], d[j]});
        w.write("flux.csv", flux.str());

        CsvTable prof;
        prof.columns = {"r", "u"};
        for (std::size_t i = 0; i < field.centers.size(); ++i)
            prof.add_row({field.centers[i], field.values.back()[i]});
        w.write("profile.csv", prof.str());

        CsvTable mass;
        mass.columns = {"t", "mass"};
        auto ms = field.mass();
        for (std::size_t j = 0; j < field.times.size(); ++j)
            mass.add_row({field.times[j], ms[j]});
        w.write("mass.csv", mass.str());
        w.finalize();
        return 0;
    }

    Perturbation f, g;
    f.base_radius = o.r;
    g.base_radius = 1.0;
    if (o.eps != 0.0) f = Perturbation::single_mode(o.mode, o.eps, o.r);
    Mesh mesh = build_mesh(extend_perturbation(f, g), o.nt);
    auto times = sim_times(o.t0_planar, o.T_planar, o.spd_planar);
    auto field = simulate2d(mesh, cond, times);

    json config{{"planar", true},  {"nt", o.nt},   {"eps", o.eps},
                {"mode", o.mode},  {"sigma_c", o.sigma_c}, {"sigma_s", o.sigma_s},
                {"r", o.r},        {"t0", o.t0_planar},    {"T", o.T_planar},
                {"spd", o.spd_planar}, {"rho_trace", o.rho_trace}};
    w.set_config(config);
    w.inputs() = config;
    w.grids() = {{"nt", o.nt}, {"vertices", mesh.vertices.size()}, {"steps", times.size()}};
    w.tolerances() = json::object();

    auto tr = flux_trace(field, o.rho_trace);
    CsvTable trace;
    trace.columns = {"t", "theta", "flux"};
    for (std::size_t j = 0; j < tr.times.size(); ++j)
        for (std::size_t i = 0; i < tr.theta.size(); ++i)
            trace.add_row({tr.times[j], tr.theta[i], tr.flux[j][i]});
    w.write("trace.csv", trace.str());

    CsvTable summary;
    summary.columns = {"t", "d_mean", "spread"};
    for (std::size_t j = 0; j < tr.times.size(); ++j)
        summary.add_row({tr.times[j], tr.d_mean[j], tr.spread[j]});
    w.write("summary.csv", summary.str());

    CsvTable moments;
    moments.columns = {"t", "point", "moment"};
    // ball centers halfway between the (possibly bulged) interface and the rim
    double r_if = o.r + std::abs(o.eps);
    double p_rad = 0.5 * (r_if + 1.0);
    double ball = 0.8 * std::min(p_rad - r_if, 1.0 - p_rad);
    for (int i = 0; i < 8; ++i) {
        double th = 2.0 * pi * i / 8.0;
        Vec2 p{p_rad * std::cos(th), p_rad * std::sin(th)};
        Vec2 nu{std::cos(th), std::sin(th)};
        auto bm = balance_moment(field, p, nu, ball);
        for (std::size_t j = 0; j < bm.times.size(); ++j)
            moments.add_row({format_number(bm.times[j]), std::to_string(i),
                             format_number(bm.moment[j])});
    }
    w.write("moments.csv", moments.str());
    w.finalize();
    return 0;
}

// ----------------------------------------------------------- asymptotics ---

struct AsymptoticsOpts {
    double t_top = 4e-3, t_floor = 1.2e-6, r1 = 0.2, r2 = 0.3, r_core = 0.5;
    double sigma_c = 1.0, sigma_s = 1.0, sigma_m = 1.0, h_bdry = 5e-4;
    int spd = 8, n_quad = 240;
    std::string out = "out/asymptotics";
};

int run_asymptotics(const AsymptoticsOpts& o) {
    Conductivity cond{o.sigma_c, o.sigma_s, o.sigma_m};
    cond.validate();
    auto times = quarter_ladder(o.t_top, o.t_floor);
    auto prob = radial_cauchy_problem(cond, 2, o.r_core, times.front(), o.t_top, o.spd,
                                      o.h_bdry, 4e-3);
    prob.times = times;
    auto field = simulate1d(prob);

    int j0 = field.time_index(o.t_top);
    int j1 = field.time_index(o.t_top / 4.0);
    int j2 = field.time_index(o.t_top / 16.0);

    ArtifactWriter w(o.out, "asymptotics");
    json config{{"t_top", o.t_top}, {"t_floor", o.t_floor}, {"r1", o.r1},
                {"r2", o.r2},       {"r_core", o.r_core},   {"sigma_c", o.sigma_c},
                {"sigma_s", o.sigma_s}, {"sigma_m", o.sigma_m}, {"spd", o.spd}};
    w.set_config(config);
    w.inputs() = config;
    w.grids() = {{"cells", field.centers.size()}, {"steps", field.times.size()},
                 {"n_quad", o.n_quad}};
    w.tolerances() = json::object();

    // both balls tangent to the unit rim from inside
    auto c1 = heat_content_radial(field, 1.0 - o.r1, o.r1, o.n_quad);
    auto c2 = heat_content_radial(field, 1.0 - o.r2, o.r2, o.n_quad);

    CsvTable table;
    table.columns = {"t", "rescaled_r1", "rescaled_r2", "ratio"};
    for (std::size_t j = 0; j < field.times.size(); ++j)
        table.add_row({field.times[j], c1.rescaled[j], c2.rescaled[j],
                       c2.rescaled[j] != 0.0 ? c1.rescaled[j] / c2.rescaled[j] : 0.0});
    w.write("content.csv", table.str());

    auto rich1 = richardson_sqrt(c1.rescaled[j0], c1.rescaled[j1], c1.rescaled[j2]);
    auto rich2 = richardson_sqrt(c2.rescaled[j0], c2.rescaled[j1], c2.rescaled[j2]);
    double ratio = rich1.limit / rich2.limit;
    double target = std::sqrt((1.0 / o.r2 - 1.0) / (1.0 / o.r1 - 1.0));
    json rep{{"richardson_r1", {{"limit", rich1.limit}, {"flagged", rich1.flagged}}},
             {"richardson_r2", {{"limit", rich2.limit}, {"flagged", rich2.flagged}}},
             {"ratio", ratio},
             {"target", target},
             {"rel_err", std::abs(ratio - target) / target}};
    w.write("fit.json", rep.dump(2) + "\n");
    w.finalize();
    return (rich1.flagged || rich2.flagged) ? 1 : 0;
}

// --------------------------------------------------------------- laplace ---

struct LaplaceOpts {
    int dim = 2, n_core = 500, n_shell = 10000, spd = 32;
    double sigma_c = 2.0, sigma_s = 1.0, r = 0.5;
    double transform_lambda = 0.0, t0 = 1e-6, T = 16.0;
    std::vector<double> lambdas = {100.0, 400.0, 1600.0, 6400.0};
    std::string out = "out/laplace";
};

int run_laplace(const LaplaceOpts& o) {
    Conductivity cond{o.sigma_c, o.sigma_s, 1.0};
    cond.validate();
    auto cfg = make_radial_config(o.r, o.n_core, o.n_shell);
    cfg.validate();

    std::vector<LaplaceField> sweep;
    for (double lambda : o.lambdas)
        sweep.push_back(solve_elliptic_lambda(cfg, cond, lambda, o.dim));
    auto fit = flux_asymptotics(sweep);

    std::vector<double> x(fit.lambdas.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = 1.0 / std::sqrt(fit.lambdas[j]);
    auto ci = fit_confidence(x, fit.deficit, fit.c_inf, fit.slope);
    double target = -0.5 * (o.dim - 1);  // -(1/2) sum of curvatures of the unit sphere

    ArtifactWriter w(o.out, "laplace");
    json config{{"dim", o.dim},       {"sigma_c", o.sigma_c}, {"sigma_s", o.sigma_s},
                {"r", o.r},           {"lambdas", o.lambdas}, {"n_core", o.n_core},
                {"n_shell", o.n_shell}, {"transform_lambda", o.transform_lambda}};
    w.set_config(config);
    w.inputs() = config;
    w.grids() = {{"n_core", o.n_core}, {"n_shell", o.n_shell}};
    w.tolerances() = {{"fit_target_rel", 0.02}};

    CsvTable table;
    table.columns = {"lambda", "d0", "deficit", "fitted_c_inf", "target"};
    for (std::size_t j = 0; j < fit.lambdas.size(); ++j)
        table.add_row({fit.lambdas[j], sweep[j].d0, fit.deficit[j], fit.c_inf, target});
    w.write("asymptotics.csv", table.str());

    json rep{{"c_inf", fit.c_inf},
             {"slope", fit.slope},
             {"max_residual", fit.max_residual},
             {"flagged", fit.flagged},
             {"ci95_c_inf", ci.intercept},
             {"ci95_slope", ci.slope},
             {"target", target},
             {"rel_err", std::abs(fit.c_inf - target) / std::abs(target)}};
    w.write("fit.json", rep.dump(2) + "\n");

    if (o.transform_lambda > 0.0) {
        auto prob = radial_dirichlet_problem(cond, o.dim, o.r, o.t0, o.T, o.spd, 5e-4, 2e-3);
        auto field = simulate1d(prob);
        auto wt = transform_field(field, o.transform_lambda);
        auto wd = solve_elliptic_lambda(cfg, cond, o.transform_lambda, o.dim);
        double sup = 0.0;
        CsvTable commute;
        commute.columns = {"r", "w_transformed", "w_direct"};
        for (std::size_t i = 0; i < wt.r.size(); ++i) {
            double direct = wd.sample(wt.r[i]);
            sup = std::max(sup, std::abs(wt.w[i] - direct));
            commute.add_row({wt.r[i], wt.w[i], direct});
        }
        w.write("commute.csv", commute.str());
        json tf{{"lambda", o.transform_lambda},
                {"sup_diff", sup},
                {"d0_transformed", wt.d0},
                {"d0_direct", wd.d0},
                {"tail_bound", wt.tail_bound}};
        w.write("transform.json", tf.dump(2) + "\n");
    }
    w.finalize();
    return fit.flagged ? 1 : 0;
}

// -------------------------------------------------------------- geometry ---

struct GeometryOpts {
    std::string shape = "circle";
    double rho = 1.0, a = 1.3, b = 0.8, r_ball = 0.05, t_p = 0.3;
    int samples = 16;
    std::vector<double> radii = {0.4, 0.3, 0.2, 0.15, 0.1};
    std::string out = "out/geometry";
};

int run_geometry(const GeometryOpts& o) {
    Boundary bd = o.shape == "circle" ? Boundary::circle(o.rho) : Boundary::ellipse(o.a, o.b);
    auto cd = curvatures(bd, o.samples, o.r_ball);

    ArtifactWriter w(o.out, "geometry");
    json config{{"shape", o.shape}, {"rho", o.rho},   {"a", o.a},
                {"b", o.b},         {"r_ball", o.r_ball}, {"t_p", o.t_p},
                {"samples", o.samples}, {"radii", o.radii}};
    w.set_config(config);
    w.inputs() = config;
    w.grids() = {{"samples", o.samples}};
    w.tolerances() = json::object();

    w.write("samples.csv", curvature_to_csv(cd));

    auto mf = fit_moment_expansion(bd, o.t_p, o.radii);
    CsvTable table;
    table.columns = {"r", "moment", "fit_residual"};
    for (std::size_t j = 0; j < mf.radii.size(); ++j)
        table.add_row({mf.radii[j], mf.moments[j], mf.fit_residuals[j]});
    w.write("moments.csv", table.str());

    json rep{{"C_extracted", mf.C_extracted}, {"flagged", mf.flagged}};
    if (o.shape == "circle") {
        rep["target"] = 3.0 / (o.rho * o.rho);
        rep["rel_err"] = std::abs(mf.C_extracted - 3.0 / (o.rho * o.rho)) /
                         (3.0 / (o.rho * o.rho));
    }
    w.write("fit.json", rep.dump(2) + "\n");
    w.finalize();
    return mf.flagged ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-phase conductor laboratory: radial solves, interface iteration, "
                 "heat simulation, short-time asymptotics, rate-domain fits, geometry"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI file with [subcommand] sections; flags override");
    app.allow_config_extras(CLI::config_extras_mode::error);

    RadialOpts ro;
    auto* radial = app.add_subcommand("radial", "base transmission solve + mode table");
    radial->footer("emits base.csv (r,phase,value,derivative), modes.csv "
                   "(k,sk_prime_1,flagged,condition_estimate), summary.json, manifest.json");
    radial->add_option("--n", ro.dim, "space dimension")->check(CLI::Range(2, 3));
    radial->add_option("--sigma-c", ro.sigma_c, "core conductivity")->check(CLI::PositiveNumber);
    radial->add_option("--sigma-s", ro.sigma_s, "shell conductivity")->check(CLI::PositiveNumber);
    radial->add_option("--beta", ro.beta, "zeroth-order coefficient")
        ->check(CLI::NonNegativeNumber);
    radial->add_option("--gamma", ro.gamma, "source strength")->check(CLI::PositiveNumber);
    radial->add_option("--r", ro.r, "interface radius")->check(CLI::Range(0.0, 1.0));
    radial->add_option("--kmax", ro.kmax, "highest linearized mode")->check(CLI::Range(1, 64));
    radial->add_option("--n-core", ro.n_core, "core grid cells")->check(CLI::PositiveNumber);
    radial->add_option("--n-shell", ro.n_shell, "shell grid cells")->check(CLI::PositiveNumber);
    radial->add_option("--out", ro.out, "output directory");

    CounterOpts co;
    auto* counter = app.add_subcommand("counterexample", "frozen-derivative interface iteration");
    counter->footer("emits residuals.csv (iteration,sup_residual,contraction), interface.csv "
                    "(theta,displacement), report.json, manifest.json");
    counter->add_option("--g", co.g_expr, "outer perturbation, e.g. \"0.01*cos(2θ)\"")
        ->required();
    counter->add_option("--kmax", co.K, "modal truncation")->check(CLI::Range(1, 64));
    counter->add_option("--tol", co.tol, "relative residual target")->check(CLI::PositiveNumber);
    counter->add_option("--max-iter", co.max_iter, "iteration cap")->check(CLI::PositiveNumber);
    counter->add_option("--resolution", co.resolution, "angular mesh resolution")
        ->check(CLI::PositiveNumber);
    counter->add_option("--radial-n", co.radial_n, "1D resolution for the frozen derivative")
        ->check(CLI::PositiveNumber);
    counter->add_option("--r", co.r, "reference interface radius")->check(CLI::Range(0.0, 1.0));
    counter->add_option("--sigma-c", co.sigma_c, "core conductivity")
        ->check(CLI::PositiveNumber);
    counter->add_option("--sigma-s", co.sigma_s, "shell conductivity")
        ->check(CLI::PositiveNumber);
    counter->add_option("--beta", co.beta, "zeroth-order coefficient")
        ->check(CLI::NonNegativeNumber);
    counter->add_option("--gamma", co.gamma, "source strength")->check(CLI::PositiveNumber);
    counter->add_option("--out", co.out, "output directory");

    HeatsimOpts ho;
    auto* heatsim = app.add_subcommand("heatsim", "parabolic simulation + flux diagnostics");
    heatsim->footer("radial: flux.csv (t,d), profile.csv (r,u), mass.csv (t,mass); planar: "
                    "trace.csv (t,theta,flux), summary.csv (t,d_mean,spread), moments.csv "
                    "(t,point,moment); manifest.json");
    heatsim->add_flag("--planar", ho.planar, "run the planar lab instead of the radial one");
    heatsim->add_option("--n", ho.dim, "space dimension (radial lab)")->check(CLI::Range(2, 3));
    heatsim->add_option("--kind", ho.kind, "dirichlet | cauchy (radial lab)")
        ->check(CLI::IsMember({"dirichlet", "cauchy"}));
    heatsim->add_option("--sigma-c", ho.sigma_c, "core conductivity")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--sigma-s", ho.sigma_s, "shell conductivity")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--sigma-m", ho.sigma_m, "outside-medium conductivity")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--r", ho.r, "interface radius")->check(CLI::Range(0.0, 1.0));
    heatsim->add_option("--t0", ho.t0, "first stored time (radial)")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--T", ho.T, "horizon (radial)")->check(CLI::PositiveNumber);
    heatsim->add_option("--spd", ho.spd, "time steps per decade (radial)")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--h-bdry", ho.h_bdry, "smallest cell near layers")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--nt", ho.nt, "angular mesh resolution (planar)")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--eps", ho.eps, "interface mode amplitude (planar)");
    heatsim->add_option("--mode", ho.mode, "interface mode number (planar)")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--rho-trace", ho.rho_trace, "flux sample circle radius (planar)")
        ->check(CLI::Range(0.0, 1.0));
    heatsim->add_option("--t0-planar", ho.t0_planar, "first stored time (planar)")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--T-planar", ho.T_planar, "horizon (planar)")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--spd-planar", ho.spd_planar, "time steps per decade (planar)")
        ->check(CLI::PositiveNumber);
    heatsim->add_option("--out", ho.out, "output directory");

    AsymptoticsOpts ao;
    auto* asym = app.add_subcommand("asymptotics", "tangent-ball heat-content ratio test");
    asym->footer("emits content.csv (t,rescaled_r1,rescaled_r2,ratio), fit.json, manifest.json");
    asym->add_option("--t-top", ao.t_top, "largest extrapolation time")
        ->check(CLI::PositiveNumber);
    asym->add_option("--t-floor", ao.t_floor, "smallest stored time")
        ->check(CLI::PositiveNumber);
    asym->add_option("--r1", ao.r1, "first tangent-ball radius")->check(CLI::Range(0.0, 0.5));
    asym->add_option("--r2", ao.r2, "second tangent-ball radius")->check(CLI::Range(0.0, 0.5));
    asym->add_option("--r-core", ao.r_core, "interface radius")->check(CLI::Range(0.0, 1.0));
    asym->add_option("--sigma-c", ao.sigma_c, "core conductivity")->check(CLI::PositiveNumber);
    asym->add_option("--sigma-s", ao.sigma_s, "shell conductivity")->check(CLI::PositiveNumber);
    asym->add_option("--sigma-m", ao.sigma_m, "outside-medium conductivity")
        ->check(CLI::PositiveNumber);
    asym->add_option("--spd", ao.spd, "time steps per decade")->check(CLI::PositiveNumber);
    asym->add_option("--out", ao.out, "output directory");

    LaplaceOpts lo;
    auto* lap = app.add_subcommand("laplace", "rate-domain solves, transform, curvature fit");
    lap->footer("emits asymptotics.csv (lambda,d0,deficit,fitted_c_inf,target), fit.json "
                "(with 95% confidence intervals), optional commute.csv/transform.json, "
                "manifest.json");
    lap->add_option("--n", lo.dim, "space dimension")->check(CLI::Range(2, 3));
    lap->add_option("--sigma-c", lo.sigma_c, "core conductivity")->check(CLI::PositiveNumber);
    lap->add_option("--sigma-s", lo.sigma_s, "shell conductivity")->check(CLI::PositiveNumber);
    lap->add_option("--r", lo.r, "interface radius")->check(CLI::Range(0.0, 1.0));
    lap->add_option("--lambdas", lo.lambdas, "decay-rate sweep (>= 4, increasing)");
    lap->add_option("--n-core", lo.n_core, "core grid cells")->check(CLI::PositiveNumber);
    lap->add_option("--n-shell", lo.n_shell, "shell grid cells")->check(CLI::PositiveNumber);
    lap->add_option("--transform-lambda", lo.transform_lambda,
                    "also run the simulate-then-transform route at this rate (0 = skip)");
    lap->add_option("--out", lo.out, "output directory");

    GeometryOpts go;
    auto* geo = app.add_subcommand("geometry", "boundary curvature and expansion fits");
    geo->footer("emits samples.csv (t,kappa1,kappa2,kappa_sum,Pi,C), moments.csv "
                "(r,moment,fit_residual), fit.json, manifest.json");
    geo->add_option("--shape", go.shape, "circle | ellipse")
        ->check(CLI::IsMember({"circle", "ellipse"}));
    geo->add_option("--rho", go.rho, "circle radius")->check(CLI::PositiveNumber);
    geo->add_option("--a", go.a, "ellipse semi-axis a")->check(CLI::PositiveNumber);
    geo->add_option("--b", go.b, "ellipse semi-axis b")->check(CLI::PositiveNumber);
    geo->add_option("--samples", go.samples, "boundary sample count")
        ->check(CLI::PositiveNumber);
    geo->add_option("--r-ball", go.r_ball, "expansion ball radius for samples.csv")
        ->check(CLI::PositiveNumber);
    geo->add_option("--t-p", go.t_p, "boundary parameter of the moment-fit point");
    geo->add_option("--radii", go.radii, "moment-fit radius ladder (decreasing)");
    geo->add_option("--out", go.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage/config errors exit 2
    }

    std::string name = app.get_subcommands().front()->get_name();
    try {
        if (radial->parsed()) return run_radial(ro);
        if (counter->parsed()) return run_counterexample(co);
        if (heatsim->parsed()) return run_heatsim(ho);
        if (asym->parsed()) return run_asymptotics(ao);
        if (lap->parsed()) return run_laplace(lo);
        return run_geometry(go);
    } catch (const std::exception& e) {
        nlohmann::json err{{"subcommand", name}, {"error", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 1;
    }
}
