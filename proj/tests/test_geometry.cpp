#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include "twophase/geometry.hpp"
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace twophase;
constexpr double pi = std::numbers::pi;

namespace {

// area of the intersection of disks B_rho(0) and B_r(p), |p| = d (oracle for
// the exterior-set quadratures: exterior cap = pi r^2 - lens)
double lens_area(double d, double rho, double r) {
    double a1 = std::acos((d * d + rho * rho - r * r) / (2.0 * d * rho));
    double a2 = std::acos((d * d + r * r - rho * rho) / (2.0 * d * r));
    double s = (-d + r + rho) * (d + r - rho) * (d - r + rho) * (d + r + rho);
    return rho * rho * a1 + r * r * a2 - 0.5 * std::sqrt(s);
}

double circle_exterior_exact(double rho, double r) {
    return pi * r * r - lens_area(rho, rho, r);
}

double ellipse_kappa(double a, double b, double t) {
    double d = a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t);
    return a * b / std::pow(d, 1.5);
}

} // namespace

TEST_CASE("circle curvature data matches closed forms") {
    auto b = Boundary::circle(2.0, {0.3, -0.2});
    auto data = curvatures(b, 64, 0.25);
    REQUIRE(data.samples.size() == 64);
    for (const auto& s : data.samples) {
        REQUIRE(s.kappa.size() == 1);
        CHECK(s.kappa[0] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(s.kappa_sum == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(s.Pi == doctest::Approx(1.0 / 0.25 - 0.5).epsilon(1e-10));
        CHECK(s.C == doctest::Approx(3.0 * 0.25).epsilon(1e-10));
        CHECK(std::hypot(s.point.x - 0.3, s.point.y + 0.2) == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(s.Pi >= 0.0);
    }
}

TEST_CASE("ellipse curvature at the major-axis end and along the curve") {
    auto b = Boundary::ellipse(2.0, 1.0);
    CHECK(b.principal_curvatures(0.0)[0] == doctest::Approx(2.0).epsilon(1e-10));
    for (double t : {0.3, 1.0, 2.2, 4.0, 5.9})
        CHECK(b.principal_curvatures(t)[0] ==
              doctest::Approx(ellipse_kappa(2.0, 1.0, t)).epsilon(1e-10));

    // radial-graph representation agrees at the axis points
    auto br = Boundary::ellipse_radial(2.0, 1.0);
    CHECK(br.point(0.0).x == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(br.principal_curvatures(0.0)[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(br.principal_curvatures(pi / 2)[0] == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("unit sphere: both principal curvatures 1, Weingarten scalar 8") {
    auto b = Boundary::sphere(1.0);
    REQUIRE(b.dim() == 3);
    auto data = curvatures(b, 48, 0.5);
    for (const auto& s : data.samples) {
        REQUIRE(s.kappa.size() == 2);
        CHECK(s.kappa[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s.kappa[1] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s.C == doctest::Approx(8.0).epsilon(1e-8));
        CHECK(s.Pi == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("ellipsoid of revolution: closed-form curvatures at the equator") {
    double a = 1.0, c = 1.5;
    auto b = Boundary::ellipsoid_revolution(a, c);
    auto k = b.principal_curvatures(pi / 2);  // equator
    REQUIRE(k.size() == 2);
    CHECK(k[0] == doctest::Approx(a / (c * c)).epsilon(1e-9));  // meridian
    CHECK(k[1] == doctest::Approx(1.0 / a).epsilon(1e-9));      // parallel
    double C = weingarten_scalar(k);
    CHECK(C == doctest::Approx(3.0 * (k[0] * k[0] + k[1] * k[1]) + 2.0 * k[0] * k[1]));
}

TEST_CASE("degenerate tangent is rejected") {
    std::vector<double> xs(16, 1.0), ys(16, 1.0);  // constant "curve"
    auto b = Boundary::from_parametric_samples(xs, ys);
    CHECK_THROWS_AS(b.principal_curvatures(0.5), std::runtime_error);
}

TEST_CASE("distance field on the unit circle: closed forms") {
    auto b = Boundary::circle(1.0);
    std::vector<Vec2> pts;
    std::vector<double> ss = {0.05, 0.15, 0.3};
    for (double s : ss)
        for (double al : {0.1, 1.7, 3.9})
            pts.push_back({(1.0 - s) * std::cos(al), (1.0 - s) * std::sin(al)});
    auto out = distance_field(b, pts, 0.35);
    REQUIRE(out.size() == pts.size());
    std::size_t i = 0;
    for (double s : ss)
        for (int rep = 0; rep < 3; ++rep) {
            const auto& ts = out[i++];
            CHECK(ts.ok);
            CHECK(ts.delta == doctest::Approx(s).epsilon(1e-10));
            CHECK(ts.laplace_delta == doctest::Approx(-1.0 / (1.0 - s)).epsilon(1e-8));
            CHECK(std::hypot(ts.grad_delta.x, ts.grad_delta.y) ==
                  doctest::Approx(1.0).epsilon(1e-10));
            Vec2 rec = ts.x - ts.delta * ts.grad_delta;
            CHECK(std::hypot(rec.x - ts.nearest.x, rec.y - ts.nearest.y) <= 1e-10);
        }
}

TEST_CASE("distance field identities on an ellipse, validated by differencing") {
    auto b = Boundary::ellipse(1.6, 1.0);
    double delta0 = 0.4 / ellipse_kappa(1.6, 1.0, 0.0);
    auto tube = distance_field(b, delta0);
    REQUIRE(tube.size() == 48 * 3);
    for (const auto& s : tube) {
        CHECK(s.ok);
        CHECK(s.delta > 0.0);
        CHECK(s.delta < delta0);
        CHECK(std::hypot(s.grad_delta.x, s.grad_delta.y) == doctest::Approx(1.0).epsilon(1e-8));
        Vec2 rec = s.x - s.delta * s.grad_delta;
        CHECK(std::hypot(rec.x - s.nearest.x, rec.y - s.nearest.y) <= 1e-10);
    }

    // independent check of grad and Laplacian at a few tube points by
    // differencing the distance function itself
    auto dist = [&](Vec2 q) {
        return distance_field(b, std::vector<Vec2>{q}, delta0)[0].delta;
    };
    for (int pick : {5, 53, 101}) {
        const auto& s = tube[pick];
        double h = 1e-4;
        double dx = (dist({s.x.x + h, s.x.y}) - dist({s.x.x - h, s.x.y})) / (2 * h);
        double dy = (dist({s.x.x, s.x.y + h}) - dist({s.x.x, s.x.y - h})) / (2 * h);
        CHECK(dx == doctest::Approx(s.grad_delta.x).epsilon(5e-7));
        CHECK(dy == doctest::Approx(s.grad_delta.y).epsilon(5e-7));
        double hh = 2e-3;
        double lap = (dist({s.x.x + hh, s.x.y}) + dist({s.x.x - hh, s.x.y}) +
                      dist({s.x.x, s.x.y + hh}) + dist({s.x.x, s.x.y - hh}) - 4 * s.delta) /
                     (hh * hh);
        CHECK(lap == doctest::Approx(s.laplace_delta).epsilon(2e-4));
    }
}

TEST_CASE("tube half-width beyond the curvature bound is rejected") {
    auto b = Boundary::ellipse(2.0, 1.0);  // max curvature 2
    CHECK_THROWS_AS(distance_field(b, 0.5), std::invalid_argument);
}

TEST_CASE("flat boundary: exterior volume is half the ball, moment 2r^3/3") {
    auto inside = [](Vec2 q) { return q.y < 0.0; };
    Vec2 p{0.0, 0.0}, nu{0.0, 1.0};
    for (double r : {0.3, 0.12}) {
        CHECK(exterior_volume_indicator(inside, p, nu, r) ==
              doctest::Approx(pi * r * r / 2).epsilon(1e-10));
        CHECK(exterior_moment_indicator(inside, p, nu, r) ==
              doctest::Approx(2.0 * r * r * r / 3).epsilon(1e-10));
    }
}

TEST_CASE("circle exterior volume matches the exact cap area") {
    auto b = Boundary::circle(1.0);
    for (double r : {0.35, 0.2, 0.1})
        CHECK(exterior_volume(b, 0.0, r) ==
              doctest::Approx(circle_exterior_exact(1.0, r)).epsilon(1e-9));

    // small-r expansion: pi r^2/2 + (kappa/3) r^3 + O(r^4); the sign of the
    // cubic term discriminates interior from exterior caps
    for (double r : {0.3, 0.15}) {
        double v = exterior_volume(b, 0.0, r);
        double good = pi * r * r / 2 + r * r * r / 3.0;
        double bad = pi * r * r / 2 - r * r * r / 3.0;
        CHECK(std::abs(v - good) < r * r * r * r);
        CHECK(std::abs(v - good) < 0.05 * std::abs(v - bad));
    }
}

TEST_CASE("exterior volume is constant over boundary points of a circle") {
    auto b = Boundary::circle(1.3, {0.2, 0.1});
    double v1 = exterior_volume(b, 0.7, 0.25);
    double v2 = exterior_volume(b, 2.9, 0.25);
    CHECK(v1 == doctest::Approx(circle_exterior_exact(1.3, 0.25)).epsilon(1e-9));
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-9));
}

TEST_CASE("exterior volume varies along an ellipse (density negative control)") {
    auto b = Boundary::ellipse_radial(2.0, 1.0);
    double r = 0.2;
    double v_tip = exterior_volume(b, 0.0, r);       // kappa = 2
    double v_side = exterior_volume(b, pi / 2, r);   // kappa = 1/4
    CHECK(std::abs(v_tip - v_side) / v_side > 0.03);
    // both still obey their own local expansions
    CHECK(v_tip == doctest::Approx(pi * r * r / 2 + 2.0 / 3.0 * r * r * r).epsilon(0.02));
    CHECK(v_side == doctest::Approx(pi * r * r / 2 + 0.25 / 3.0 * r * r * r).epsilon(0.02));
}

TEST_CASE("moment expansion on the unit circle extracts C = 3") {
    auto b = Boundary::circle(1.0);
    auto fit = fit_moment_expansion(b, 0.3, {0.2, 0.1, 0.05});
    CHECK(fit.C_extracted == doctest::Approx(3.0).epsilon(0.05));
    CHECK_FALSE(fit.flagged);

    // deviation from the leading term decays like r^2 (log-log slope 2 +- 0.3)
    double lead0 = 2.0 * std::pow(fit.radii[0], 3) / 3.0;
    double lead2 = 2.0 * std::pow(fit.radii[2], 3) / 3.0;
    double g0 = std::abs(fit.moments[0] / lead0 - 1.0);
    double g2 = std::abs(fit.moments[2] / lead2 - 1.0);
    double slope = std::log(g0 / g2) / std::log(fit.radii[0] / fit.radii[2]);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("moment expansion separates ellipse points (Weingarten negative control)") {
    auto b = Boundary::ellipse_radial(2.0, 1.0);
    auto tip = fit_moment_expansion(b, 0.0, {0.12, 0.06, 0.03});
    auto side = fit_moment_expansion(b, pi / 2, {0.2, 0.1, 0.05});
    CHECK(tip.C_extracted == doctest::Approx(12.0).epsilon(0.25));      // 3 kappa^2, kappa = 2
    CHECK(side.C_extracted == doctest::Approx(0.1875).epsilon(0.25));   // kappa = 1/4
    CHECK(tip.C_extracted > 10.0 * side.C_extracted);

    // constancy of C over samples holds on circles, fails on ellipses
    auto c_circ = curvatures(Boundary::circle(1.0), 32, 0.5);
    auto c_ell = curvatures(b, 32, 0.4);
    double cmin = 1e300, cmax = -1e300, emin = 1e300, emax = -1e300;
    for (const auto& s : c_circ.samples) { cmin = std::min(cmin, s.C); cmax = std::max(cmax, s.C); }
    for (const auto& s : c_ell.samples) { emin = std::min(emin, s.C); emax = std::max(emax, s.C); }
    CHECK(cmax - cmin <= 1e-8);
    CHECK((emax - emin) / emax > 0.2);
}

TEST_CASE("orientation flip: normal and moment negate, volume invariant") {
    auto b = Boundary::ellipse_radial(1.5, 1.0);
    auto f = b.flipped();
    Vec2 p0 = b.point(0.0), pf = f.point(0.0);
    CHECK(std::hypot(p0.x - pf.x, p0.y - pf.y) <= 1e-12);
    Vec2 n0 = b.outward_normal(0.0), nf = f.outward_normal(0.0);
    CHECK(n0.x == doctest::Approx(-nf.x).epsilon(1e-12));
    CHECK(std::abs(n0.y + nf.y) <= 1e-12);
    CHECK(f.principal_curvatures(0.0)[0] ==
          doctest::Approx(-b.principal_curvatures(0.0)[0]).epsilon(1e-10));

    double r = 0.22;
    CHECK(exterior_volume(f, 0.0, r) == doctest::Approx(exterior_volume(b, 0.0, r)).epsilon(1e-9));
    CHECK(exterior_moment(f, 0.0, r) ==
          doctest::Approx(-exterior_moment(b, 0.0, r)).epsilon(1e-9));
}

TEST_CASE("radial graph containment and radius round-trip") {
    std::vector<double> radii(64);
    for (int j = 0; j < 64; ++j) radii[j] = 1.0 + 0.1 * std::cos(2.0 * (2 * pi * j / 64));
    auto b = Boundary::from_radial_samples(radii);
    CHECK(b.radius(0.3) == doctest::Approx(1.0 + 0.1 * std::cos(0.6)).epsilon(1e-12));
    CHECK(b.contains({0.0, 0.0}));
    CHECK(b.contains({1.05, 0.0}));
    CHECK_FALSE(b.contains({1.15, 0.0}));
    CHECK_FALSE(b.contains({0.0, 0.95}));
    CHECK(b.contains({0.0, 0.85}));
}

TEST_CASE("curvature CSV layout") {
    auto data = curvatures(Boundary::circle(2.0), 8, 0.25);
    std::istringstream is(curvature_to_csv(data));
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,kappa1,kappa2,kappa_sum,Pi,C");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
    }
    CHECK(rows == 8);
}
