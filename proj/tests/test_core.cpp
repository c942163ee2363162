#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "thinfilm/core.hpp"

using namespace thinfilm;

namespace {

Field sampled(double a, double b, int n, double (*fn)(double)) {
    Field f;
    f.grid = Grid(a, b, n);
    f.u.resize(n);
    for (int i = 0; i < n; ++i) f.u[i] = fn(f.grid.x(i));
    return f;
}

constexpr double pi = std::numbers::pi;

} // namespace

TEST_CASE("grid coordinates and spacing") {
    Grid g(-2.0, 3.0, 11);
    CHECK(g.dx() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.x(0) == doctest::Approx(-2.0));
    CHECK(g.x(10) == doctest::Approx(3.0));
    Grid c = Grid::centered(4.0, 9);
    CHECK(c.x_min == doctest::Approx(-4.0));
    CHECK(c.x_max == doctest::Approx(4.0));
    CHECK(c.half_width() == doctest::Approx(4.0));
    CHECK(c == Grid(-4.0, 4.0, 9));
}

TEST_CASE("signed power is odd and matches pow on positives") {
    CHECK(signed_pow(2.0, 3.0) == doctest::Approx(8.0));
    CHECK(signed_pow(-2.0, 3.0) == doctest::Approx(-8.0));
    CHECK(signed_pow(-4.0, 0.5) == doctest::Approx(-2.0));
    CHECK(signed_pow(0.0, 2.5) == 0.0);
}

TEST_CASE("trapezoid mass of a cosine bump is exact to quadrature order") {
    auto bump = +[](double x) { return 1.0 + std::cos(x); };
    Field f = sampled(-pi, pi, 4001, bump);
    CHECK(mass(f) == doctest::Approx(2.0 * pi).epsilon(1e-8));
    CHECK(lp_integral(f, 2.0) == doctest::Approx(3.0 * pi).epsilon(1e-8));
    CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(3.0 * pi)).epsilon(1e-8));
}

TEST_CASE("derivative stencils are second order") {
    auto fn = +[](double x) { return std::sin(x); };
    double err1_coarse = 0, err1_fine = 0, err2_coarse = 0, err2_fine = 0;
    for (int pass = 0; pass < 2; ++pass) {
        int n = pass == 0 ? 201 : 401;
        Field f = sampled(-1.0, 1.0, n, fn);
        auto d1 = gradient_samples(f, BcType::Clamped);
        auto d2 = second_derivative_samples(f, BcType::Clamped);
        double e1 = 0, e2 = 0;
        for (int i = 0; i < n; ++i) {
            e1 = std::max(e1, std::abs(d1[i] - std::cos(f.grid.x(i))));
            e2 = std::max(e2, std::abs(d2[i] + std::sin(f.grid.x(i))));
        }
        (pass == 0 ? err1_coarse : err1_fine) = e1;
        (pass == 0 ? err2_coarse : err2_fine) = e2;
    }
    CHECK(err1_coarse / err1_fine > 3.0); // ratio 4 expected at second order
    CHECK(err2_coarse / err2_fine > 3.0);
}

TEST_CASE("periodic stencils wrap without boundary loss") {
    auto fn = +[](double x) { return std::sin(x); };
    int n = 256;
    Field f;
    f.grid = Grid(0.0, 2.0 * pi * (n - 1.0) / n, n); // last node one dx short of the period
    f.u.resize(n);
    for (int i = 0; i < n; ++i) f.u[i] = fn(f.grid.x(i));
    auto d1 = gradient_samples(f, BcType::Periodic);
    double e = 0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(d1[i] - std::cos(f.grid.x(i))));
    CHECK(e < 1e-3);
}

TEST_CASE("free energy of the m=1 droplet matches its closed form") {
    // u = h cos^2(x/2) on [-pi, pi]: int u_x^2 = pi h^2 / 4, int u^2 = 3 pi h^2 / 4.
    auto fn = +[](double x) { return std::cos(0.5 * x) * std::cos(0.5 * x); };
    Field f = sampled(-pi, pi, 8001, fn);
    ModelParams p{1.0, 1.0};
    double expected = 0.5 * (pi / 4.0) - 0.5 * (3.0 * pi / 4.0);
    CHECK(free_energy(f, p) == doctest::Approx(expected).epsilon(1e-6));
    CHECK(h1_seminorm_sq(f) == doctest::Approx(pi / 4.0).epsilon(1e-6));
}

TEST_CASE("second moment of the m=1 droplet") {
    auto fn = +[](double x) { return std::cos(0.5 * x) * std::cos(0.5 * x); };
    Field f = sampled(-pi, pi, 8001, fn);
    CHECK(second_moment(f) ==
          doctest::Approx(pi * pi * pi / 3.0 - 2.0 * pi).epsilon(1e-6));
}

TEST_CASE("fisher information vanishes on a steady droplet and not off it") {
    // At m = 1 the droplet is u = h cos^2(x/2); u_xx + u = h/2 is constant,
    // so the dissipation functional is zero there.
    auto fn = +[](double x) { return std::cos(0.5 * x) * std::cos(0.5 * x); };
    Field f = sampled(-pi, pi, 4001, fn);
    ModelParams p{1.0, 1.0};
    CHECK(fisher_information(f, p) < 1e-6);
    auto off = +[](double x) { return std::exp(-x * x); };
    Field g = sampled(-6.0, 6.0, 4001, off);
    CHECK(fisher_information(g, p) > 1e-3);
}

TEST_CASE("chemical potential is the constant -h/2 inside the m=1 droplet") {
    auto fn = +[](double x) { return std::cos(0.5 * x) * std::cos(0.5 * x); };
    Field f = sampled(-0.9 * pi, 0.9 * pi, 2001, fn); // interior only
    ModelParams p{1.0, 1.0};
    Field mu = chemical_potential(f, p);
    for (int i = 5; i < mu.n() - 5; ++i)
        CHECK(mu.u[i] == doctest::Approx(-0.5).epsilon(2e-4));
}

TEST_CASE("support components find the gaps") {
    Field f;
    f.grid = Grid(-5.0, 5.0, 1001);
    f.u.assign(1001, 0.0);
    for (int i = 0; i < 1001; ++i) {
        double x = f.grid.x(i);
        if (std::abs(x + 2.5) < 1.0) f.u[i] = 1.0 - std::abs(x + 2.5);
        if (std::abs(x - 2.5) < 1.0) f.u[i] = 1.0 - std::abs(x - 2.5);
    }
    auto comps = support_components(f);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].a == doctest::Approx(-3.5).epsilon(1e-2));
    CHECK(comps[0].b == doctest::Approx(-1.5).epsilon(1e-2));
    CHECK(comps[1].a == doctest::Approx(1.5).epsilon(1e-2));
    CHECK(comps[1].b == doctest::Approx(3.5).epsilon(1e-2));
}

TEST_CASE("potential constancy residual separates steady from transient") {
    auto fn = +[](double x) {
        double c = std::cos(0.5 * x);
        return std::abs(x) < pi ? c * c : 0.0;
    };
    Field f = sampled(-1.2 * pi, 1.2 * pi, 4001, fn);
    ModelParams p{1.0, 1.0};
    CHECK(potential_constancy_residual(f, p) < 1e-2);
    auto off = +[](double x) { return std::exp(-x * x); };
    Field g = sampled(-6.0, 6.0, 4001, off);
    CHECK(potential_constancy_residual(g, p) > 0.1);
}

TEST_CASE("empty support is rejected") {
    Field f;
    f.grid = Grid(-1.0, 1.0, 64);
    f.u.assign(64, 0.0);
    ModelParams p{1.0, 1.0};
    CHECK_THROWS_AS(potential_constancy_residual(f, p), EmptySupport);
}

TEST_CASE("field extrema and finiteness") {
    Field f;
    f.grid = Grid(0.0, 1.0, 8);
    f.u = {1.0, -2.0, 0.5, 0.0, 0.25, -0.75, 0.1, 0.9};
    CHECK(f.max() == 1.0);
    CHECK(f.min() == -2.0);
    CHECK(f.finite());
    f.u[1] = std::nan("");
    CHECK(!f.finite());
}
