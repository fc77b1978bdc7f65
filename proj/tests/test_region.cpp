#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "stabopt/error.hpp"
#include "stabopt/optimizer.hpp"
#include "stabopt/region.hpp"

using namespace stabopt;
using doctest::Approx;

namespace {

Spectrum points(std::vector<Complex> pts) {
    Spectrum s;
    s.points = std::move(pts);
    return s;
}

StabilityPolynomial forward_euler() { return taylor_polynomial(1, 1); }

}  // namespace

TEST_CASE("polynomial evaluation") {
    const auto t4 = taylor_polynomial(4, 4);
    CHECK(eval_poly(t4, 0.0) == Complex(1.0));
    CHECK(eval_poly(forward_euler(), -2.0) == Complex(-1.0));
    CHECK(std::abs(eval_poly(t4, -1.0) - 0.375) < 1e-15);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        const Complex z{u(rng), u(rng)};
        CHECK(std::abs(eval_poly(t4, z)) == std::abs(eval_poly(t4, std::conj(z))));
        CHECK(std::abs(eval_poly(t4, z) - oracle::horner(t4.coeffs, z)) <= 1e-12 * std::max(1.0, std::abs(z) * std::abs(z) * std::abs(z) * std::abs(z)));
    }
}

TEST_CASE("forward Euler region is the unit disk at -1") {
    const auto grid = region_grid(forward_euler(), {-2.5, 0.5}, {-1.5, 1.5}, 61, 61);
    const double spacing = 3.0 / 60;
    REQUIRE(grid.contour.size() == 1);
    CHECK(grid.contour[0].size() > 50);
    CHECK(grid.contour[0].front() == grid.contour[0].back());
    for (const auto& z : grid.contour[0]) CHECK(std::abs(std::abs(1.0 + z) - 1.0) <= 2.0 * spacing);
    for (double v : grid.values) CHECK(v >= 0.0);
}

TEST_CASE("classical fourth-order region") {
    const auto t4 = taylor_polynomial(4, 4);
    const auto grid = region_grid(t4, {-5.0, 1.0}, {-4.0, 4.0}, 241, 161);
    CHECK(grid.value(200, 80) == 1.0);
    CHECK(grid.node(200, 80) == Complex(0.0));

    const double edge = oracle::boundary_root(t4.coeffs, -1.0);
    CHECK(edge == Approx(2.7853).epsilon(1e-4));
    bool crosses = false;
    std::size_t count = 0;
    for (const auto& line : grid.contour) {
        for (const auto& z : line) {
            ++count;
            CHECK(std::abs(std::abs(t4(z)) - 1.0) <= 1e-6);
            if (std::abs(z.imag()) < 1e-12 && std::abs(z.real() + edge) < 0.025) crosses = true;
        }
    }
    CHECK(count > 200);
    CHECK(crosses);
}

TEST_CASE("grid validation and export") {
    CHECK_THROWS_AS(region_grid(forward_euler(), {0.0, 0.0}, {-1.0, 1.0}, 10, 10), Error);
    CHECK_THROWS_AS(region_grid(forward_euler(), {-1.0, 0.0}, {-1.0, 1.0}, 1, 10), Error);
    CHECK_THROWS_AS(region_grid(forward_euler(), {-1.0, NAN}, {-1.0, 1.0}, 10, 10), Error);

    const auto grid = region_grid(forward_euler(), {-2.0, 0.0}, {-1.0, 1.0}, 5, 3);
    const auto j = nlohmann::json::parse(region_to_json(grid));
    CHECK(j["schema"] == 1);
    CHECK(j["nx"] == 5);
    CHECK(j["ny"] == 3);
    REQUIRE(j["values"].size() == 15);
    // row-major with the real part varying fastest
    CHECK(j["values"][5 + 2].get<double>() == Approx(0.0));
    CHECK(j["values"][0].get<double>() == Approx(std::abs(Complex(-1.0, -1.0))));

    const std::string csv = contour_to_csv(grid);
    CHECK(csv.rfind("polyline,re,im\n", 0) == 0);
}

TEST_CASE("largest stable step for a fixed polynomial") {
    const auto t4 = taylor_polynomial(4, 4);
    const double real_edge = max_stable_step(t4, points({Complex(-1.0)}));
    CHECK(real_edge == Approx(oracle::boundary_root(t4.coeffs, -1.0)).epsilon(1e-5));
    CHECK(std::abs(real_edge - 2.7853) <= 1e-3);

    const double imag_edge = max_stable_step(t4, points({Complex(0.0, 1.0), Complex(0.0, -1.0)}));
    CHECK(std::abs(imag_edge - 2.0 * std::sqrt(2.0)) <= 1e-3);
    CHECK(imag_edge == Approx(oracle::boundary_root(t4.coeffs, Complex(0.0, 1.0))).epsilon(1e-5));

    CHECK(std::abs(max_stable_step(t4, upwind_advection(20, 1.0)) - 1.39) <= 0.01);

    // sentinels
    CHECK(max_stable_step(forward_euler(), points({Complex(1.0)})) == 0.0);
    // |1 + ih| <= 1 + slack up to h = sqrt(2 slack)
    CHECK(max_stable_step(forward_euler(), points({Complex(0.0, 1.0)})) == Approx(std::sqrt(2.0 * kStableSlack)).epsilon(1e-5));
    CHECK(std::isinf(max_stable_step(forward_euler(), points({Complex(0.0)}))));
    CHECK_THROWS_AS(max_stable_step(t4, Spectrum{}), Error);
}

TEST_CASE("largest stable step agrees with the feasibility check") {
    struct Case {
        Spectrum spec;
        int s, p;
        BasisKind kind;
    };
    const std::vector<Case> cases = {
        {real_interval(400), 6, 1, BasisKind::ShiftedChebyshev},
        {imaginary_interval(400), 4, 2, BasisKind::RotatedChebyshev},
        {disk_boundary(256), 5, 2, BasisKind::Binomial},
        {upwind_advection(20, 1.0), 6, 3, BasisKind::Monomial},
    };
    for (const auto& c : cases) {
        const auto res = optimize_h(c.spec, c.s, c.p, c.kind);
        const double h = max_stable_step(res.polynomial, c.spec);
        REQUIRE(std::isfinite(h));
        REQUIRE(h > 0.0);
        CHECK(verify_feasible(res.polynomial, c.spec, 0.999 * h, 1e-12).feasible);
        CHECK_FALSE(verify_feasible(res.polynomial, c.spec, 1.001 * h, 1e-12).feasible);
        CHECK(verify_feasible(res.polynomial, c.spec, res.H, 1e-6).feasible);
    }
}

TEST_CASE("feasibility report") {
    const auto at_zero = verify_feasible(taylor_polynomial(3, 2), disk_boundary(16), 0.0, 0.0);
    CHECK(at_zero.feasible);
    CHECK(at_zero.max_violation == 0.0);

    const auto euler = verify_feasible(forward_euler(), points({Complex(-0.5), Complex(-1.0)}), 3.0, 1e-6);
    CHECK_FALSE(euler.feasible);
    CHECK(euler.max_violation == Approx(1.0));
    CHECK(euler.worst_point == Complex(-1.0));
    CHECK(euler.worst_index == 1);
}
