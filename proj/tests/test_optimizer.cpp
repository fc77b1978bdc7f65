#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "stabopt/error.hpp"
#include "stabopt/optimizer.hpp"

using namespace stabopt;
using doctest::Approx;

namespace {

void check_bracket(const BisectionResult& res) {
    CHECK(res.bracket.second - res.bracket.first <= res.eps_bisect);
    CHECK(res.H == res.bracket.first);
    // replay the bisection from the recorded decisions
    REQUIRE_FALSE(res.history.empty());
    double lo = res.bracket.first, hi = res.bracket.second;
    for (auto it = res.history.rbegin(); it != res.history.rend(); ++it) {
        CHECK(lo < hi);
        if (it->accepted) {
            CHECK(it->h == Approx(lo).epsilon(1e-12));
            lo = 2.0 * it->h - hi;
        } else {
            CHECK(it->h == Approx(hi).epsilon(1e-12));
            hi = 2.0 * it->h - lo;
        }
        CHECK(it->h == Approx(0.5 * (lo + hi)).epsilon(1e-12));
    }
}

// Circle |z + 2| = 1: avoids the origin, so strictly negative deviations occur.
SpectrumGenerator offset_circle() {
    return {"offset-circle", [](int n) {
                Spectrum s;
                const double pi = std::numbers::pi;
                for (int k = 0; k < n; ++k) s.points.push_back(Complex(-2.0) + std::polar(1.0, 2.0 * pi * k / n));
                s.nu = 2.0 * std::sin(pi / (2.0 * n));
                return s;
            }};
}

}  // namespace

TEST_CASE("initial upper bound") {
    CHECK(initial_hmax(real_interval(100), 5) == Approx(50.0));
    CHECK(initial_hmax(disk_boundary(64), 3) == Approx(9.0));
    const auto im = imaginary_interval(400);
    CHECK(initial_hmax(im, 10) == Approx(200.0));
    CHECK(solve_at(im, 200.0, 10, 1, BasisKind::RotatedChebyshev).r > 1e-7);
    Spectrum zero;
    zero.points = {Complex(0.0)};
    CHECK_THROWS_AS(initial_hmax(zero, 3), Error);
}

TEST_CASE("bisection on the real interval") {
    const auto res = optimize_h(real_interval(400), 10, 1, BasisKind::ShiftedChebyshev);
    CHECK(res.H / 100.0 == Approx(2.0).epsilon(1e-3));
    CHECK(res.eps_feas == 1e-7);
    CHECK(res.basis == BasisKind::ShiftedChebyshev);
    CHECK(res.polynomial.order_residual() <= 1e-9);
    check_bracket(res);
}

TEST_CASE("bisection on the imaginary interval and the disk") {
    const auto im = optimize_h(imaginary_interval(400), 4, 2, BasisKind::RotatedChebyshev);
    CHECK(std::abs(im.H - std::sqrt(8.0)) / 4.0 <= 2e-3);
    check_bracket(im);

    const auto disk = optimize_h(disk_boundary(256), 5, 2, BasisKind::Binomial);
    CHECK(std::abs(disk.H - 4.0) <= 0.05);
    check_bracket(disk);
}

TEST_CASE("accepted and rejected steps are reproducible") {
    const auto spec = disk_boundary(128);
    const auto res = optimize_h(spec, 4, 2, BasisKind::Binomial);
    for (const auto& step : res.history) {
        const double r = solve_at(spec, step.h, 4, 2, BasisKind::Binomial).r;
        CHECK(r == step.r);
        CHECK((r < res.eps_feas) == step.accepted);
    }
    CHECK(solve_at(spec, res.H, 4, 2, BasisKind::Binomial).r == res.r_final);
}

TEST_CASE("first-order polynomials scale down to any smaller step") {
    for (const auto& spec : {real_interval(200), disk_boundary(128), gap_spectrum(20.0, 256)}) {
        const auto res = optimize_h(spec, 6, 1, spec.min_real() < -10.0 ? BasisKind::ShiftedChebyshev : BasisKind::Binomial);
        const auto& a = res.polynomial.coeffs;
        const double worst = oracle::max_modulus(a, spec.points, res.H);
        for (int i = 1; i <= 10; ++i) {
            const double mu = i / 10.0;
            std::vector<double> scaled(a.size());
            for (std::size_t j = 0; j < a.size(); ++j) scaled[j] = std::pow(mu, 1.0 - static_cast<double>(j)) * a[j];
            CHECK(oracle::max_modulus(scaled, spec.points, mu * res.H) <= std::max(1.0, worst) + 1e-12);
        }
    }
}

TEST_CASE("every smaller step is feasible on the verification families") {
    struct Family {
        Spectrum spec;
        int s, p;
        BasisKind kind;
    };
    const std::vector<Family> families = {
        {real_interval(400), 8, 2, BasisKind::ShiftedChebyshev},
        {imaginary_interval(400), 6, 2, BasisKind::RotatedChebyshev},
        {disk_boundary(256), 5, 2, BasisKind::Binomial},
        {gap_spectrum(20.0, 400), 6, 1, BasisKind::ShiftedChebyshev},
    };
    for (const auto& f : families) {
        const auto res = optimize_h(f.spec, f.s, f.p, f.kind);
        for (int i = 1; i <= 9; ++i) CHECK(solve_at(f.spec, 0.1 * i * res.H, f.s, f.p, f.kind).r <= 1e-7);
    }
}

TEST_CASE("explicit bisection tolerance") {
    OptimizeOptions opts;
    opts.eps_bisect = 0.5;
    const auto res = optimize_h(real_interval(100), 4, 1, BasisKind::ShiftedChebyshev, opts);
    CHECK(res.eps_bisect == 0.5);
    CHECK(res.bracket.second - res.bracket.first <= 0.5);
    CHECK_THROWS_AS(optimize_h(real_interval(100), 2, 3, BasisKind::Monomial), Error);
}

TEST_CASE("lipschitz bound") {
    CHECK(lipschitz_bound(taylor_polynomial(1, 1), 7.0) == Approx(1.0));
    CHECK(lipschitz_bound(taylor_polynomial(2, 2), 2.0) == Approx(3.0));
    const auto t4 = taylor_polynomial(4, 4);
    const double bound = lipschitz_bound(t4, 1.0);
    double sampled = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Complex z = std::sqrt(i / 999.0) * std::polar(1.0, 0.1 * i);
        sampled = std::max(sampled, std::abs(t4.derivative(z)));
    }
    CHECK(bound >= sampled);
    CHECK(bound == Approx(1.0 + 1.0 + 0.5 + 1.0 / 6.0));
}

TEST_CASE("semi-infinite bisection certifies away from the origin") {
    SipOptions opts;
    opts.eps_bisect = 0.5;
    opts.n_cap = 1 << 14;
    const auto gen = offset_circle();
    const auto res = optimize_h_sip(gen, 4, 1, BasisKind::Monomial, opts);
    REQUIRE(res.certified);
    CHECK(res.bracket.second - res.bracket.first <= 0.5);
    CHECK(res.r_final < 0.0);
    CHECK(res.n_final <= opts.n_cap);
    const auto dense = gen.sample(10 * res.n_final);
    CHECK(oracle::max_modulus(res.polynomial.coeffs, dense.points, res.H) <= 1.0 + 1e-9);
    for (const auto& step : res.history) CHECK((step.r < 0.0) == step.accepted);
}

TEST_CASE("semi-infinite bisection stalls when the deviation is zero") {
    // every curve here passes through the origin, where R(0) = 1 pins r at zero for stable steps
    SipOptions opts;
    opts.n_cap = 1024;
    const auto res = optimize_h_sip(real_interval_generator(), 5, 1, BasisKind::ShiftedChebyshev, opts);
    CHECK_FALSE(res.certified);
    CHECK(res.n_final == 1024);
    REQUIRE(res.history.size() == 1);
    CHECK(std::abs(res.history[0].r) <= opts.zero_tol);

    opts.eps_bisect = 1e-12;
    const auto tight = optimize_h_sip(offset_circle(), 4, 1, BasisKind::Monomial, opts);
    CHECK_FALSE(tight.certified);
}

TEST_CASE("rectangle maximization") {
    const auto flat = max_kappa(1.0, 0.0, 3, 1);
    CHECK(std::abs(flat.kappa - 18.0) <= 1e-2 * 9.0);
    CHECK(flat.bracket.second - flat.bracket.first <= flat.eps_bisect);

    const auto box = max_kappa(1.0, 1.0, 10, 1);
    CHECK(box.kappa > 10.0);
    // the same search on a 4x finer boundary sampling
    RectangleOptions fine;
    fine.n = 4 * 512;
    CHECK(max_kappa(1.0, 1.0, 10, 1, fine).kappa == Approx(box.kappa).epsilon(1e-3));
    const double inner = 0.999 * box.kappa;
    const auto prob = assemble(rectangle(1.0, inner, fine.n), 1.0, make_basis(BasisKind::ShiftedChebyshev, 10, -inner), 10, 1);
    CHECK(solve_least_deviation(prob).r < 1e-7);

    try {
        max_kappa(1.0, 2.0, 1, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
    }
    CHECK_THROWS_AS(max_kappa(0.0, 1.0, 3, 1), Error);
}
