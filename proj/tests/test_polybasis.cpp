#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stabopt/error.hpp"
#include "stabopt/polybasis.hpp"

using namespace stabopt;
using doctest::Approx;

TEST_CASE("monomial basis is the identity expansion") {
    const Basis b = make_basis(BasisKind::Monomial, 2);
    CHECK(b.coeffs().isApprox(Eigen::MatrixXd::Identity(3, 3)));
    const auto q = eval_basis(b, 2.0);
    CHECK(q[0] == Complex(1.0));
    CHECK(q[1] == Complex(2.0));
    CHECK(q[2] == Complex(4.0));
}

TEST_CASE("shifted chebyshev basis maps [c, 0] onto [-1, 1]") {
    const Basis b = make_basis(BasisKind::ShiftedChebyshev, 1, -2.0);
    CHECK(b.coeffs()(1, 0) == Approx(1.0));
    CHECK(b.coeffs()(1, 1) == Approx(1.0));
    CHECK(std::abs(eval_basis(b, -2.0)[1] - Complex(-1.0)) < 1e-15);

    const Basis b10 = make_basis(BasisKind::ShiftedChebyshev, 10, -7.5);
    for (Complex v : eval_basis(b10, 0.0)) CHECK(std::abs(v - 1.0) < 1e-14);

    SUBCASE("values agree with cos(j arccos x)") {
        for (double z : {-7.5, -6.0, -3.3, -0.1, 0.0}) {
            const auto q = eval_basis(b10, z);
            for (int j = 0; j <= 10; ++j) {
                CHECK(std::abs(q[j] - oracle::chebyshev_t(j, 1.0 - 2.0 * z / -7.5)) < 1e-12);
            }
        }
    }

    SUBCASE("bounded by one on the interval") {
        const double c = -13.0;
        const Basis b12 = make_basis(BasisKind::ShiftedChebyshev, 12, c);
        for (int i = 0; i < 1000; ++i) {
            const double x = c * i / 999.0;
            for (Complex v : eval_basis(b12, x)) CHECK(std::abs(v) <= 1.0 + 1e-12);
        }
    }

    SUBCASE("leading coefficient") {
        const double c = -3.0;
        const Basis bc = make_basis(BasisKind::ShiftedChebyshev, 10, c);
        for (int j = 1; j <= 10; ++j) {
            const double expected = std::pow(2.0, j - 1) * std::pow(-2.0 / c, j);
            CHECK(bc.coeffs()(j, j) == Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("rotated chebyshev basis matches i^j T_j(iz/c) with real coefficients") {
    const double c = 1.7;
    const Basis b = make_basis(BasisKind::RotatedChebyshev, 5, c);
    // Q_2(z) = -T_2(iz/c) = 1 + 2 z^2 / c^2
    CHECK(b.coeffs()(2, 0) == Approx(1.0));
    CHECK(b.coeffs()(2, 1) == Approx(0.0));
    CHECK(b.coeffs()(2, 2) == Approx(2.0 / (c * c)));

    const Complex unit{0.0, 1.0};
    for (Complex z : {Complex(0.3, 0.9), Complex(-0.4, 1.2), Complex(0.0, -1.7), Complex(-1.0, 0.0)}) {
        const auto q = eval_basis(b, z);
        Complex ipow = 1.0;
        for (int j = 0; j <= 5; ++j) {
            const Complex expected = ipow * oracle::chebyshev_t(j, unit * z / c);
            CHECK(std::abs(q[j] - expected) < 1e-12);
            // expansion coefficients reproduce the same values
            Complex viaCoeffs = 0.0;
            for (int k = j; k >= 0; --k) viaCoeffs = viaCoeffs * z + b.coeffs()(j, k);
            CHECK(std::abs(viaCoeffs - expected) < 1e-12);
            ipow *= unit;
        }
    }
    // on the segment [-ic, ic] the values are bounded like T_j on [-1, 1]
    for (int i = 0; i <= 200; ++i) {
        const Complex z{0.0, -c + 2.0 * c * i / 200.0};
        for (Complex v : eval_basis(b, z)) CHECK(std::abs(v) <= 1.0 + 1e-12);
    }
}

TEST_CASE("binomial basis") {
    const Basis b = make_basis(BasisKind::Binomial, 3, 2.0);
    for (int k = 0; k <= 3; ++k) CHECK(b.coeffs()(3, k) == Approx(oracle::binomial(3, k) / std::pow(2.0, k)));
    const auto q = eval_basis(make_basis(BasisKind::Binomial, 6, 1.5), -1.5);
    CHECK(q[0] == Complex(1.0));
    for (int j = 1; j <= 6; ++j) CHECK(q[j] == Complex(0.0));
}

TEST_CASE("scaled bases reject a zero or non-finite scale") {
    CHECK_THROWS_AS(make_basis(BasisKind::ShiftedChebyshev, 3, 0.0), Error);
    CHECK_THROWS_AS(make_basis(BasisKind::Binomial, 3, std::nan("")), Error);
    CHECK_THROWS_AS(make_basis(BasisKind::Monomial, -1), Error);
    CHECK_NOTHROW(make_basis(BasisKind::Monomial, 3, 0.0));
}

TEST_CASE("basis kind names") {
    CHECK(parse_basis_kind("chebyshev") == BasisKind::ShiftedChebyshev);
    CHECK(parse_basis_kind("rotated-chebyshev") == BasisKind::RotatedChebyshev);
    CHECK(parse_basis_kind(to_string(BasisKind::Binomial)) == BasisKind::Binomial);
    try {
        parse_basis_kind("legendre");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParameter);
    }
}

TEST_CASE("to_monomial") {
    const std::vector<double> a{1.0, 1.0, 0.5};
    CHECK(to_monomial(make_basis(BasisKind::Monomial, 2), a) == a);
    const std::vector<double> sq{0.0, 0.0, 1.0};
    const auto c = to_monomial(make_basis(BasisKind::Binomial, 2, 1.0), sq);
    CHECK(c[0] == Approx(1.0));
    CHECK(c[1] == Approx(2.0));
    CHECK(c[2] == Approx(1.0));
    CHECK_THROWS_AS(to_monomial(make_basis(BasisKind::Monomial, 2), std::vector<double>{1.0, 2.0}), Error);

    SUBCASE("round trip through a triangular solve") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto kind : {BasisKind::ShiftedChebyshev, BasisKind::RotatedChebyshev, BasisKind::Binomial}) {
            const Basis b = make_basis(kind, 8, kind == BasisKind::ShiftedChebyshev ? -3.0 : 2.0);
            std::vector<double> mono(9);
            for (auto& x : mono) x = u(rng);
            const auto back = to_monomial(b, oracle::basis_coefficients(b.coeffs(), mono));
            for (int k = 0; k <= 8; ++k) CHECK(back[k] == Approx(mono[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("order condition systems") {
    const auto mono = order_condition_system(make_basis(BasisKind::Monomial, 4), 2);
    REQUIRE(mono.matrix.rows() == 3);
    CHECK(mono.matrix.leftCols(3).isApprox(Eigen::MatrixXd::Identity(3, 3)));
    CHECK(mono.matrix.rightCols(2).isZero());
    CHECK(mono.rhs[2] == Approx(0.5));

    const double h = 3.0;
    const auto bin = order_condition_system(make_basis(BasisKind::Binomial, 5, h), 1);
    for (int j = 0; j <= 5; ++j) {
        CHECK(bin.matrix(0, j) == Approx(1.0));
        CHECK(bin.matrix(1, j) == Approx(j / h));
    }
    CHECK(bin.rhs[1] == Approx(1.0));

    const auto p0 = order_condition_system(make_basis(BasisKind::ShiftedChebyshev, 3, -2.0), 0);
    CHECK(p0.matrix.rows() == 1);
    CHECK(p0.rhs[0] == 1.0);

    CHECK_THROWS_AS(order_condition_system(make_basis(BasisKind::Monomial, 2), 3), Error);

    for (auto kind : {BasisKind::Monomial, BasisKind::ShiftedChebyshev, BasisKind::RotatedChebyshev, BasisKind::Binomial}) {
        for (int p = 0; p <= 6; ++p) {
            const auto sys = order_condition_system(make_basis(kind, 6, kind == BasisKind::ShiftedChebyshev ? -20.0 : 4.0), p);
            CHECK(numerical_rank(sys.matrix) == p + 1);
        }
    }
}

TEST_CASE("stability polynomial helpers") {
    const auto t4 = taylor_polynomial(4, 4);
    CHECK(std::abs(t4(-1.0) - 0.375) < 1e-15);
    CHECK(t4(0.0) == Complex(1.0));
    CHECK(t4.order_residual() == 0.0);
    CHECK_NOTHROW(t4.validate());

    StabilityPolynomial bad = t4;
    bad.coeffs[2] += 1e-6;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.coeffs.pop_back();
    CHECK_THROWS_AS(bad.validate(), Error);

    // derivative of 1 + z + z^2/2 is 1 + z
    const auto t2 = taylor_polynomial(2, 2);
    CHECK(std::abs(t2.derivative(Complex(0.3, -1.0)) - Complex(1.3, -1.0)) < 1e-15);
    CHECK_THROWS_AS(taylor_polynomial(2, 3), Error);
}

TEST_CASE("basis evaluation agrees with the monomial form") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto kind : {BasisKind::ShiftedChebyshev, BasisKind::RotatedChebyshev, BasisKind::Binomial}) {
        const double scale = kind == BasisKind::ShiftedChebyshev ? -6.0 : 3.0;
        const Basis b = make_basis(kind, 7, scale);
        std::vector<double> a(8);
        for (auto& x : a) x = u(rng);
        const auto c = to_monomial(b, a);
        for (int i = 0; i < 100; ++i) {
            const Complex z = std::abs(scale) * std::sqrt(std::abs(u(rng))) * std::polar(1.0, 3.14159265358979 * u(rng));
            const auto q = eval_basis(b, z);
            Complex direct = 0.0;
            for (int j = 0; j <= 7; ++j) direct += a[j] * q[j];
            const Complex horner = oracle::horner(c, z);
            CHECK(std::abs(direct - horner) <= 1e-8 * std::max(1.0, std::abs(direct)));
        }
    }
}
