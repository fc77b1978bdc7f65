#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace stabopt {

using Complex = std::complex<double>;

enum class BasisKind {
    Monomial,
    ShiftedChebyshev,  // T_j(1 - 2z/scale): maps [scale, 0] onto [-1, 1]; scale = h*min Re(lambda) < 0
    RotatedChebyshev,  // i^j T_j(iz/scale), scale = h*max |Im(lambda)|
    Binomial,          // (1 + z/scale)^j, scale = h
};

std::string_view to_string(BasisKind kind);
/// Accepts "monomial", "chebyshev" / "shifted-chebyshev", "rotated" / "rotated-chebyshev",
/// "binomial". Throws InvalidParameter otherwise.
BasisKind parse_basis_kind(std::string_view name);

/// Degree-s polynomial basis Q_0..Q_s with Q_j(z) = sum_k b_jk z^k.
///
/// The expansion matrix is lower triangular with a nonzero diagonal. It is
/// only used to move between representations; values are always computed
/// by recurrence (see eval), since the expansion loses accuracy at large |z|.
class Basis {
public:
    Basis() : Basis(BasisKind::Monomial, 0, 1.0) {}
    Basis(BasisKind kind, int degree, double scale);

    [[nodiscard]] BasisKind kind() const noexcept { return kind_; }
    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] const Eigen::MatrixXd& coeffs() const noexcept { return coeffs_; }

    /// Q_0(z)..Q_s(z).
    [[nodiscard]] std::vector<Complex> eval(Complex z) const;
    /// Same as eval, written into a caller-provided buffer of size degree()+1.
    void eval_into(Complex z, std::span<Complex> out) const;

private:
    BasisKind kind_;
    int degree_;
    double scale_;
    Eigen::MatrixXd coeffs_;
};

/// Throws InvalidParameter for s < 0 or a zero scale on a scaled kind.
Basis make_basis(BasisKind kind, int s, double scale = 1.0);

inline std::vector<Complex> eval_basis(const Basis& basis, Complex z) { return basis.eval(z); }

/// Tolerance for asserting a_j = 1/j!, j <= p.
inline constexpr double kOrderConditionTol = 1e-9;

struct StabilityPolynomial {
    int stages = 0;
    int order = 0;
    std::vector<double> coeffs;  // monomial a_0..a_s

    /// Horner evaluation of sum a_j z^j.
    [[nodiscard]] Complex operator()(Complex z) const;
    /// R'(z).
    [[nodiscard]] Complex derivative(Complex z) const;
    /// max_j<=p |a_j - 1/j!|.
    [[nodiscard]] double order_residual() const;
    /// Throws InvalidParameter if the shape is wrong or order conditions fail.
    void validate(double tol = kOrderConditionTol) const;
};

/// The degree-p Taylor polynomial of exp padded to s stages with zeros.
StabilityPolynomial taylor_polynomial(int s, int p);

/// c_k = sum_j a_j b_jk.
std::vector<double> to_monomial(const Basis& basis, std::span<const double> a);

/// Equality constraints sum_j a_j b_jk = 1/k!, k = 0..p, on basis coefficients a.
struct OrderConditionSystem {
    Eigen::MatrixXd matrix;  // (p+1) x (s+1), matrix(k, j) = b_jk
    Eigen::VectorXd rhs;     // 1/k!
};

OrderConditionSystem order_condition_system(const Basis& basis, int p);

/// Numerical rank at relative tolerance rel_tol after row equilibration.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

}  // namespace stabopt
