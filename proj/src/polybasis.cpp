#include "stabopt/polybasis.hpp"

#include <cmath>

#include "stabopt/error.hpp"

namespace stabopt {

std::string_view to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::Monomial: return "monomial";
        case BasisKind::ShiftedChebyshev: return "chebyshev";
        case BasisKind::RotatedChebyshev: return "rotated";
        case BasisKind::Binomial: return "binomial";
    }
    return "unknown";
}

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "monomial") return BasisKind::Monomial;
    if (name == "chebyshev" || name == "shifted-chebyshev") return BasisKind::ShiftedChebyshev;
    if (name == "rotated" || name == "rotated-chebyshev") return BasisKind::RotatedChebyshev;
    if (name == "binomial") return BasisKind::Binomial;
    fail(ErrorKind::InvalidParameter, "unknown basis kind '" + std::string(name) + "'");
}

namespace {

// Each kind is a two-term or three-term recurrence
//   Q_{j+1}(z) = (alpha + beta z) Q_j(z) + gamma Q_{j-1}(z),  Q_1(z) = alpha1 + beta1 z.
struct Recurrence {
    double alpha1, beta1;
    double alpha, beta, gamma;
};

Recurrence recurrence_for(BasisKind kind, double c) {
    switch (kind) {
        case BasisKind::Monomial: return {0.0, 1.0, 0.0, 1.0, 0.0};
        case BasisKind::ShiftedChebyshev: return {1.0, -2.0 / c, 2.0, -4.0 / c, -1.0};
        // i^{j+1} T_{j+1}(iz/c) = -(2z/c) i^j T_j(iz/c) + i^{j-1} T_{j-1}(iz/c)
        case BasisKind::RotatedChebyshev: return {0.0, -1.0 / c, 0.0, -2.0 / c, 1.0};
        case BasisKind::Binomial: return {1.0, 1.0 / c, 1.0, 1.0 / c, 0.0};
    }
    return {0.0, 1.0, 0.0, 1.0, 0.0};
}

}  // namespace

Basis::Basis(BasisKind kind, int degree, double scale) : kind_(kind), degree_(degree), scale_(scale) {
    if (degree < 0) fail(ErrorKind::InvalidParameter, "basis degree must be nonnegative");
    if (kind != BasisKind::Monomial && (scale == 0.0 || !std::isfinite(scale))) {
        fail(ErrorKind::InvalidParameter,
             "basis '" + std::string(to_string(kind)) + "' needs a finite nonzero scale");
    }
    if (kind == BasisKind::Monomial) scale_ = 1.0;

    const int n = degree + 1;
    coeffs_ = Eigen::MatrixXd::Zero(n, n);
    coeffs_(0, 0) = 1.0;
    if (degree == 0) return;
    const Recurrence rec = recurrence_for(kind_, scale_);
    coeffs_(1, 0) = rec.alpha1;
    coeffs_(1, 1) = rec.beta1;
    for (int j = 1; j < degree; ++j) {
        for (int k = 0; k <= j + 1; ++k) {
            double v = 0.0;
            if (k <= j) v += rec.alpha * coeffs_(j, k);
            if (k >= 1) v += rec.beta * coeffs_(j, k - 1);
            if (k <= j - 1) v += rec.gamma * coeffs_(j - 1, k);
            coeffs_(j + 1, k) = v;
        }
    }
}

void Basis::eval_into(Complex z, std::span<Complex> out) const {
    out[0] = 1.0;
    if (degree_ == 0) return;
    const Recurrence rec = recurrence_for(kind_, scale_);
    out[1] = rec.alpha1 + rec.beta1 * z;
    const Complex factor = rec.alpha + rec.beta * z;
    for (int j = 1; j < degree_; ++j) out[j + 1] = factor * out[j] + rec.gamma * out[j - 1];
}

std::vector<Complex> Basis::eval(Complex z) const {
    std::vector<Complex> out(static_cast<std::size_t>(degree_) + 1);
    eval_into(z, out);
    return out;
}

Basis make_basis(BasisKind kind, int s, double scale) { return Basis(kind, s, scale); }

Complex StabilityPolynomial::operator()(Complex z) const {
    Complex acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Complex StabilityPolynomial::derivative(Complex z) const {
    Complex acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 1;) acc = acc * z + static_cast<double>(j) * coeffs[j];
    return acc;
}

double StabilityPolynomial::order_residual() const {
    double worst = 0.0;
    double factorial = 1.0;
    for (int j = 0; j <= order && j < static_cast<int>(coeffs.size()); ++j) {
        if (j > 0) factorial *= j;
        worst = std::max(worst, std::abs(coeffs[j] - 1.0 / factorial));
    }
    return worst;
}

void StabilityPolynomial::validate(double tol) const {
    if (stages < 0 || order < 0 || order > stages) {
        fail(ErrorKind::InvalidParameter, "stability polynomial needs 0 <= p <= s");
    }
    if (static_cast<int>(coeffs.size()) != stages + 1) {
        fail(ErrorKind::InvalidParameter, "stability polynomial needs s+1 coefficients");
    }
    for (double c : coeffs) {
        if (!std::isfinite(c)) fail(ErrorKind::InvalidParameter, "non-finite coefficient");
    }
    if (order_residual() > tol) {
        fail(ErrorKind::InvalidParameter, "order conditions violated");
    }
}

StabilityPolynomial taylor_polynomial(int s, int p) {
    if (p < 0 || p > s) fail(ErrorKind::InvalidParameter, "taylor polynomial needs 0 <= p <= s");
    StabilityPolynomial poly{s, p, std::vector<double>(static_cast<std::size_t>(s) + 1, 0.0)};
    double factorial = 1.0;
    for (int j = 0; j <= p; ++j) {
        if (j > 0) factorial *= j;
        poly.coeffs[j] = 1.0 / factorial;
    }
    return poly;
}

std::vector<double> to_monomial(const Basis& basis, std::span<const double> a) {
    const int n = basis.degree() + 1;
    if (static_cast<int>(a.size()) != n) {
        fail(ErrorKind::InvalidParameter, "coefficient vector length does not match basis degree");
    }
    std::vector<double> c(n, 0.0);
    const auto& b = basis.coeffs();
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = k; j < n; ++j) acc += a[j] * b(j, k);
        c[k] = acc;
    }
    return c;
}

OrderConditionSystem order_condition_system(const Basis& basis, int p) {
    const int s = basis.degree();
    if (p < 0 || p > s) fail(ErrorKind::InvalidParameter, "order conditions need 0 <= p <= s");
    OrderConditionSystem sys;
    sys.matrix = basis.coeffs().leftCols(p + 1).transpose();
    sys.rhs.resize(p + 1);
    double factorial = 1.0;
    for (int k = 0; k <= p; ++k) {
        if (k > 0) factorial *= k;
        sys.rhs[k] = 1.0 / factorial;
    }
    return sys;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
    Eigen::MatrixXd scaled = m;
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
        const double norm = scaled.row(i).norm();
        if (norm > 0.0) scaled.row(i) /= norm;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled.transpose());
    qr.setThreshold(rel_tol);
    return static_cast<int>(qr.rank());
}

}  // namespace stabopt
