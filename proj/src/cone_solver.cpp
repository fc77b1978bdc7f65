#include "stabopt/cone_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "stabopt/error.hpp"

namespace stabopt {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// s0^2 - |s1|^2 computed as a product to limit cancellation.
double jnorm_sq(const Eigen::Ref<const VectorXd>& v) {
    if (v.size() == 1) return v[0] * v[0];
    const double tail = v.tail(v.size() - 1).norm();
    return (v[0] - tail) * (v[0] + tail);
}

bool strictly_inside(const Eigen::Ref<const VectorXd>& v) {
    if (v.size() == 1) return v[0] > 0.0;
    return v[0] > v.tail(v.size() - 1).norm();
}

// Nesterov-Todd scaling W for a product of second-order cones: W z = W^{-1} s = lambda.
class Scaling {
public:
    Scaling(const std::vector<int>& dims, const std::vector<Index>& offsets) : dims_(dims), offsets_(offsets) {
        eta_.resize(dims.size());
        wbar_.resize(offsets.back());
    }

    // Returns false if s or z left the cone interior.
    bool update(const VectorXd& s, const VectorXd& z) {
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const Index off = offsets_[k];
            const Index q = dims_[k];
            const auto sk = s.segment(off, q);
            const auto zk = z.segment(off, q);
            if (!strictly_inside(sk) || !strictly_inside(zk)) return false;
            if (q == 1) {
                eta_[k] = std::sqrt(sk[0] / zk[0]);
                continue;
            }
            const double snorm = std::sqrt(jnorm_sq(sk));
            const double znorm = std::sqrt(jnorm_sq(zk));
            if (!(snorm > 0.0) || !(znorm > 0.0)) return false;
            const VectorXd sbar = sk / snorm;
            const VectorXd zbar = zk / znorm;
            const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
            auto w = wbar_.segment(off, q);
            w[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
            w.tail(q - 1) = (sbar.tail(q - 1) - zbar.tail(q - 1)) / (2.0 * gamma);
            eta_[k] = std::sqrt(snorm / znorm);
        }
        return true;
    }

    // y = W x (inverse = false) or y = W^{-1} x, applied to every column of x.
    void apply(const Eigen::Ref<const MatrixXd>& x, Eigen::Ref<MatrixXd> y, bool inverse) const {
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const Index off = offsets_[k];
            const Index q = dims_[k];
            const double eta = inverse ? 1.0 / eta_[k] : eta_[k];
            if (q == 1) {
                y.row(off) = eta * x.row(off);
                continue;
            }
            const auto w = wbar_.segment(off, q);
            const double w0 = w[0];
            const auto w1 = w.tail(q - 1);
            const double sign = inverse ? -1.0 : 1.0;
            for (Index col = 0; col < x.cols(); ++col) {
                const double x0 = x(off, col);
                const auto x1 = x.col(col).segment(off + 1, q - 1);
                const double d = w1.dot(x1);
                y(off, col) = eta * (w0 * x0 + sign * d);
                y.col(col).segment(off + 1, q - 1) = eta * (x1 + (d / (1.0 + w0) + sign * x0) * w1);
            }
        }
    }

    [[nodiscard]] VectorXd apply(const VectorXd& x, bool inverse) const {
        VectorXd y(x.size());
        apply(x, y, inverse);
        return y;
    }

private:
    const std::vector<int>& dims_;
    const std::vector<Index>& offsets_;
    std::vector<double> eta_;
    VectorXd wbar_;
};

struct ConeLayout {
    std::vector<int> dims;
    std::vector<Index> offsets;  // size m + 1

    [[nodiscard]] std::size_t count() const { return dims.size(); }
};

// u o v
VectorXd jordan_product(const ConeLayout& layout, const VectorXd& u, const VectorXd& v) {
    VectorXd out(u.size());
    for (std::size_t k = 0; k < layout.count(); ++k) {
        const Index off = layout.offsets[k];
        const Index q = layout.dims[k];
        out[off] = u.segment(off, q).dot(v.segment(off, q));
        if (q > 1) out.segment(off + 1, q - 1) = u[off] * v.segment(off + 1, q - 1) + v[off] * u.segment(off + 1, q - 1);
    }
    return out;
}

// x with lambda o x = d
VectorXd jordan_divide(const ConeLayout& layout, const VectorXd& lambda, const VectorXd& d) {
    VectorXd out(d.size());
    for (std::size_t k = 0; k < layout.count(); ++k) {
        const Index off = layout.offsets[k];
        const Index q = layout.dims[k];
        const auto l = lambda.segment(off, q);
        const auto dk = d.segment(off, q);
        if (q == 1) {
            out[off] = dk[0] / l[0];
            continue;
        }
        const auto l1 = l.tail(q - 1);
        const double x0 = (l[0] * dk[0] - l1.dot(dk.tail(q - 1))) / jnorm_sq(l);
        out[off] = x0;
        out.segment(off + 1, q - 1) = (dk.tail(q - 1) - x0 * l1) / l[0];
    }
    return out;
}

// sup { a : lambda + a d in K }
double max_step(const ConeLayout& layout, const VectorXd& lambda, const VectorXd& d) {
    double alpha = kInf;
    for (std::size_t k = 0; k < layout.count(); ++k) {
        const Index off = layout.offsets[k];
        const Index q = layout.dims[k];
        if (q == 1) {
            if (d[off] < 0.0) alpha = std::min(alpha, -lambda[off] / d[off]);
            continue;
        }
        const auto l = lambda.segment(off, q);
        const auto dk = d.segment(off, q);
        const double lnorm = std::sqrt(jnorm_sq(l));
        const VectorXd lbar = l / lnorm;
        const double rho0 = lbar[0] * dk[0] - lbar.tail(q - 1).dot(dk.tail(q - 1));
        const VectorXd rho1 = dk.tail(q - 1) - (rho0 + dk[0]) / (lbar[0] + 1.0) * lbar.tail(q - 1);
        const double denom = (rho1.norm() - rho0) / lnorm;
        if (denom > 0.0) alpha = std::min(alpha, 1.0 / denom);
    }
    return alpha;
}

VectorXd identity_element(const ConeLayout& layout) {
    VectorXd e = VectorXd::Zero(layout.offsets.back());
    for (std::size_t k = 0; k < layout.count(); ++k) e[layout.offsets[k]] = 1.0;
    return e;
}

}  // namespace

ConeSolution solve_cone_program(const ConeProgram& problem, const ConeIterate& start, const ConeSolverOptions& options) {
    const Index n = problem.G.cols();
    const Index m = problem.G.rows();
    ConeLayout layout;
    layout.dims = problem.cone_dims;
    layout.offsets.reserve(layout.dims.size() + 1);
    layout.offsets.push_back(0);
    for (int q : layout.dims) {
        if (q < 1) fail(ErrorKind::InvalidParameter, "cone dimension must be positive");
        layout.offsets.push_back(layout.offsets.back() + q);
    }
    if (layout.offsets.back() != m || problem.h.size() != m || problem.c.size() != n) {
        fail(ErrorKind::InvalidParameter, "cone program dimensions are inconsistent");
    }
    if (start.x.size() != n || start.s.size() != m || start.z.size() != m) {
        fail(ErrorKind::InvalidParameter, "starting point has the wrong shape");
    }

    const auto& G = problem.G;
    const auto& h = problem.h;
    const auto& c = problem.c;
    const double degree = static_cast<double>(layout.count());
    const double hscale = std::max(1.0, h.norm());
    const double cscale = std::max(1.0, c.norm());
    const VectorXd e = identity_element(layout);

    ConeSolution sol;
    sol.point = start;
    VectorXd& x = sol.point.x;
    VectorXd& s = sol.point.s;
    VectorXd& z = sol.point.z;

    Scaling W(layout.dims, layout.offsets);
    MatrixXd Gs(m, n);
    MatrixXd augmented(m + n, n);
    Eigen::HouseholderQR<MatrixXd> qr;
    MatrixXd R(n, n);

    const auto evaluate = [&]() {
        sol.primal_objective = c.dot(x);
        sol.dual_objective = -h.dot(z);
        sol.gap = s.dot(z);
        sol.primal_residual = (G * x + s - h).norm() / hscale;
        sol.dual_residual = (G.transpose() * z + c).norm() / cscale;
    };

    // Solves the linearized KKT system for a given complementarity target ds;
    // returns scaled directions (W^{-1} ds_dir, W dz_dir) and dx.
    const auto newton = [&](const VectorXd& bx, const VectorXd& bz, const VectorXd& lambda, const VectorXd& ds,
                            VectorXd& dx, VectorXd& ds_scaled, VectorXd& dz_scaled) {
        // (Gs'Gs) dx = bx + Gs'b, solved as a regularized least-squares problem
        // min |Gs dx - b|^2 + reg |dx|^2 - 2 bx'dx through the QR factor of [Gs; sqrt(reg) I].
        const VectorXd u = jordan_divide(layout, lambda, ds);
        const VectorXd bz_scaled = W.apply(bz, true);
        const VectorXd b = bz_scaled - u;
        const auto upper_solve = [&](const VectorXd& v) -> VectorXd { return R.triangularView<Eigen::Upper>().solve(v); };
        const auto lower_solve = [&](const VectorXd& v) -> VectorXd {
            return R.transpose().triangularView<Eigen::Lower>().solve(v);
        };
        const auto normal_solve = [&](const VectorXd& v) -> VectorXd { return upper_solve(lower_solve(v)); };
        VectorXd rhs_aug = VectorXd::Zero(m + n);
        rhs_aug.head(m) = b;
        rhs_aug.applyOnTheLeft(qr.householderQ().adjoint());
        dx = upper_solve(VectorXd(rhs_aug.head(n) + lower_solve(bx)));
        for (int refine = 0; refine < 2; ++refine) {
            const VectorXd residual = bx + Gs.transpose() * (b - Gs * dx);
            dx += normal_solve(residual);
        }
        dz_scaled = Gs * dx - b;
        ds_scaled = u - dz_scaled;
    };

    std::optional<ConeSolution> fallback;
    const auto give_up = [&](ConeStatus status) {
        if (fallback) {
            fallback->status = ConeStatus::Optimal;
            return *fallback;
        }
        sol.status = status;
        return sol;
    };

    int stalls = 0;
    for (sol.iterations = 0; sol.iterations <= options.max_iterations; ++sol.iterations) {
        evaluate();
        if (!std::isfinite(sol.gap) || !std::isfinite(sol.primal_residual) || !std::isfinite(sol.dual_residual)) {
            return give_up(ConeStatus::NumericalFailure);
        }
        if (sol.primal_residual <= options.feas_tol && sol.dual_residual <= options.feas_tol &&
            sol.gap <= options.gap_tol * std::max(1.0, std::abs(sol.primal_objective))) {
            sol.status = ConeStatus::Optimal;
            return sol;
        }
        // Near the boundary the dual update loses digits faster than Newton can
        // repair them; keep the last iterate that is accurate enough otherwise.
        if (sol.primal_residual <= options.feas_tol && sol.dual_residual <= options.reduced_feas_tol &&
            sol.gap <= options.gap_tol * std::max(1.0, std::abs(sol.primal_objective))) {
            fallback = sol;
        }
        if (sol.iterations == options.max_iterations) break;

        if (!W.update(s, z)) {
            return give_up(ConeStatus::NumericalFailure);
        }
        const VectorXd lambda = W.apply(z, false);
        W.apply(G, Gs, true);
        const double reg = 1e-13 * std::max(1.0, Gs.colwise().squaredNorm().maxCoeff());
        augmented.topRows(m) = Gs;
        augmented.bottomRows(n) = std::sqrt(reg) * MatrixXd::Identity(n, n);
        qr.compute(augmented);
        R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        if (!R.allFinite() || R.diagonal().cwiseAbs().minCoeff() == 0.0) {
            return give_up(ConeStatus::NumericalFailure);
        }

        const VectorXd bx = -(G.transpose() * z + c);
        const VectorXd bz = -(G * x + s - h);
        const double mu = lambda.squaredNorm() / degree;
        const VectorXd lambda_sq = jordan_product(layout, lambda, lambda);

        // Predictor.
        VectorXd dx, dsa, dza;
        newton(bx, bz, lambda, -lambda_sq, dx, dsa, dza);
        const double alpha_aff =
            std::min({1.0, max_step(layout, lambda, dsa), max_step(layout, lambda, dza)});
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

        // Corrector.
        const VectorXd target = -lambda_sq - jordan_product(layout, dsa, dza) + sigma * mu * e;
        VectorXd ds_scaled, dz_scaled;
        newton(bx, bz, lambda, target, dx, ds_scaled, dz_scaled);
        const double alpha_max = std::min(max_step(layout, lambda, ds_scaled), max_step(layout, lambda, dz_scaled));
        const double alpha = std::min(1.0, 0.99 * alpha_max);
        if (!(alpha > 1e-12)) {
            if (++stalls >= 3) return give_up(ConeStatus::NumericalFailure);
        } else {
            stalls = 0;
        }

        x += alpha * dx;
        s += alpha * W.apply(ds_scaled, false);
        z += alpha * W.apply(dz_scaled, true);
    }
    evaluate();
    return give_up(ConeStatus::MaxIterations);
}

}  // namespace stabopt
