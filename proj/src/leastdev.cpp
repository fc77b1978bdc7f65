#include "stabopt/leastdev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stabopt/cone_solver.hpp"
#include "stabopt/error.hpp"

namespace stabopt {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Solved: return "solved";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

LeastDevProblem assemble(const Spectrum& spectrum, double h, const Basis& basis, int s, int p) {
    validate(spectrum);
    if (!(h >= 0.0) || !std::isfinite(h)) fail(ErrorKind::InvalidParameter, "step size must be finite and >= 0");
    if (p < 0 || p > s) fail(ErrorKind::InvalidParameter, "least deviation needs 0 <= p <= s");
    if (basis.degree() != s) fail(ErrorKind::InvalidParameter, "basis degree does not match s");

    LeastDevProblem problem;
    problem.h = h;
    problem.s = s;
    problem.p = p;
    problem.basis = basis;
    const bool reduce = spectrum.closed_under_conjugation && !spectrum.half_plane_reduced;
    const Spectrum& source = spectrum;
    for (const auto& lambda : source.points) {
        if (reduce && lambda.imag() < -kSymmetryTol) continue;
        problem.scaled_points.push_back(h * lambda);
    }
    const auto count = static_cast<Index>(problem.scaled_points.size());
    problem.rows.resize(count, s + 1);
    std::vector<Complex> buffer(static_cast<std::size_t>(s) + 1);
    for (Index k = 0; k < count; ++k) {
        basis.eval_into(problem.scaled_points[k], buffer);
        for (int j = 0; j <= s; ++j) problem.rows(k, j) = buffer[j];
    }
    problem.order_system = order_condition_system(basis, p);
    return problem;
}

OrderConditionSolution solve_order_conditions(const OrderConditionSystem& system) {
    const Index rows = system.matrix.rows();
    const Index cols = system.matrix.cols();
    // Row equilibration leaves the solution set unchanged.
    MatrixXd scaled = system.matrix;
    VectorXd rhs = system.rhs;
    for (Index i = 0; i < rows; ++i) {
        const double norm = scaled.row(i).norm();
        if (norm == 0.0) fail(ErrorKind::RankDeficient, "order-condition row " + std::to_string(i) + " is zero");
        scaled.row(i) /= norm;
        rhs[i] /= norm;
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(scaled.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() < rows) {
        fail(ErrorKind::RankDeficient, "order-condition system has rank " + std::to_string(qr.rank()) + " < " +
                                           std::to_string(rows));
    }
    const MatrixXd q = qr.householderQ();
    const MatrixXd r1 = qr.matrixR().topLeftCorner(rows, rows).triangularView<Eigen::Upper>();
    const VectorXd permuted = qr.colsPermutation().transpose() * rhs;
    const VectorXd w = r1.transpose().triangularView<Eigen::Lower>().solve(permuted);

    OrderConditionSolution out;
    out.particular = q.leftCols(rows) * w;
    out.null_space = q.rightCols(cols - rows);
    return out;
}

MatrixXd stacked_constraint_matrix(const LeastDevProblem& problem) {
    const Index count = problem.rows.rows();
    std::vector<Index> imag_rows;
    for (Index k = 0; k < count; ++k) {
        if (problem.rows.row(k).imag().cwiseAbs().maxCoeff() > 0.0) imag_rows.push_back(k);
    }
    MatrixXd a(count + static_cast<Index>(imag_rows.size()), problem.rows.cols());
    a.topRows(count) = problem.rows.real();
    for (std::size_t i = 0; i < imag_rows.size(); ++i) a.row(count + static_cast<Index>(i)) = problem.rows.row(imag_rows[i]).imag();
    return a;
}

double estimate_condition(const MatrixXd& a) {
    const Index n = a.cols();
    if (a.rows() < n || n == 0) return std::numeric_limits<double>::infinity();

    // Largest singular value: power iteration on A'A.
    VectorXd v = VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double sigma_max = 0.0;
    for (int it = 0; it < 200; ++it) {
        VectorXd w = a.transpose() * (a * v);
        const double norm = w.norm();
        if (norm == 0.0) return std::numeric_limits<double>::infinity();
        const double next = std::sqrt(norm);
        v = w / norm;
        if (it > 5 && std::abs(next - sigma_max) <= 1e-10 * next) {
            sigma_max = next;
            break;
        }
        sigma_max = next;
    }

    // Smallest singular value: inverse iteration with the triangular QR factor (A = QR).
    Eigen::HouseholderQR<MatrixXd> qr(a);
    const MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const double diag_max = r.diagonal().cwiseAbs().maxCoeff();
    if (r.diagonal().cwiseAbs().minCoeff() <= std::numeric_limits<double>::epsilon() * diag_max) {
        return std::numeric_limits<double>::infinity();
    }
    v = VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    double inv_sigma_min = 0.0;
    for (int it = 0; it < 200; ++it) {
        VectorXd w = r.triangularView<Eigen::Upper>().transpose().solve(v);
        w = r.triangularView<Eigen::Upper>().solve(w);
        const double norm = w.norm();
        if (!std::isfinite(norm)) return std::numeric_limits<double>::infinity();
        const double next = std::sqrt(norm);
        v = w / norm;
        if (it > 5 && std::abs(next - inv_sigma_min) <= 1e-10 * next) {
            inv_sigma_min = next;
            break;
        }
        inv_sigma_min = next;
    }
    const double cond = sigma_max * inv_sigma_min;
    return std::isfinite(cond) ? cond : std::numeric_limits<double>::infinity();
}

double estimate_condition(const LeastDevProblem& problem) { return estimate_condition(stacked_constraint_matrix(problem)); }

namespace {

LeastDevSolution finish_solution(const LeastDevProblem& problem, const VectorXd& a) {
    LeastDevSolution sol;
    sol.coeffs_basis.assign(a.data(), a.data() + a.size());
    sol.polynomial.stages = problem.s;
    sol.polynomial.order = problem.p;
    sol.polynomial.coeffs = to_monomial(problem.basis, sol.coeffs_basis);
    double factorial = 1.0;
    for (int k = 0; k <= problem.p; ++k) {
        if (k > 0) factorial *= k;
        sol.polynomial.coeffs[k] = 1.0 / factorial;
    }
    const Eigen::VectorXcd values = problem.rows * a.cast<Complex>();
    sol.r = values.cwiseAbs().maxCoeff() - 1.0;
    return sol;
}

}  // namespace

LeastDevSolution solve_least_deviation(const LeastDevProblem& problem, const LeastDevOptions& options) {
    if (problem.rows.rows() == 0) fail(ErrorKind::InvalidInput, "least deviation problem has no points");
    const OrderConditionSolution oc = solve_order_conditions(problem.order_system);
    const Index free = oc.null_space.cols();
    if (free == 0) {
        LeastDevSolution sol = finish_solution(problem, oc.particular);
        sol.status = SolveStatus::Solved;
        sol.formulation = options.formulation;
        return sol;
    }

    // R(h lambda_k) = offset_k + coupling_k . y with a = particular + N y.
    const Eigen::VectorXcd offset = problem.rows * oc.particular.cast<Complex>();
    Eigen::MatrixXcd coupling = problem.rows * oc.null_space.cast<Complex>();
    VectorXd column_scale(free);
    for (Index j = 0; j < free; ++j) {
        const double norm = coupling.col(j).norm();
        column_scale[j] = norm > 0.0 ? 1.0 / norm : 1.0;
        coupling.col(j) *= column_scale[j];
    }

    const Index count = coupling.rows();
    std::vector<bool> is_real(count);
    for (Index k = 0; k < count; ++k) {
        is_real[k] = offset[k].imag() == 0.0 && coupling.row(k).imag().cwiseAbs().maxCoeff() == 0.0;
    }

    // Variables x = (y, t); minimize t.
    ConeProgram cp;
    cp.c = VectorXd::Zero(free + 1);
    cp.c[free] = 1.0;
    const double tmax = offset.cwiseAbs().maxCoeff();
    const double t0 = 1.0 + 1.1 * tmax;

    Index rows = 0;
    const int sides = std::max(4, options.polygon_sides + options.polygon_sides % 2);
    for (Index k = 0; k < count; ++k) {
        if (options.formulation == Formulation::Socp) {
            rows += is_real[k] ? 2 : 3;
        } else {
            rows += is_real[k] ? 2 : sides;
        }
    }
    cp.G = MatrixXd::Zero(rows, free + 1);
    cp.h = VectorXd::Zero(rows);
    ConeIterate start;
    start.x = VectorXd::Zero(free + 1);
    start.x[free] = t0;
    start.s.resize(rows);
    start.z = VectorXd::Zero(rows);

    Index row = 0;
    if (options.formulation == Formulation::Socp) {
        const double zweight = 1.0 / static_cast<double>(count);
        for (Index k = 0; k < count; ++k) {
            const Index q = is_real[k] ? 2 : 3;
            cp.cone_dims.push_back(static_cast<int>(q));
            // s = (t, Re R, Im R) = h - G x
            cp.G(row, free) = -1.0;
            cp.G.row(row + 1).head(free) = -coupling.row(k).real();
            cp.h[row + 1] = offset[k].real();
            if (q == 3) {
                cp.G.row(row + 2).head(free) = -coupling.row(k).imag();
                cp.h[row + 2] = offset[k].imag();
            }
            start.s.segment(row, q) = cp.h.segment(row, q);
            start.s[row] = t0;
            start.z[row] = zweight;
            row += q;
        }
    } else {
        const Index halfplanes = rows;
        const double zweight = 1.0 / static_cast<double>(halfplanes);
        for (Index k = 0; k < count; ++k) {
            const int q = is_real[k] ? 2 : sides;
            for (int i = 0; i < q; ++i) {
                const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / q;
                const double cs = std::cos(theta);
                const double sn = is_real[k] ? 0.0 : std::sin(theta);
                // t - (cos Re R + sin Im R) >= 0
                cp.cone_dims.push_back(1);
                cp.G(row, free) = -1.0;
                cp.G.row(row).head(free) = cs * coupling.row(k).real() + sn * coupling.row(k).imag();
                cp.h[row] = -(cs * offset[k].real() + sn * offset[k].imag());
                start.s[row] = t0 + cp.h[row];
                start.z[row] = zweight;
                ++row;
            }
        }
    }

    ConeSolverOptions copts;
    copts.gap_tol = options.solver_tol;
    copts.feas_tol = options.solver_tol;
    copts.max_iterations = options.max_iterations;
    const ConeSolution cs = solve_cone_program(cp, start, copts);

    const VectorXd y = column_scale.cwiseProduct(cs.point.x.head(free));
    VectorXd a = oc.particular + oc.null_space * y;
    if (!a.allFinite()) a = oc.particular;
    LeastDevSolution sol = finish_solution(problem, a);
    sol.gap = cs.gap;
    sol.iterations = cs.iterations;
    sol.formulation = options.formulation;
    switch (cs.status) {
        case ConeStatus::Optimal: sol.status = SolveStatus::Solved; break;
        case ConeStatus::MaxIterations: sol.status = SolveStatus::MaxIterations; break;
        case ConeStatus::NumericalFailure: sol.status = SolveStatus::NumericalFailure; break;
    }
    if (sol.status == SolveStatus::NumericalFailure) sol.condition_estimate = estimate_condition(problem);
    return sol;
}

}  // namespace stabopt
