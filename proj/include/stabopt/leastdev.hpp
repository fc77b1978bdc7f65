#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabopt/polybasis.hpp"
#include "stabopt/spectra.hpp"

namespace stabopt {

/// Least-deviation problem at a fixed step size: choose basis coefficients a
/// satisfying the order conditions so as to minimize max_k |sum_j a_j Q_j(h lambda_k)| - 1.
struct LeastDevProblem {
    double h = 0.0;
    int s = 0;
    int p = 0;
    Basis basis;
    std::vector<Complex> scaled_points;  // h * lambda
    /// Row k holds Q_0..Q_s at scaled_points[k].
    Eigen::MatrixXcd rows;
    OrderConditionSystem order_system;
};

/// Builds the scaled points (dropping conjugates when the spectrum allows it),
/// constraint rows and order-condition system.
/// Throws InvalidInput on an empty spectrum, InvalidParameter on bad h, s, p.
LeastDevProblem assemble(const Spectrum& spectrum, double h, const Basis& basis, int s, int p);

enum class Formulation {
    Socp,     // one 3-dimensional cone per point
    Polygon,  // each modulus bound replaced by a circumscribed regular polygon
};

struct LeastDevOptions {
    Formulation formulation = Formulation::Socp;
    int polygon_sides = 64;
    double solver_tol = 1e-9;
    int max_iterations = 200;
};

enum class SolveStatus { Solved, MaxIterations, NumericalFailure };

std::string_view to_string(SolveStatus status);

struct LeastDevSolution {
    /// max_k |R(h lambda_k)| - 1 for the returned polynomial.
    double r = 0.0;
    std::vector<double> coeffs_basis;
    StabilityPolynomial polynomial;
    SolveStatus status = SolveStatus::NumericalFailure;
    /// Final duality gap of the cone program (0 when no solve was needed).
    double gap = 0.0;
    int iterations = 0;
    Formulation formulation = Formulation::Socp;
    /// Only computed on numerical failure; see estimate_condition.
    double condition_estimate = 0.0;
};

/// Globally optimal solution of the convex least-deviation program.
/// Throws RankDeficient when the order conditions cannot be imposed in the basis.
LeastDevSolution solve_least_deviation(const LeastDevProblem& problem, const LeastDevOptions& options = {});

/// 2-norm condition number estimate of the stacked (Re; Im) constraint matrix.
/// Returns +infinity when the matrix is singular to working precision.
double estimate_condition(const LeastDevProblem& problem);
double estimate_condition(const Eigen::MatrixXd& a);

/// Real (Re; Im) stacking of the constraint rows; all-zero imaginary rows are omitted.
Eigen::MatrixXd stacked_constraint_matrix(const LeastDevProblem& problem);

/// Particular solution and orthonormal null-space basis of the order-condition system.
struct OrderConditionSolution {
    Eigen::VectorXd particular;
    Eigen::MatrixXd null_space;  // (s+1) x (s-p)
};

OrderConditionSolution solve_order_conditions(const OrderConditionSystem& system);

}  // namespace stabopt
