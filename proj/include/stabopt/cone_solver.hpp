#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace stabopt {

/// Dense conic program
///
///     minimize    c'x
///     subject to  G x + s = h,   s in K = K_1 x ... x K_m
///
/// where each K_i is a second-order cone {(s0, s1): s0 >= |s1|} of dimension
/// cone_dims[i] (dimension 1 is the nonnegative ray). The dual is
///
///     maximize   -h'z   subject to  G'z + c = 0,  z in K.
struct ConeProgram {
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    Eigen::VectorXd c;
    std::vector<int> cone_dims;
};

struct ConeIterate {
    Eigen::VectorXd x, s, z;
};

struct ConeSolverOptions {
    double gap_tol = 1e-9;   // on s'z, relative to max(1, |c'x|)
    double feas_tol = 1e-9;  // on scaled primal and dual residuals
    /// Dual residual still accepted when the iteration breaks down after reaching
    /// the gap and primal targets.
    double reduced_feas_tol = 1e-6;
    int max_iterations = 200;
};

enum class ConeStatus { Optimal, MaxIterations, NumericalFailure };

struct ConeSolution {
    ConeStatus status = ConeStatus::NumericalFailure;
    ConeIterate point;
    int iterations = 0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector. `start` must have s and z strictly inside K;
/// x need not satisfy the equality constraints.
ConeSolution solve_cone_program(const ConeProgram& problem, const ConeIterate& start,
                                const ConeSolverOptions& options = {});

}  // namespace stabopt
