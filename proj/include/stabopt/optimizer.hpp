#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stabopt/leastdev.hpp"
#include "stabopt/polybasis.hpp"
#include "stabopt/spectra.hpp"

namespace stabopt {

/// One bisection midpoint: the step (or kappa), the least-deviation optimum there,
/// whether it moved the lower end of the bracket, and the discretization size used.
struct BisectionStep {
    double h = 0.0;
    double r = 0.0;
    bool accepted = false;
    int n = 0;
};

struct BisectionResult {
    double H = 0.0;
    StabilityPolynomial polynomial;
    std::pair<double, double> bracket{0.0, 0.0};
    std::vector<BisectionStep> history;
    double eps_bisect = 0.0;
    double eps_feas = 0.0;
    /// Only meaningful for optimize_h_sip.
    bool certified = false;
    int n_final = 0;
    /// r at the final h_min, re-solved.
    double r_final = 0.0;
    BasisKind basis = BasisKind::ShiftedChebyshev;
};

struct RectangleResult {
    double kappa = 0.0;
    StabilityPolynomial polynomial;
    std::pair<double, double> bracket{0.0, 0.0};
    std::vector<BisectionStep> history;
    double eps_bisect = 0.0;
    double eps_feas = 0.0;
};

inline constexpr double kDefaultFeasibilityThreshold = 1e-7;
inline constexpr double kDefaultRelativeBisectionTol = 1e-4;

struct OptimizeOptions {
    double eps_feas = kDefaultFeasibilityThreshold;
    /// Absolute bracket tolerance; when unset, eps_bisect_rel times the initial bracket width.
    std::optional<double> eps_bisect;
    double eps_bisect_rel = kDefaultRelativeBisectionTol;
    LeastDevOptions solver;
    int max_doublings = 60;
};

/// 2 s^2 / max|lambda|. Throws InvalidInput when every point is zero.
double initial_hmax(const Spectrum& spectrum, int s);

/// Basis scale for step h: h * min Re(lambda) (Chebyshev), h * max |Im(lambda)| (rotated),
/// h (binomial), 1 (monomial). Falls back to h * max|lambda| when the preferred extent is zero.
double basis_scale(BasisKind kind, const Spectrum& spectrum, double h);

/// Least-deviation optimum r(h, spectrum) in a basis rebuilt for h. Retries a failed
/// solve once with the polygon formulation; throws SolverFailure if that fails too.
LeastDevSolution solve_at(const Spectrum& spectrum, double h, int s, int p, BasisKind kind,
                          const LeastDevOptions& options = {});

/// Bisection on h accepting r < eps_feas. The initial upper bound is doubled
/// until rejected.
BisectionResult optimize_h(const Spectrum& spectrum, int s, int p, BasisKind kind, const OptimizeOptions& options = {});

struct SipOptions {
    double eps_bisect = 0.0;  // absolute; 0 selects 1e-3 * initial width
    int n0 = 64;
    int n_cap = 1 << 20;
    /// |r| at or below this is indistinguishable from zero and triggers refinement.
    double zero_tol = 1e-10;
    LeastDevOptions solver;
};

/// Bisection for continuous spectra: feasibility is only accepted once the
/// Lipschitz certificate nu_n < -2 r / L holds, infeasibility once r > 0 on a
/// sample set; otherwise the discretization is refined.
BisectionResult optimize_h_sip(const SpectrumGenerator& generator, int s, int p, BasisKind kind,
                               const SipOptions& options = {});

/// sum_{j>=1} j |a_j| rho^{j-1}: a bound on |R'(z)| for |z| <= rho.
double lipschitz_bound(const StabilityPolynomial& poly, double rho);

struct RectangleOptions {
    double eps_feas = kDefaultFeasibilityThreshold;
    std::optional<double> eps_bisect;
    double eps_bisect_rel = kDefaultRelativeBisectionTol;
    int n = 512;
    LeastDevOptions solver;
};

/// Largest kappa such that h * ([-kappa, 0] x [-beta, beta]) fits in the
/// stability region of some order-p, s-stage polynomial. Throws Infeasible
/// when even a vanishing kappa cannot be accommodated.
RectangleResult max_kappa(double h, double beta, int s, int p, const RectangleOptions& options = {});

}  // namespace stabopt
