#include "stabopt/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "stabopt/error.hpp"

namespace stabopt {

namespace {

void check_orders(int s, int p) {
    if (p < 1 || p > s) fail(ErrorKind::InvalidParameter, "optimization needs s >= p >= 1");
}

std::string format_h(double h) {
    std::ostringstream os;
    os.precision(10);
    os << h;
    return os.str();
}

}  // namespace

double initial_hmax(const Spectrum& spectrum, int s) {
    validate(spectrum);
    const double radius = spectrum.max_abs();
    if (!(radius > 0.0)) fail(ErrorKind::InvalidInput, "spectrum has no nonzero point");
    return 2.0 * s * s / radius;
}

double basis_scale(BasisKind kind, const Spectrum& spectrum, double h) {
    switch (kind) {
        case BasisKind::Monomial: return 1.0;
        case BasisKind::ShiftedChebyshev: {
            const double x = spectrum.min_real();
            return x < 0.0 ? h * x : -h * spectrum.max_abs();
        }
        case BasisKind::RotatedChebyshev: {
            const double x = spectrum.max_abs_imag();
            return x > 0.0 ? h * x : h * spectrum.max_abs();
        }
        case BasisKind::Binomial: return h;
    }
    return 1.0;
}

LeastDevSolution solve_at(const Spectrum& spectrum, double h, int s, int p, BasisKind kind,
                          const LeastDevOptions& options) {
    // h = 0 collapses every scaled basis; the monomial one is exact there.
    const BasisKind effective = h > 0.0 ? kind : BasisKind::Monomial;
    const Basis basis = make_basis(effective, s, basis_scale(effective, spectrum, h));
    const LeastDevProblem problem = assemble(spectrum, h, basis, s, p);
    LeastDevSolution sol = solve_least_deviation(problem, options);
    if (sol.status == SolveStatus::Solved) return sol;

    LeastDevOptions fallback = options;
    fallback.formulation =
        options.formulation == Formulation::Socp ? Formulation::Polygon : Formulation::Socp;
    LeastDevSolution retry = solve_least_deviation(problem, fallback);
    if (retry.status == SolveStatus::Solved) return retry;

    std::ostringstream os;
    os << "least-deviation solve failed at h=" << format_h(h) << " (" << to_string(sol.status) << ", then "
       << to_string(retry.status) << " with the alternate formulation; condition estimate "
       << estimate_condition(problem) << ")";
    fail(ErrorKind::SolverFailure, os.str());
}

BisectionResult optimize_h(const Spectrum& spectrum, int s, int p, BasisKind kind, const OptimizeOptions& options) {
    check_orders(s, p);
    validate(spectrum);
    BisectionResult result;
    result.eps_feas = options.eps_feas;
    result.basis = kind;

    double h_min = 0.0;
    double h_max = initial_hmax(spectrum, s);
    int doublings = 0;
    while (solve_at(spectrum, h_max, s, p, kind, options.solver).r < options.eps_feas) {
        if (++doublings > options.max_doublings) {
            fail(ErrorKind::InvalidInput, "no infeasible upper bound found after doubling h_max " +
                                              std::to_string(options.max_doublings) + " times");
        }
        h_min = h_max;
        h_max *= 2.0;
    }

    const double eps = options.eps_bisect.value_or(options.eps_bisect_rel * (h_max - h_min));
    if (!(eps > 0.0)) fail(ErrorKind::InvalidParameter, "eps_bisect must be positive");
    result.eps_bisect = eps;
    const int n = static_cast<int>(spectrum.size());
    while (h_max - h_min > eps) {
        const double h = 0.5 * (h_min + h_max);
        const LeastDevSolution sol = solve_at(spectrum, h, s, p, kind, options.solver);
        const bool accepted = sol.r < options.eps_feas;
        result.history.push_back({h, sol.r, accepted, n});
        (accepted ? h_min : h_max) = h;
    }

    result.bracket = {h_min, h_max};
    result.H = h_min;
    result.n_final = n;
    if (h_min > 0.0) {
        const LeastDevSolution final_sol = solve_at(spectrum, h_min, s, p, kind, options.solver);
        result.polynomial = final_sol.polynomial;
        result.r_final = final_sol.r;
    } else {
        result.polynomial = taylor_polynomial(s, p);
        result.r_final = 0.0;
    }
    return result;
}

double lipschitz_bound(const StabilityPolynomial& poly, double rho) {
    double bound = 0.0;
    double power = 1.0;
    for (std::size_t j = 1; j < poly.coeffs.size(); ++j) {
        bound += static_cast<double>(j) * std::abs(poly.coeffs[j]) * power;
        power *= rho;
    }
    return bound;
}

BisectionResult optimize_h_sip(const SpectrumGenerator& generator, int s, int p, BasisKind kind,
                               const SipOptions& options) {
    check_orders(s, p);
    if (options.n0 < 1 || options.n_cap < options.n0) fail(ErrorKind::InvalidParameter, "need 1 <= n0 <= n_cap");
    if (!(options.zero_tol >= 0.0)) fail(ErrorKind::InvalidParameter, "zero_tol must be nonnegative");

    int n = options.n0;
    Spectrum samples = generator.sample(n);
    if (!samples.nu) fail(ErrorKind::InvalidParameter, "generator '" + generator.name + "' has no known gap nu_n");

    BisectionResult result;
    result.basis = kind;
    result.eps_feas = 0.0;
    double h_min = 0.0;
    double h_max = initial_hmax(samples, s);
    const double eps = options.eps_bisect > 0.0 ? options.eps_bisect : 1e-3 * h_max;
    result.eps_bisect = eps;
    result.polynomial = taylor_polynomial(s, p);
    result.certified = true;

    while (h_max - h_min > eps) {
        const double h = 0.5 * (h_min + h_max);
        for (;;) {
            const LeastDevSolution sol = solve_at(samples, h, s, p, kind, options.solver);
            const double r = sol.r;
            if (r > options.zero_tol) {
                h_max = h;
                result.history.push_back({h, r, false, n});
                break;
            }
            // Lipschitz constant of lambda -> R(h lambda) on the disk holding h * Lambda.
            const double radius = h * samples.max_abs();
            const double lip = h * lipschitz_bound(sol.polynomial, radius);
            if (r < -options.zero_tol && *samples.nu < -2.0 * r / lip) {
                h_min = h;
                result.history.push_back({h, r, true, n});
                result.polynomial = sol.polynomial;
                result.r_final = r;
                break;
            }
            const int next = generator.refine(n);
            if (next > options.n_cap) {
                result.history.push_back({h, r, false, n});
                result.certified = false;
                result.bracket = {h_min, h_max};
                result.H = h_min;
                result.n_final = n;
                return result;
            }
            n = next;
            samples = generator.sample(n);
        }
    }
    result.bracket = {h_min, h_max};
    result.H = h_min;
    result.n_final = n;
    return result;
}

RectangleResult max_kappa(double h, double beta, int s, int p, const RectangleOptions& options) {
    check_orders(s, p);
    if (!(h > 0.0) || !(beta >= 0.0)) fail(ErrorKind::InvalidParameter, "max_kappa needs h > 0 and beta >= 0");

    const auto solve_kappa = [&](double kappa) {
        const Spectrum rect = rectangle(beta, kappa, options.n);
        const Basis basis = kappa >= beta ? make_basis(BasisKind::ShiftedChebyshev, s, -h * kappa)
                                          : make_basis(BasisKind::RotatedChebyshev, s, h * beta);
        const LeastDevProblem problem = assemble(rect, h, basis, s, p);
        LeastDevSolution sol = solve_least_deviation(problem, options.solver);
        if (sol.status != SolveStatus::Solved) {
            LeastDevOptions fallback = options.solver;
            fallback.formulation = Formulation::Polygon;
            sol = solve_least_deviation(problem, fallback);
            if (sol.status != SolveStatus::Solved) {
                fail(ErrorKind::SolverFailure, "least-deviation solve failed at kappa=" + format_h(kappa));
            }
        }
        return sol;
    };

    RectangleResult result;
    result.eps_feas = options.eps_feas;
    double k_max = 2.0 * s * s / h;
    const double k_tiny = 1e-6 * k_max;
    if (solve_kappa(k_tiny).r >= options.eps_feas) {
        fail(ErrorKind::Infeasible, "no order-" + std::to_string(p) + " " + std::to_string(s) +
                                        "-stage polynomial covers h*beta=" + format_h(h * beta) +
                                        " on the imaginary axis");
    }
    double k_min = k_tiny;
    for (int doublings = 0; solve_kappa(k_max).r < options.eps_feas; ++doublings) {
        if (doublings >= 60) fail(ErrorKind::InvalidInput, "no infeasible kappa found");
        k_min = k_max;
        k_max *= 2.0;
    }
    const double eps = options.eps_bisect.value_or(options.eps_bisect_rel * (k_max - k_min));
    result.eps_bisect = eps;
    while (k_max - k_min > eps) {
        const double kappa = 0.5 * (k_min + k_max);
        const LeastDevSolution sol = solve_kappa(kappa);
        const bool accepted = sol.r < options.eps_feas;
        result.history.push_back({kappa, sol.r, accepted, options.n});
        (accepted ? k_min : k_max) = kappa;
    }
    result.kappa = k_min;
    result.bracket = {k_min, k_max};
    result.polynomial = solve_kappa(k_min).polynomial;
    return result;
}

}  // namespace stabopt
