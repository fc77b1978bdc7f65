#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stabopt/error.hpp"
#include "stabopt/optimizer.hpp"
#include "stabopt/polybasis.hpp"
#include "stabopt/spectra.hpp"

namespace stabopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitPartial = 4;

int exit_code(ErrorKind kind);

/// Entry point of the stabopt executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Chebyshev for spectra stretched along the negative real axis, rotated
/// Chebyshev for spectra stretched along the imaginary axis, binomial for
/// points on a circle through the origin, Chebyshev otherwise.
BasisKind auto_basis(const Spectrum& spectrum);

std::string polynomial_to_json(const StabilityPolynomial& poly);

struct PolynomialInput {
    StabilityPolynomial polynomial;
    /// Present when the input was an optimize report.
    std::optional<double> step;
};

/// Accepts {s, p, coeffs} or an optimize report carrying "polynomial" and "H".
/// Throws Format on malformed input.
PolynomialInput parse_polynomial_json(const std::string& text);

std::string optimize_report_json(const BisectionResult& result, int s, int p, const std::string& source,
                                 std::size_t points, std::optional<double> seconds);

enum class SweepFamily { Real, Imaginary, Disk };

SweepFamily parse_sweep_family(const std::string& name);

struct SweepCell {
    int s = 0;
    int p = 0;
    std::optional<double> value;  // H/s^2 (real) or H/s (imaginary, disk)
    std::string error;
};

struct SweepTable {
    std::vector<int> s_values;
    std::vector<int> p_values;
    std::vector<SweepCell> cells;  // row-major by s
    [[nodiscard]] bool complete() const;
};

/// Cells with p > s stay empty without counting as failures.
SweepTable run_sweep(SweepFamily family, const std::vector<int>& s_values, const std::vector<int>& p_values, int n,
                     int threads);

/// Header "s,p=1,p=2,..." then one row per s.
std::string format_sweep_csv(const SweepTable& table);

/// "1..10", "2,4,8" or a mix such as "1..3,8".
std::vector<int> parse_int_list(const std::string& text);

}  // namespace stabopt::cli
