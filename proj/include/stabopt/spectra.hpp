#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stabopt {

using Complex = std::complex<double>;

/// Tolerance for conjugate matching and half-plane checks.
inline constexpr double kSymmetryTol = 1e-12;

/// Finite set of (unscaled) spectral points.
struct Spectrum {
    std::vector<Complex> points;
    /// Every point's conjugate is present (or implied, see half_plane_reduced).
    bool closed_under_conjugation = false;
    /// Only Im >= 0 is stored; constraints on the conjugates are implied.
    bool half_plane_reduced = false;
    std::string meta;
    /// Max distance from the continuous set to the samples, when known.
    std::optional<double> nu;
    /// Set on ingestion when points leave the closed left half-plane.
    bool right_half_plane_warning = false;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] double min_real() const;
    [[nodiscard]] double max_abs_imag() const;
};

/// Throws InvalidInput on an empty set or non-finite points.
void validate(const Spectrum& spec);

/// True if every point has its conjugate in the set within tol.
bool conjugate_closed(const std::vector<Complex>& points, double tol = kSymmetryTol);

// Built-in families. With nested = true the sample sets satisfy
// Lambda_n subset Lambda_2n exactly; the point count is then family specific
// (documented per function).

/// n points on [-1, 0]. Nested: the n+1 points -k/n.
Spectrum real_interval(int n, bool nested = false);
/// n points on the segment [0, i], half-plane reduced. Nested: the n+1 points ik/n.
Spectrum imaginary_interval(int n, bool nested = false);
/// n points on |1 + z| = 1 at angles 2 pi k / n (always nested).
Spectrum disk_boundary(int n);
/// Left unit semicircle (n/2 + 1 points, endpoints included) and the unit
/// circle centred at -alpha (n/2 points). Nested under n -> 2n.
Spectrum gap_spectrum(double alpha, int n);
/// Boundary of [-kappa, 0] x [-beta, beta], corners included, spacing at most perimeter/n.
Spectrum rectangle(double beta, double kappa, int n);
/// Eigenvalues (exp(-2 pi i k/N) - 1)/dx of the periodic first-order upwind operator.
Spectrum upwind_advection(int N, double dx);

enum class SpectrumFormat { Csv, Json };

/// CSV: optional header then "re,im" rows. JSON: array of [re, im].
/// Throws Format (with a line number for CSV) or InvalidInput.
Spectrum load_spectrum(const std::filesystem::path& path, SpectrumFormat format);
Spectrum parse_spectrum(const std::string& text, SpectrumFormat format, const std::string& source = "<memory>");
std::string format_spectrum(const Spectrum& spec, SpectrumFormat format);
void save_spectrum(const Spectrum& spec, const std::filesystem::path& path, SpectrumFormat format);
SpectrumFormat format_from_path(const std::filesystem::path& path);

/// Hull vertices in counterclockwise order, collinear points dropped.
Spectrum convex_hull(const Spectrum& spec);

/// Keeps Im >= 0 (to within kSymmetryTol). Throws InvalidState on a non-symmetric input.
Spectrum half_plane_reduce(const Spectrum& spec);

/// Refinable family of discretizations Lambda_n with known gap nu_n.
struct SpectrumGenerator {
    std::string name;
    std::function<Spectrum(int)> sample;
    /// Next level in the refinement sequence (n -> 2n).
    int refine(int n) const { return 2 * n; }
};

SpectrumGenerator real_interval_generator();
SpectrumGenerator imaginary_interval_generator();
SpectrumGenerator disk_generator();
SpectrumGenerator gap_generator(double alpha);

}  // namespace stabopt
