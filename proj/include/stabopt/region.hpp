#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stabopt/polybasis.hpp"
#include "stabopt/spectra.hpp"

namespace stabopt {

/// Horner evaluation of sum a_j z^j.
Complex eval_poly(const StabilityPolynomial& poly, Complex z);

/// |R(z)| on a uniform grid plus the |R| = 1 level set.
struct RegionGrid {
    std::pair<double, double> re_range{0.0, 0.0};
    std::pair<double, double> im_range{0.0, 0.0};
    int nx = 0;
    int ny = 0;
    /// Row-major by imaginary part: value(ix, iy) = values[iy * nx + ix].
    std::vector<double> values;
    /// Boundary polylines; closed curves repeat their first point at the end.
    std::vector<std::vector<Complex>> contour;

    [[nodiscard]] double value(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
    [[nodiscard]] Complex node(int ix, int iy) const;
};

/// Marching squares on |R| - 1 with linear edge interpolation refined by a few
/// Newton steps along the edge. Throws InvalidParameter for nx, ny < 2 or empty ranges.
RegionGrid region_grid(const StabilityPolynomial& poly, std::pair<double, double> re_range,
                       std::pair<double, double> im_range, int nx, int ny);

std::string region_to_json(const RegionGrid& grid);
/// One row per contour vertex: polyline,re,im.
std::string contour_to_csv(const RegionGrid& grid);

inline constexpr double kStableSlack = 1e-12;

struct StepScanOptions {
    double factor = 1.01;
    double rel_tol = 1e-6;
};

/// Largest h with |R(h lambda)| <= 1 + 1e-12 for every point, found by a
/// geometric scan from 1e-12 h_ref up to 1e6 h_ref (h_ref = 2 s^2 / max|lambda|)
/// and bisection. Returns 0 when already unstable at the bottom of the scan and
/// +infinity when no violation is found.
double max_stable_step(const StabilityPolynomial& poly, const Spectrum& spectrum, const StepScanOptions& options = {});

struct FeasibilityReport {
    bool feasible = true;
    /// max_k |R(h lambda_k)| - 1
    double max_violation = 0.0;
    Complex worst_point{0.0, 0.0};
    std::size_t worst_index = 0;
};

FeasibilityReport verify_feasible(const StabilityPolynomial& poly, const Spectrum& spectrum, double h, double tol);

}  // namespace stabopt
