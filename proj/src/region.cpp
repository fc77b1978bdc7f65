#include "stabopt/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "stabopt/error.hpp"

namespace stabopt {

Complex eval_poly(const StabilityPolynomial& poly, Complex z) { return poly(z); }

Complex RegionGrid::node(int ix, int iy) const {
    const double x = re_range.first + (re_range.second - re_range.first) * ix / (nx - 1);
    const double y = im_range.first + (im_range.second - im_range.first) * iy / (ny - 1);
    return {x, y};
}

namespace {

constexpr int kEdgeNewtonSteps = 4;

// Edge numbering: horizontal edges (ix, iy) -> (ix+1, iy) first, then vertical (ix, iy) -> (ix, iy+1).
struct EdgeIndex {
    int nx, ny;
    [[nodiscard]] int horizontal(int ix, int iy) const { return iy * (nx - 1) + ix; }
    [[nodiscard]] int vertical(int ix, int iy) const { return (nx - 1) * ny + iy * nx + ix; }
    [[nodiscard]] int count() const { return (nx - 1) * ny + nx * (ny - 1); }
};

std::vector<std::vector<Complex>> join_segments(const std::vector<std::pair<int, int>>& segments,
                                                const std::vector<Complex>& points, int edge_count) {
    std::vector<std::vector<int>> links(static_cast<std::size_t>(edge_count));
    for (std::size_t i = 0; i < segments.size(); ++i) {
        links[segments[i].first].push_back(static_cast<int>(i));
        links[segments[i].second].push_back(static_cast<int>(i));
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<std::vector<Complex>> lines;

    const auto walk = [&](int start) {
        std::vector<Complex> line{points[start]};
        int at = start;
        for (;;) {
            int next_seg = -1;
            for (int seg : links[at]) {
                if (!used[seg]) {
                    next_seg = seg;
                    break;
                }
            }
            if (next_seg < 0) break;
            used[next_seg] = true;
            at = segments[next_seg].first == at ? segments[next_seg].second : segments[next_seg].first;
            line.push_back(points[at]);
        }
        if (line.size() > 1) lines.push_back(std::move(line));
    };

    // Open curves end on the grid border, where an edge has a single segment.
    for (int e = 0; e < edge_count; ++e) {
        if (links[e].size() == 1 && !used[links[e][0]]) walk(e);
    }
    for (int e = 0; e < edge_count; ++e) {
        for (int seg : links[e]) {
            if (!used[seg]) walk(e);
        }
    }
    return lines;
}

}  // namespace

RegionGrid region_grid(const StabilityPolynomial& poly, std::pair<double, double> re_range,
                       std::pair<double, double> im_range, int nx, int ny) {
    if (nx < 2 || ny < 2) fail(ErrorKind::InvalidParameter, "region grid needs nx, ny >= 2");
    if (!(re_range.second > re_range.first) || !(im_range.second > im_range.first) ||
        !std::isfinite(re_range.first) || !std::isfinite(re_range.second) || !std::isfinite(im_range.first) ||
        !std::isfinite(im_range.second)) {
        fail(ErrorKind::InvalidParameter, "region grid ranges must be finite with lo < hi");
    }
    RegionGrid grid;
    grid.re_range = re_range;
    grid.im_range = im_range;
    grid.nx = nx;
    grid.ny = ny;
    grid.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) grid.values[static_cast<std::size_t>(iy) * nx + ix] = std::abs(poly(grid.node(ix, iy)));
    }

    const auto inside = [&](int ix, int iy) { return grid.value(ix, iy) < 1.0; };
    const EdgeIndex edges{nx, ny};
    std::vector<Complex> crossing(static_cast<std::size_t>(edges.count()));
    std::vector<bool> computed(crossing.size(), false);

    const auto edge_point = [&](int id, int ax, int ay, int bx, int by) {
        if (computed[id]) return;
        const Complex a = grid.node(ax, ay);
        const Complex d = grid.node(bx, by) - a;
        const double fa = grid.value(ax, ay) - 1.0;
        const double fb = grid.value(bx, by) - 1.0;
        double t = fa / (fa - fb);
        for (int step = 0; step < kEdgeNewtonSteps; ++step) {
            const Complex z = a + t * d;
            const Complex r = poly(z);
            const double mod = std::abs(r);
            if (std::abs(mod - 1.0) <= 1e-13) break;
            const double slope = mod > 0.0 ? std::real(std::conj(r) * poly.derivative(z) * d) / mod : 0.0;
            if (slope == 0.0) break;
            t = std::clamp(t - (mod - 1.0) / slope, 0.0, 1.0);
        }
        crossing[id] = a + t * d;
        computed[id] = true;
    };

    std::vector<std::pair<int, int>> segments;
    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            // Corners counter-clockwise from (ix, iy); edge k joins corner k and k+1.
            const int cx[4] = {ix, ix + 1, ix + 1, ix};
            const int cy[4] = {iy, iy, iy + 1, iy + 1};
            const int ids[4] = {edges.horizontal(ix, iy), edges.vertical(ix + 1, iy), edges.horizontal(ix, iy + 1),
                                edges.vertical(ix, iy)};
            bool in[4];
            for (int k = 0; k < 4; ++k) in[k] = inside(cx[k], cy[k]);
            std::vector<int> cut;
            for (int k = 0; k < 4; ++k) {
                const int k1 = (k + 1) % 4;
                if (in[k] != in[k1]) {
                    edge_point(ids[k], cx[k], cy[k], cx[k1], cy[k1]);
                    cut.push_back(k);
                }
            }
            if (cut.size() == 2) {
                segments.emplace_back(ids[cut[0]], ids[cut[1]]);
            } else if (cut.size() == 4) {
                // Saddle: cut off the corners that disagree with the cell centre.
                const Complex centre = 0.5 * (grid.node(ix, iy) + grid.node(ix + 1, iy + 1));
                const bool centre_in = std::abs(poly(centre)) < 1.0;
                for (int k = 0; k < 4; ++k) {
                    if (in[k] != centre_in) segments.emplace_back(ids[(k + 3) % 4], ids[k]);
                }
            }
        }
    }
    grid.contour = join_segments(segments, crossing, edges.count());
    return grid;
}

std::string region_to_json(const RegionGrid& grid) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["re_range"] = {grid.re_range.first, grid.re_range.second};
    j["im_range"] = {grid.im_range.first, grid.im_range.second};
    j["nx"] = grid.nx;
    j["ny"] = grid.ny;
    j["layout"] = "row-major, one row per imaginary grid line";
    j["values"] = grid.values;
    nlohmann::ordered_json lines = nlohmann::ordered_json::array();
    for (const auto& line : grid.contour) {
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const auto& z : line) pts.push_back({z.real(), z.imag()});
        lines.push_back(std::move(pts));
    }
    j["contour"] = std::move(lines);
    return j.dump(1) + "\n";
}

std::string contour_to_csv(const RegionGrid& grid) {
    std::ostringstream os;
    os.precision(17);
    os << "polyline,re,im\n";
    for (std::size_t i = 0; i < grid.contour.size(); ++i) {
        for (const auto& z : grid.contour[i]) os << i << ',' << z.real() << ',' << z.imag() << '\n';
    }
    return os.str();
}

double max_stable_step(const StabilityPolynomial& poly, const Spectrum& spectrum, const StepScanOptions& options) {
    if (spectrum.points.empty()) fail(ErrorKind::InvalidInput, "spectrum is empty");
    if (!(options.factor > 1.0) || !(options.rel_tol > 0.0)) {
        fail(ErrorKind::InvalidParameter, "scan factor must exceed 1 and rel_tol must be positive");
    }
    const double radius = spectrum.max_abs();
    const auto stable = [&](double h) {
        for (const auto& lambda : spectrum.points) {
            if (std::abs(poly(h * lambda)) > 1.0 + kStableSlack) return false;
        }
        return true;
    };
    if (!(radius > 0.0)) return stable(1.0) ? std::numeric_limits<double>::infinity() : 0.0;

    const int s = std::max(1, poly.stages);
    const double h_ref = 2.0 * s * s / radius;
    const double h_lo = 1e-12 * h_ref;
    const double h_top = 1e6 * h_ref;
    if (!stable(h_lo)) return 0.0;
    double good = h_lo;
    double bad = 0.0;
    for (double h = h_lo * options.factor; h <= h_top; h *= options.factor) {
        if (!stable(h)) {
            bad = h;
            break;
        }
        good = h;
    }
    if (bad == 0.0) return std::numeric_limits<double>::infinity();
    while (bad - good > options.rel_tol * good) {
        const double mid = 0.5 * (good + bad);
        (stable(mid) ? good : bad) = mid;
    }
    return good;
}

FeasibilityReport verify_feasible(const StabilityPolynomial& poly, const Spectrum& spectrum, double h, double tol) {
    FeasibilityReport report;
    report.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < spectrum.points.size(); ++k) {
        const double v = std::abs(poly(h * spectrum.points[k])) - 1.0;
        if (v > report.max_violation) {
            report.max_violation = v;
            report.worst_point = spectrum.points[k];
            report.worst_index = k;
        }
    }
    if (spectrum.points.empty()) report.max_violation = 0.0;
    report.feasible = report.max_violation <= tol;
    return report;
}

}  // namespace stabopt
