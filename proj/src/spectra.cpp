#include "stabopt/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "stabopt/error.hpp"

namespace stabopt {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(const std::string& family, std::initializer_list<std::pair<const char*, double>> params) {
    std::ostringstream os;
    os << family << '(';
    bool first = true;
    for (const auto& [name, value] : params) {
        if (!first) os << ", ";
        os << name << '=' << value;
        first = false;
    }
    os << ')';
    return os.str();
}

Spectrum finish(std::vector<Complex> points, std::string meta, std::optional<double> nu) {
    Spectrum spec;
    spec.points = std::move(points);
    spec.closed_under_conjugation = conjugate_closed(spec.points);
    spec.meta = std::move(meta);
    spec.nu = nu;
    return spec;
}

}  // namespace

double Spectrum::max_abs() const {
    double m = 0.0;
    for (const auto& z : points) m = std::max(m, std::abs(z));
    return m;
}

double Spectrum::min_real() const {
    double m = points.empty() ? 0.0 : points.front().real();
    for (const auto& z : points) m = std::min(m, z.real());
    return m;
}

double Spectrum::max_abs_imag() const {
    double m = 0.0;
    for (const auto& z : points) m = std::max(m, std::abs(z.imag()));
    return m;
}

void validate(const Spectrum& spec) {
    if (spec.points.empty()) fail(ErrorKind::InvalidInput, "spectrum is empty");
    for (const auto& z : spec.points) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            fail(ErrorKind::InvalidInput, "spectrum contains a non-finite point");
        }
    }
}

bool conjugate_closed(const std::vector<Complex>& points, double tol) {
    // Sort a copy by real part and search a window for each conjugate.
    std::vector<Complex> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](Complex a, Complex b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    for (const auto& z : points) {
        const Complex target = std::conj(z);
        auto it = std::lower_bound(sorted.begin(), sorted.end(), target.real() - tol,
                                   [](Complex a, double re) { return a.real() < re; });
        bool found = false;
        for (; it != sorted.end() && it->real() <= target.real() + tol; ++it) {
            if (std::abs(*it - target) <= tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

Spectrum real_interval(int n, bool nested) {
    if (n < 2) fail(ErrorKind::InvalidParameter, "real_interval needs n >= 2");
    std::vector<Complex> pts;
    if (nested) {
        pts.reserve(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) pts.emplace_back(-static_cast<double>(k) / n, 0.0);
        return finish(std::move(pts), describe("real_interval", {{"n", n}, {"nested", 1}}), 0.5 / n);
    }
    pts.reserve(n);
    for (int k = 0; k < n; ++k) pts.emplace_back(-1.0 + static_cast<double>(k) / (n - 1), 0.0);
    pts.back() = 0.0;
    return finish(std::move(pts), describe("real_interval", {{"n", n}}), 0.5 / (n - 1));
}

Spectrum imaginary_interval(int n, bool nested) {
    if (n < 2) fail(ErrorKind::InvalidParameter, "imaginary_interval needs n >= 2");
    const int segments = nested ? n : n - 1;
    std::vector<Complex> pts;
    for (int k = 0; k <= segments; ++k) pts.emplace_back(0.0, static_cast<double>(k) / segments);
    Spectrum spec = finish(std::move(pts),
                           nested ? describe("imaginary_interval", {{"n", n}, {"nested", 1}})
                                  : describe("imaginary_interval", {{"n", n}}),
                           0.5 / segments);
    spec.closed_under_conjugation = true;
    spec.half_plane_reduced = true;
    return spec;
}

Spectrum disk_boundary(int n) {
    if (n < 3) fail(ErrorKind::InvalidParameter, "disk_boundary needs n >= 3");
    std::vector<Complex> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double theta = 2.0 * kPi * (static_cast<double>(k) / n);
        pts.emplace_back(-1.0 + std::cos(theta), std::sin(theta));
    }
    pts[0] = 0.0;
    if (n % 2 == 0) pts[n / 2] = -2.0;
    return finish(std::move(pts), describe("disk_boundary", {{"n", n}}), 2.0 * std::sin(kPi / (2.0 * n)));
}

Spectrum gap_spectrum(double alpha, int n) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidParameter, "gap_spectrum needs alpha > 0");
    if (n < 8 || n % 2 != 0) fail(ErrorKind::InvalidParameter, "gap_spectrum needs an even n >= 8");
    const int m = n / 2;
    std::vector<Complex> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    // Left unit semicircle, angle pi/2 + pi t for t in [0, 1].
    for (int k = 0; k <= m; ++k) {
        const double t = static_cast<double>(k) / m;
        pts.emplace_back(-std::sin(kPi * t), std::cos(kPi * t));
    }
    // Unit circle centred at -alpha.
    for (int k = 0; k < m; ++k) {
        const double theta = 2.0 * kPi * (static_cast<double>(k) / m);
        pts.emplace_back(-alpha + std::cos(theta), std::sin(theta));
    }
    const double nu = std::max(2.0 * std::sin(kPi / (4.0 * m)), 2.0 * std::sin(kPi / (2.0 * m)));
    return finish(std::move(pts), describe("gap_spectrum", {{"alpha", alpha}, {"n", n}}), nu);
}

Spectrum rectangle(double beta, double kappa, int n) {
    if (!(beta >= 0.0) || !(kappa > 0.0) || !std::isfinite(beta) || !std::isfinite(kappa)) {
        fail(ErrorKind::InvalidParameter, "rectangle needs beta >= 0 and kappa > 0");
    }
    if (n < 8) fail(ErrorKind::InvalidParameter, "rectangle needs n >= 8");
    const std::string meta = describe("rectangle", {{"beta", beta}, {"kappa", kappa}, {"n", n}});
    if (beta == 0.0) {
        Spectrum spec = real_interval(n);
        for (auto& z : spec.points) z *= kappa;
        spec.nu = *spec.nu * kappa;
        spec.meta = meta;
        return spec;
    }
    const double spacing = (4.0 * beta + 2.0 * kappa) / n;
    // Even, so that 0 and -kappa are samples.
    int mv = std::max(2, static_cast<int>(std::ceil(2.0 * beta / spacing - 1e-9)));
    mv += mv % 2;
    const int mh = std::max(1, static_cast<int>(std::ceil(kappa / spacing - 1e-9)));
    std::vector<Complex> pts;
    // Vertical edges at Re = 0 and Re = -kappa, including all four corners.
    for (int k = 0; k <= mv; ++k) {
        const double y = beta * (static_cast<double>(2 * k - mv) / mv);
        pts.emplace_back(0.0, y);
        pts.emplace_back(-kappa, y);
    }
    // Horizontal edges without their end points.
    for (int k = 1; k < mh; ++k) {
        const double x = -kappa * (static_cast<double>(k) / mh);
        pts.emplace_back(x, beta);
        pts.emplace_back(x, -beta);
    }
    const double nu = 0.5 * std::max(2.0 * beta / mv, kappa / mh);
    Spectrum spec = finish(std::move(pts), meta, nu);
    spec.closed_under_conjugation = true;
    return spec;
}

Spectrum upwind_advection(int N, double dx) {
    if (N < 2) fail(ErrorKind::InvalidParameter, "upwind_advection needs N >= 2");
    if (!(dx > 0.0) || !std::isfinite(dx)) fail(ErrorKind::InvalidParameter, "upwind_advection needs dx > 0");
    std::vector<Complex> pts;
    pts.reserve(N);
    for (int k = 0; k < N; ++k) {
        const double theta = -2.0 * kPi * (static_cast<double>(k) / N);
        pts.emplace_back((std::cos(theta) - 1.0) / dx, std::sin(theta) / dx);
    }
    pts[0] = 0.0;
    if (N % 2 == 0) pts[N / 2] = -2.0 / dx;
    return finish(std::move(pts), describe("upwind_advection", {{"N", N}, {"dx", dx}}), std::nullopt);
}

// ---------------------------------------------------------------------------
// File I/O

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

Spectrum finish_loaded(std::vector<Complex> points, const std::string& source) {
    if (points.empty()) fail(ErrorKind::InvalidInput, source + ": no spectrum points");
    Spectrum spec = finish(std::move(points), "file:" + source, std::nullopt);
    for (const auto& z : spec.points) {
        if (z.real() > kSymmetryTol) spec.right_half_plane_warning = true;
    }
    return spec;
}

}  // namespace

Spectrum parse_spectrum(const std::string& text, SpectrumFormat format, const std::string& source) {
    std::vector<Complex> points;
    if (format == SpectrumFormat::Csv) {
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        bool seen_data = false;
        while (std::getline(in, line)) {
            ++line_no;
            const auto body = trim(line);
            if (body.empty() || body.front() == '#') continue;
            const auto comma = body.find(',');
            double re = 0.0;
            double im = 0.0;
            const bool ok = comma != std::string_view::npos && parse_double(body.substr(0, comma), re) &&
                            parse_double(body.substr(comma + 1), im);
            if (!ok) {
                // A single non-numeric first line is a header.
                if (!seen_data && points.empty() && line_no == 1) {
                    seen_data = true;
                    continue;
                }
                fail(ErrorKind::Format, source + ":" + std::to_string(line_no) + ": expected 're,im'");
            }
            if (!std::isfinite(re) || !std::isfinite(im)) {
                fail(ErrorKind::Format, source + ":" + std::to_string(line_no) + ": non-finite value");
            }
            seen_data = true;
            points.emplace_back(re, im);
        }
        return finish_loaded(std::move(points), source);
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Format, source + ": " + e.what());
    }
    if (!doc.is_array()) fail(ErrorKind::Format, source + ": expected a JSON array of [re, im] pairs");
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
            fail(ErrorKind::Format, source + ": element " + std::to_string(i) + " is not a [re, im] pair");
        }
        points.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    return finish_loaded(std::move(points), source);
}

Spectrum load_spectrum(const std::filesystem::path& path, SpectrumFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open spectrum file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spectrum(buf.str(), format, path.string());
}

SpectrumFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".json" ? SpectrumFormat::Json : SpectrumFormat::Csv;
}

std::string format_spectrum(const Spectrum& spec, SpectrumFormat format) {
    std::ostringstream os;
    os.precision(17);
    if (format == SpectrumFormat::Csv) {
        os << "re,im\n";
        for (const auto& z : spec.points) os << z.real() << ',' << z.imag() << '\n';
        return os.str();
    }
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& z : spec.points) doc.push_back({z.real(), z.imag()});
    return doc.dump() + "\n";
}

void save_spectrum(const Spectrum& spec, const std::filesystem::path& path, SpectrumFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path.string());
    out << format_spectrum(spec, format);
}

// ---------------------------------------------------------------------------

Spectrum convex_hull(const Spectrum& spec) {
    validate(spec);
    std::vector<Complex> pts = spec.points;
    const auto less = [](Complex a, Complex b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    };
    std::sort(pts.begin(), pts.end(), less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<Complex> hull;
    if (pts.size() <= 2) {
        hull = pts;
    } else {
        const auto cross = [](Complex o, Complex a, Complex b) {
            return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
        };
        hull.resize(2 * pts.size());
        std::size_t k = 0;
        for (const auto& p : pts) {
            while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
            hull[k++] = p;
        }
        const std::size_t lower = k + 1;
        for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
            while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
            hull[k++] = *it;
        }
        hull.resize(k - 1);
    }
    Spectrum out = finish(std::move(hull), "convex_hull(" + spec.meta + ")", std::nullopt);
    out.right_half_plane_warning = spec.right_half_plane_warning;
    return out;
}

Spectrum half_plane_reduce(const Spectrum& spec) {
    if (spec.half_plane_reduced) return spec;
    if (!spec.closed_under_conjugation) {
        fail(ErrorKind::InvalidState, "half_plane_reduce needs a conjugation-closed spectrum");
    }
    Spectrum out = spec;
    out.points.clear();
    for (const auto& z : spec.points) {
        if (z.imag() >= -kSymmetryTol) out.points.push_back(z);
    }
    out.half_plane_reduced = true;
    return out;
}

SpectrumGenerator real_interval_generator() {
    return {"real", [](int n) { return real_interval(n, true); }};
}

SpectrumGenerator imaginary_interval_generator() {
    return {"imaginary", [](int n) { return imaginary_interval(n, true); }};
}

SpectrumGenerator disk_generator() {
    return {"disk", [](int n) { return disk_boundary(n); }};
}

SpectrumGenerator gap_generator(double alpha) {
    return {"gap", [alpha](int n) { return gap_spectrum(alpha, n); }};
}

}  // namespace stabopt
