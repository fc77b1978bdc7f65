#include "stabopt/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "stabopt/region.hpp"

namespace stabopt::cli {

using Json = nlohmann::ordered_json;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SolverFailure:
        case ErrorKind::RankDeficient: return kExitSolver;
        default: return kExitUsage;
    }
}

BasisKind auto_basis(const Spectrum& spectrum) {
    validate(spectrum);
    // Circle through the origin: |z|^2 = 2 Re(conj(c) z), linear in c.
    Eigen::MatrixXd a(static_cast<Eigen::Index>(spectrum.size()), 2);
    Eigen::VectorXd b(a.rows());
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
        const Complex z = spectrum.points[static_cast<std::size_t>(k)];
        a(k, 0) = 2.0 * z.real();
        a(k, 1) = 2.0 * z.imag();
        b[k] = std::norm(z);
    }
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
    const Complex centre{c[0], c[1]};
    const double radius = std::abs(centre);
    if (radius > 0.0 && std::isfinite(radius)) {
        double worst = 0.0;
        for (const auto& z : spectrum.points) worst = std::max(worst, std::abs(std::abs(z - centre) - radius));
        if (worst <= 0.01 * radius) return BasisKind::Binomial;
    }
    const double min_re = spectrum.min_real();
    const double max_im = spectrum.max_abs_imag();
    if (max_im > 2.0 * std::abs(min_re)) return BasisKind::RotatedChebyshev;
    return BasisKind::ShiftedChebyshev;
}

namespace {

Json polynomial_json(const StabilityPolynomial& poly) {
    Json j;
    j["s"] = poly.stages;
    j["p"] = poly.order;
    j["coeffs"] = poly.coeffs;
    return j;
}

Json history_json(const std::vector<BisectionStep>& history, const char* key) {
    Json out = Json::array();
    for (const auto& step : history) {
        Json e;
        e[key] = step.h;
        e["r"] = step.r;
        e["accepted"] = step.accepted;
        e["n"] = step.n;
        out.push_back(std::move(e));
    }
    return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string polynomial_to_json(const StabilityPolynomial& poly) { return dump(polynomial_json(poly)); }

PolynomialInput parse_polynomial_json(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Format, std::string("polynomial file is not valid JSON: ") + e.what());
    }
    PolynomialInput input;
    const Json* body = &doc;
    if (doc.is_object() && doc.contains("polynomial")) {
        body = &doc["polynomial"];
        if (doc.contains("H") && doc["H"].is_number()) input.step = doc["H"].get<double>();
    }
    if (!body->is_object() || !body->contains("s") || !body->contains("p") || !body->contains("coeffs")) {
        fail(ErrorKind::Format, "polynomial JSON needs fields s, p and coeffs");
    }
    try {
        input.polynomial.stages = body->at("s").get<int>();
        input.polynomial.order = body->at("p").get<int>();
        input.polynomial.coeffs = body->at("coeffs").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, std::string("bad polynomial field: ") + e.what());
    }
    try {
        input.polynomial.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Format, std::string("invalid polynomial: ") + e.what());
    }
    return input;
}

namespace {

Json optimize_report(const BisectionResult& result, int s, int p, const std::string& source, std::size_t points,
                     std::optional<double> seconds, bool sip) {
    Json j;
    j["schema"] = 1;
    j["command"] = sip ? "sip" : "optimize";
    j["spectrum"] = {{"source", source}, {"points", points}};
    j["s"] = s;
    j["p"] = p;
    j["basis"] = std::string(to_string(result.basis));
    j["H"] = result.H;
    j["H_over_s"] = result.H / s;
    j["H_over_s2"] = result.H / (static_cast<double>(s) * s);
    j["bracket"] = {result.bracket.first, result.bracket.second};
    j["eps_bisect"] = result.eps_bisect;
    if (sip) {
        j["certified"] = result.certified;
        j["n_final"] = result.n_final;
    } else {
        j["eps_feas"] = result.eps_feas;
    }
    j["r_final"] = result.r_final;
    j["polynomial"] = polynomial_json(result.polynomial);
    j["history"] = history_json(result.history, "h");
    if (seconds) j["timing"] = {{"seconds", *seconds}};
    return j;
}

}  // namespace

std::string optimize_report_json(const BisectionResult& result, int s, int p, const std::string& source,
                                 std::size_t points, std::optional<double> seconds) {
    return dump(optimize_report(result, s, p, source, points, seconds, false));
}

SweepFamily parse_sweep_family(const std::string& name) {
    if (name == "real") return SweepFamily::Real;
    if (name == "imaginary") return SweepFamily::Imaginary;
    if (name == "disk") return SweepFamily::Disk;
    fail(ErrorKind::InvalidParameter, "unknown sweep family '" + name + "' (real, imaginary, disk)");
}

bool SweepTable::complete() const {
    return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.error.empty(); });
}

SweepTable run_sweep(SweepFamily family, const std::vector<int>& s_values, const std::vector<int>& p_values, int n,
                     int threads) {
    SweepTable table{s_values, p_values, {}};
    for (int s : s_values) {
        for (int p : p_values) table.cells.push_back({s, p, std::nullopt, {}});
    }
    Spectrum spectrum;
    BasisKind kind = BasisKind::ShiftedChebyshev;
    switch (family) {
        case SweepFamily::Real: spectrum = real_interval(n); break;
        case SweepFamily::Imaginary:
            spectrum = imaginary_interval(n);
            kind = BasisKind::RotatedChebyshev;
            break;
        case SweepFamily::Disk:
            spectrum = disk_boundary(n);
            kind = BasisKind::Binomial;
            break;
    }

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i = next++; i < table.cells.size(); i = next++) {
            SweepCell& cell = table.cells[i];
            if (cell.p > cell.s || cell.p < 1) continue;
            try {
                const double h = optimize_h(spectrum, cell.s, cell.p, kind).H;
                cell.value = family == SweepFamily::Real ? h / (static_cast<double>(cell.s) * cell.s) : h / cell.s;
            } catch (const Error& e) {
                cell.error = e.what();
            }
        }
    };
    const int count = std::max(1, std::min<int>(threads, static_cast<int>(table.cells.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return table;
}

std::string format_sweep_csv(const SweepTable& table) {
    std::ostringstream os;
    os << 's';
    for (int p : table.p_values) os << ",p=" << p;
    os << '\n';
    char buf[32];
    std::size_t i = 0;
    for (int s : table.s_values) {
        os << s;
        for (std::size_t k = 0; k < table.p_values.size(); ++k, ++i) {
            os << ',';
            if (table.cells[i].value) {
                std::snprintf(buf, sizeof buf, "%.6f", *table.cells[i].value);
                os << buf;
            }
        }
        os << '\n';
    }
    return os.str();
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    const auto to_int = [&](const std::string& v) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) fail(ErrorKind::InvalidParameter, "bad integer list '" + text + "'");
        return value;
    };
    while (std::getline(ss, item, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(item));
            continue;
        }
        const int lo = to_int(item.substr(0, dots));
        const int hi = to_int(item.substr(dots + 2));
        if (hi < lo) fail(ErrorKind::InvalidParameter, "empty range '" + item + "'");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (out.empty()) fail(ErrorKind::InvalidParameter, "empty integer list");
    return out;
}

namespace {

struct SpectrumArgs {
    std::string builtin;
    std::string file;
    int n = 400;
    int grid_n = 20;
    double dx = 1.0;
    double alpha = 20.0;
    double beta = 1.0;
    double kappa = 1.0;
    bool hull = false;
};

void add_spectrum_options(CLI::App* cmd, SpectrumArgs& args) {
    auto* builtin = cmd->add_option("--builtin", args.builtin, "real | imaginary | disk | gap | rectangle | upwind");
    auto* file = cmd->add_option("--file,--spectrum-file", args.file, "CSV or JSON point set");
    builtin->excludes(file);
    cmd->add_option("--n", args.n, "number of sample points")->capture_default_str();
    cmd->add_option("--N", args.grid_n, "upwind: grid points")->capture_default_str();
    cmd->add_option("--dx", args.dx, "upwind: grid spacing")->capture_default_str();
    cmd->add_option("--alpha", args.alpha, "gap: centre of the far circle is -alpha")->capture_default_str();
    cmd->add_option("--beta", args.beta, "rectangle: imaginary half-height")->capture_default_str();
    cmd->add_option("--kappa", args.kappa, "rectangle: real extent")->capture_default_str();
    cmd->add_flag("--hull", args.hull, "keep only the convex hull vertices");
}

Spectrum build_spectrum(const SpectrumArgs& args, std::string& source) {
    Spectrum spectrum;
    if (!args.file.empty()) {
        spectrum = load_spectrum(args.file, format_from_path(args.file));
        source = args.file;
    } else if (args.builtin.empty()) {
        fail(ErrorKind::InvalidParameter, "one of --builtin or --file is required");
    } else {
        const std::string& b = args.builtin;
        if (b == "real") {
            spectrum = real_interval(args.n);
        } else if (b == "imaginary") {
            spectrum = imaginary_interval(args.n);
        } else if (b == "disk") {
            spectrum = disk_boundary(args.n);
        } else if (b == "gap") {
            spectrum = gap_spectrum(args.alpha, args.n);
        } else if (b == "rectangle") {
            spectrum = rectangle(args.beta, args.kappa, args.n);
        } else if (b == "upwind") {
            spectrum = upwind_advection(args.grid_n, args.dx);
        } else {
            fail(ErrorKind::InvalidParameter, "unknown builtin spectrum '" + b + "'");
        }
        source = spectrum.meta.empty() ? b : spectrum.meta;
    }
    if (args.hull) {
        spectrum = convex_hull(spectrum);
        source += " (hull)";
    }
    return spectrum;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidParameter, "cannot write '" + path + "'");
    f << text;
    if (!f) fail(ErrorKind::InvalidParameter, "write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidInput, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) fail(ErrorKind::InvalidParameter, "range must be 'lo,hi', got '" + text + "'");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        fail(ErrorKind::InvalidParameter, "range must be 'lo,hi', got '" + text + "'");
    }
}

Formulation parse_formulation(const std::string& name) {
    if (name == "socp") return Formulation::Socp;
    if (name == "polygon") return Formulation::Polygon;
    fail(ErrorKind::InvalidParameter, "unknown formulation '" + name + "'");
}

BasisKind resolve_basis(const std::string& name, const Spectrum& spectrum) {
    return name == "auto" ? auto_basis(spectrum) : parse_basis_kind(name);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal stability polynomials for explicit Runge-Kutta methods", "stabopt"};
    app.require_subcommand(1);

    // spectrum
    SpectrumArgs spec_args;
    std::string spec_out;
    std::string spec_format;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "generate or convert a spectrum");
    add_spectrum_options(spectrum_cmd, spec_args);
    spectrum_cmd->add_option("--out,-o", spec_out, "output file (default stdout)");
    spectrum_cmd->add_option("--format", spec_format, "csv | json (default from extension, else csv)");

    // optimize
    SpectrumArgs opt_spec;
    int stages = 0;
    int order = 0;
    std::string basis_name = "auto";
    std::string formulation = "socp";
    OptimizeOptions opt_options;
    double eps_bisect = 0.0;
    std::string opt_out;
    bool timing = false;
    auto* optimize_cmd = app.add_subcommand("optimize", "maximize the stable step size by bisection");
    add_spectrum_options(optimize_cmd, opt_spec);
    optimize_cmd->add_option("-s,--stages", stages, "number of stages")->required();
    optimize_cmd->add_option("-p,--order", order, "order of accuracy")->required();
    optimize_cmd->add_option("--basis", basis_name, "auto | monomial | chebyshev | rotated | binomial")
        ->capture_default_str();
    optimize_cmd->add_option("--formulation", formulation, "socp | polygon")->capture_default_str();
    optimize_cmd->add_option("--eps-feas", opt_options.eps_feas, "accept h when r < eps-feas")->capture_default_str();
    optimize_cmd->add_option("--eps-bisect", eps_bisect, "absolute bracket width (default: relative)");
    optimize_cmd->add_option("--eps-bisect-rel", opt_options.eps_bisect_rel, "bracket width relative to the initial one")
        ->capture_default_str();
    optimize_cmd->add_option("--out,-o", opt_out, "report file (default stdout)");
    optimize_cmd->add_flag("--timing", timing, "add wall-clock timing to the report");

    // sip
    std::string sip_family = "real";
    double sip_alpha = 20.0;
    SipOptions sip_options;
    auto* sip_cmd = app.add_subcommand("sip", "bisection with certified refinement of a continuous spectrum");
    sip_cmd->add_option("--family", sip_family, "real | imaginary | disk | gap")->capture_default_str();
    sip_cmd->add_option("--alpha", sip_alpha, "gap family: centre of the far circle is -alpha")->capture_default_str();
    sip_cmd->add_option("-s,--stages", stages, "number of stages")->required();
    sip_cmd->add_option("-p,--order", order, "order of accuracy")->required();
    sip_cmd->add_option("--basis", basis_name, "auto | monomial | chebyshev | rotated | binomial")->capture_default_str();
    sip_cmd->add_option("--n0", sip_options.n0, "initial sample count")->capture_default_str();
    sip_cmd->add_option("--n-cap", sip_options.n_cap, "largest sample count")->capture_default_str();
    sip_cmd->add_option("--eps-bisect", sip_options.eps_bisect, "absolute bracket width (0: 1e-3 of the first)");
    sip_cmd->add_option("--out,-o", opt_out, "report file (default stdout)");
    sip_cmd->add_flag("--timing", timing, "add wall-clock timing to the report");

    // rectangle
    double rect_h = 1.0;
    double rect_beta = 0.0;
    RectangleOptions rect_options;
    double rect_eps = 0.0;
    auto* rect_cmd = app.add_subcommand("rectangle", "largest real extent of a rectangle for a given step");
    rect_cmd->add_option("--step", rect_h, "step size")->required();
    rect_cmd->add_option("--beta", rect_beta, "imaginary half-height")->required();
    rect_cmd->add_option("-s,--stages", stages, "number of stages")->required();
    rect_cmd->add_option("-p,--order", order, "order of accuracy")->required();
    rect_cmd->add_option("--n", rect_options.n, "boundary samples")->capture_default_str();
    rect_cmd->add_option("--eps-bisect", rect_eps, "absolute bracket width (default: relative)");
    rect_cmd->add_option("--out,-o", opt_out, "report file (default stdout)");

    // verify
    SpectrumArgs ver_spec;
    std::string poly_file;
    std::optional<double> ver_h;
    double ver_tol = 1e-6;
    auto* verify_cmd = app.add_subcommand("verify", "check |R(h lambda)| <= 1 + tol on a spectrum");
    add_spectrum_options(verify_cmd, ver_spec);
    verify_cmd->add_option("--poly", poly_file, "polynomial JSON or optimize report")->required();
    verify_cmd->add_option("--step", ver_h, "step size (default: H from an optimize report)");
    verify_cmd->add_option("--tol", ver_tol, "allowed excess over 1")->capture_default_str();

    // region
    std::string re_text = "-5,1";
    std::string im_text = "-4,4";
    int nx = 241;
    int ny = 161;
    std::string region_out;
    std::string contour_out;
    auto* region_cmd = app.add_subcommand("region", "grid of |R| and the boundary of the stability region");
    region_cmd->add_option("--poly", poly_file, "polynomial JSON or optimize report")->required();
    region_cmd->add_option("--re", re_text, "real range lo,hi")->capture_default_str();
    region_cmd->add_option("--im", im_text, "imaginary range lo,hi")->capture_default_str();
    region_cmd->add_option("--nx", nx, "grid points along the real axis")->capture_default_str();
    region_cmd->add_option("--ny", ny, "grid points along the imaginary axis")->capture_default_str();
    region_cmd->add_option("--out,-o", region_out, "grid JSON (default stdout)");
    region_cmd->add_option("--contour", contour_out, "contour polylines as CSV");

    // sweep
    std::string family = "real";
    std::string s_list = "1..10";
    std::string p_list = "1,2";
    int sweep_n = 400;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string sweep_out;
    std::string sweep_log;
    auto* sweep_cmd = app.add_subcommand("sweep", "table of optimal step sizes over stages and orders");
    sweep_cmd->add_option("--family", family, "real | imaginary | disk")->capture_default_str();
    sweep_cmd->add_option("--s", s_list, "stage list, e.g. 1..10 or 2,4,8")->capture_default_str();
    sweep_cmd->add_option("--p", p_list, "order list")->capture_default_str();
    sweep_cmd->add_option("--n", sweep_n, "sample points")->capture_default_str();
    sweep_cmd->add_option("--threads", threads, "worker threads")->capture_default_str();
    sweep_cmd->add_option("--out,-o", sweep_out, "CSV table (default stdout)");
    sweep_cmd->add_option("--log", sweep_log, "failure log (default stderr)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (spectrum_cmd->parsed()) {
            std::string source;
            const Spectrum spectrum = build_spectrum(spec_args, source);
            SpectrumFormat format = SpectrumFormat::Csv;
            if (spec_format == "json") {
                format = SpectrumFormat::Json;
            } else if (spec_format.empty() && !spec_out.empty() && spec_out != "-") {
                format = format_from_path(spec_out);
            } else if (!spec_format.empty() && spec_format != "csv") {
                fail(ErrorKind::InvalidParameter, "unknown format '" + spec_format + "'");
            }
            write_text(spec_out, format_spectrum(spectrum, format), out);
            std::ostream& echo = (spec_out.empty() || spec_out == "-") ? err : out;
            echo << "points: " << spectrum.size() << "  max|lambda|: " << spectrum.max_abs() << '\n';
            if (spectrum.right_half_plane_warning) echo << "warning: spectrum has points with Re > 0\n";
            return kExitOk;
        }

        if (optimize_cmd->parsed()) {
            std::string source;
            const Spectrum spectrum = build_spectrum(opt_spec, source);
            const BasisKind kind = resolve_basis(basis_name, spectrum);
            opt_options.solver.formulation = parse_formulation(formulation);
            if (eps_bisect > 0.0) opt_options.eps_bisect = eps_bisect;
            const auto start = std::chrono::steady_clock::now();
            const BisectionResult result = optimize_h(spectrum, stages, order, kind, opt_options);
            std::optional<double> seconds;
            if (timing) seconds = seconds_since(start);
            write_text(opt_out, dump(optimize_report(result, stages, order, source, spectrum.size(), seconds, false)),
                       out);
            return kExitOk;
        }

        if (sip_cmd->parsed()) {
            SpectrumGenerator generator;
            BasisKind kind = BasisKind::ShiftedChebyshev;
            if (sip_family == "real") {
                generator = real_interval_generator();
            } else if (sip_family == "imaginary") {
                generator = imaginary_interval_generator();
                kind = BasisKind::RotatedChebyshev;
            } else if (sip_family == "disk") {
                generator = disk_generator();
                kind = BasisKind::Binomial;
            } else if (sip_family == "gap") {
                generator = gap_generator(sip_alpha);
            } else {
                fail(ErrorKind::InvalidParameter, "unknown sip family '" + sip_family + "'");
            }
            if (basis_name != "auto") kind = parse_basis_kind(basis_name);
            const auto start = std::chrono::steady_clock::now();
            const BisectionResult result = optimize_h_sip(generator, stages, order, kind, sip_options);
            std::optional<double> seconds;
            if (timing) seconds = seconds_since(start);
            write_text(opt_out,
                       dump(optimize_report(result, stages, order, generator.name,
                                            static_cast<std::size_t>(result.n_final), seconds, true)),
                       out);
            if (!result.certified) err << "warning: stopped at n=" << result.n_final << " without a certificate\n";
            return kExitOk;
        }

        if (rect_cmd->parsed()) {
            if (rect_eps > 0.0) rect_options.eps_bisect = rect_eps;
            const RectangleResult result = max_kappa(rect_h, rect_beta, stages, order, rect_options);
            Json j;
            j["schema"] = 1;
            j["command"] = "rectangle";
            j["h"] = rect_h;
            j["beta"] = rect_beta;
            j["s"] = stages;
            j["p"] = order;
            j["kappa"] = result.kappa;
            j["bracket"] = {result.bracket.first, result.bracket.second};
            j["eps_bisect"] = result.eps_bisect;
            j["eps_feas"] = result.eps_feas;
            j["polynomial"] = polynomial_json(result.polynomial);
            j["history"] = history_json(result.history, "kappa");
            write_text(opt_out, dump(j), out);
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            const PolynomialInput input = parse_polynomial_json(read_text(poly_file));
            std::string source;
            const Spectrum spectrum = build_spectrum(ver_spec, source);
            const std::optional<double> h = ver_h ? ver_h : input.step;
            if (!h) fail(ErrorKind::InvalidParameter, "--step is required unless the input is an optimize report");
            const FeasibilityReport report = verify_feasible(input.polynomial, spectrum, *h, ver_tol);
            const double h_stable = max_stable_step(input.polynomial, spectrum);
            Json j;
            j["schema"] = 1;
            j["command"] = "verify";
            j["spectrum"] = {{"source", source}, {"points", spectrum.size()}};
            j["h"] = *h;
            j["tol"] = ver_tol;
            j["feasible"] = report.feasible;
            j["max_violation"] = report.max_violation;
            j["worst_point"] = {report.worst_point.real(), report.worst_point.imag()};
            j["worst_index"] = report.worst_index;
            if (std::isfinite(h_stable)) {
                j["h_stable"] = h_stable;
            } else {
                j["h_stable"] = "inf";
            }
            out << dump(j);
            return kExitOk;
        }

        if (region_cmd->parsed()) {
            const PolynomialInput input = parse_polynomial_json(read_text(poly_file));
            const RegionGrid grid = region_grid(input.polynomial, parse_range(re_text), parse_range(im_text), nx, ny);
            write_text(region_out, region_to_json(grid), out);
            if (!contour_out.empty()) write_text(contour_out, contour_to_csv(grid), out);
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            const SweepTable table =
                run_sweep(parse_sweep_family(family), parse_int_list(s_list), parse_int_list(p_list), sweep_n, threads);
            write_text(sweep_out, format_sweep_csv(table), out);
            std::ostringstream log;
            for (const auto& cell : table.cells) {
                if (!cell.error.empty()) log << "s=" << cell.s << " p=" << cell.p << ": " << cell.error << '\n';
            }
            if (!sweep_log.empty()) {
                write_text(sweep_log, log.str(), out);
            } else {
                err << log.str();
            }
            return table.complete() ? kExitOk : kExitPartial;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    }
    return kExitUsage;
}

}  // namespace stabopt::cli
