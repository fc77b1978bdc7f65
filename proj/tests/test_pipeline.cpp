#include "doctest.h"
#include "oracles.hpp"
#include "stabopt/cli.hpp"
#include "stabopt/optimizer.hpp"
#include "stabopt/region.hpp"

using namespace stabopt;

TEST_CASE("ingested point cloud: hull, optimize, verify") {
    const auto cloud = load_spectrum(STABOPT_FIXTURE_DIR "/cloud.csv", SpectrumFormat::Csv);
    REQUIRE(cloud.size() == 180);
    CHECK(cloud.closed_under_conjugation);
    CHECK_FALSE(cloud.right_half_plane_warning);

    const auto hull = convex_hull(cloud);
    CHECK(hull.size() < cloud.size());
    std::set<std::pair<double, double>> got;
    for (const auto& z : hull.points) got.insert({z.real(), z.imag()});
    CHECK(got == oracle::brute_force_hull(cloud.points));

    const int s = 5, p = 2;
    const auto kind = cli::auto_basis(hull);
    const auto on_hull = optimize_h(hull, s, p, kind);
    const auto on_cloud = optimize_h(cloud, s, p, kind);
    CHECK(on_hull.H > 0.0);
    // dropping interior points can only relax the constraints
    CHECK(on_hull.H >= on_cloud.H - on_cloud.eps_bisect);

    const auto check = verify_feasible(on_hull.polynomial, hull, on_hull.H, 1e-6);
    CHECK(check.feasible);
    CHECK(oracle::max_modulus(on_hull.polynomial.coeffs, hull.points, on_hull.H) <= 1.0 + 1e-6);
    CHECK(verify_feasible(on_cloud.polynomial, cloud, on_cloud.H, 1e-6).feasible);
}
