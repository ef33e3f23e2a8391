#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pshlab/geometry.hpp"

using namespace pshlab;

namespace {

// Brute-force oracle for the cusp boundary distance: dense parameter sweep
// over the three arcs, refined by golden section around the best bracket.
double cusp_distance_oracle(double px, double py, double alpha) {
    auto dist_upper = [&](double s, double sign) {
        double dx = px - s, dy = py - sign * std::pow(1.0 - s, alpha);
        return std::hypot(dx, dy);
    };
    double best = std::abs(px) + (std::abs(py) > 1 ? std::abs(py) - 1 : 0);  // segment x = 0
    if (std::abs(py) <= 1)
        best = std::abs(px);
    else
        best = std::hypot(px, std::abs(py) - 1.0);
    for (double sign : {1.0, -1.0}) {
        const int N = 1000000;
        double bs = 0, bv = 1e300;
        for (int i = 0; i <= N; ++i) {
            double s = static_cast<double>(i) / N;
            double v = dist_upper(s, sign);
            if (v < bv) {
                bv = v;
                bs = s;
            }
        }
        double lo = std::max(0.0, bs - 2.0 / N), hi = std::min(1.0, bs + 2.0 / N);
        constexpr double phi = 0.6180339887498949;
        for (int it = 0; it < 80; ++it) {
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            if (dist_upper(x1, sign) < dist_upper(x2, sign))
                hi = x2;
            else
                lo = x1;
        }
        best = std::min(best, dist_upper(0.5 * (lo + hi), sign));
    }
    return best;
}

// Chi-square critical value via the Wilson-Hilferty approximation.
double chi2_critical(int dof, double z) {
    double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
    return dof * t * t * t;
}

}  // namespace

TEST_CASE("dist_to_boundary: closed forms") {
    Domain ball = Domain::ball(Point::zero(1), 1.0);
    CHECK(ball.dist_to_boundary(Point::zero(1)) == doctest::Approx(1.0));
    CHECK(ball.dist_to_boundary(Point::make(1, {0.25, 0.0})) == doctest::Approx(0.75));

    Domain shr = Domain::shrunk(Domain::ball(Point::zero(1), 1.0), 0.1);
    CHECK(shr.dist_to_boundary(Point::zero(1)) == doctest::Approx(0.9));

    Domain poly = Domain::polydisk(Point::zero(2), {1.0, 0.5});
    CHECK(poly.dist_to_boundary(Point::zero(2)) == doctest::Approx(0.5));
    CHECK(poly.dist_to_boundary(Point::make(2, {0.5, 0.0, 0.0, 0.0})) == doctest::Approx(0.5));
}

TEST_CASE("dist_to_boundary: outside and boundary points are distinct errors") {
    Domain ball = Domain::ball(Point::zero(1), 1.0);
    CHECK_THROWS_AS(ball.dist_to_boundary(Point::make(1, {2.0, 0.0})), OutsideDomainError);
    CHECK_THROWS_AS(ball.dist_to_boundary(Point::make(1, {1.0, 0.0})), OnBoundaryError);
}

TEST_CASE("cusp distance agrees with the dense-sweep oracle") {
    Domain cusp = Domain::cusp(2.0);
    struct Probe {
        double x, y;
    };
    for (const Probe& p : {Probe{0.5, 0.0}, Probe{0.3, 0.1}, Probe{0.8, -0.01}, Probe{0.05, 0.5},
                           Probe{0.95, 0.0}, Probe{0.2, -0.3}}) {
        Point z = Point::make(1, {p.x, p.y});
        if (!cusp.contains(z)) continue;
        double oracle = cusp_distance_oracle(p.x, p.y, 2.0);
        CHECK(cusp.dist_to_boundary(z) == doctest::Approx(oracle).epsilon(1e-9));
    }
    // The spec's sample point: minimum over segment and curve, not just x.
    double exact = cusp_distance_oracle(0.5, 0.0, 2.0);
    CHECK(cusp.dist_to_boundary(Point::make(1, {0.5, 0.0})) == doctest::Approx(exact).epsilon(1e-10));
    CHECK(exact < 0.5);  // the curve is closer than the segment x = 0
}

TEST_CASE("invariant: contains iff positive boundary clearance") {
    std::vector<Domain> domains;
    domains.push_back(Domain::ball(Point::make(1, {0.5, -0.25}), 0.8));
    domains.push_back(Domain::polydisk(Point::zero(2), {1.0, 0.6}));
    domains.push_back(Domain::cusp(2.0));
    domains.push_back(Domain::shrunk(Domain::ball(Point::zero(2), 1.0), 0.2));
    for (const auto& d : domains) {
        Point lo, hi;
        d.bounding_box(lo, hi);
        Rng rng(substream_key(31, StreamTag::Misc, static_cast<int>(d.kind())));
        for (int i = 0; i < 10000; ++i) {
            Point p = Point::zero(d.dim());
            for (int k = 0; k < 2 * d.dim(); ++k)
                p.x[k] = rng.uniform(lo.x[k] - 0.2, hi.x[k] + 0.2);
            double bd = d.boundary_distance(p);
            CHECK(bd >= 0.0);
            if (d.contains(p)) {
                CHECK(d.dist_to_boundary(p) > 0.0);
                CHECK(d.dist_to_boundary(p) == bd);
            }
        }
    }
}

TEST_CASE("sample_ball: moments, containment, determinism") {
    BallSpec b(Point::zero(1), 1.0);
    auto pts = sample_ball(b, 1000000, 99);
    double mean_norm = 0.0;
    for (const auto& p : pts) {
        double n = p.norm();
        CHECK(n < 1.0);
        mean_norm += n;
    }
    mean_norm /= pts.size();
    // E||x|| in the unit disk: int_0^1 r * 2r dr = 2/3.
    CHECK(mean_norm == doctest::Approx(2.0 / 3.0).epsilon(0.003));

    auto again = sample_ball(b, 1000, 99);
    auto first = sample_ball(b, 1000, 99);
    for (std::size_t i = 0; i < again.size(); ++i)
        for (int k = 0; k < 2; ++k) CHECK(again[i].x[k] == first[i].x[k]);
}

TEST_CASE("sample_sphere: symmetry, radius, trace identity in R^4") {
    BallSpec b1(Point::zero(1), 2.0);
    auto pts = sample_sphere(b1, 1000000, 7);
    double mean_x = 0.0;
    for (const auto& p : pts) {
        CHECK(std::abs(p.norm() - 2.0) < 1e-12 * 2.0 + 1e-12);
        mean_x += p.x[0];
    }
    mean_x /= pts.size();
    CHECK(std::abs(mean_x) < 2.0 * 0.002);

    BallSpec b2(Point::zero(2), 1.0);
    auto pts4 = sample_sphere(b2, 1000000, 8);
    double mean_x2 = 0.0;
    for (const auto& p : pts4) mean_x2 += p.x[0] * p.x[0];
    mean_x2 /= pts4.size();
    CHECK(mean_x2 == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("sampling uniformity: chi-square on radial and angular histograms") {
    constexpr int kBins = 64;
    constexpr int kN = 1000000;
    BallSpec b(Point::zero(1), 1.0);
    auto pts = sample_ball(b, kN, 1234);
    std::vector<int> radial(kBins, 0), angular(kBins, 0);
    for (const auto& p : pts) {
        double u = p.norm2();  // r^2 is uniform in the disk
        double a = std::atan2(p.x[1], p.x[0]) / (2 * 3.14159265358979323846) + 0.5;
        radial[std::min(kBins - 1, static_cast<int>(u * kBins))]++;
        angular[std::min(kBins - 1, static_cast<int>(a * kBins))]++;
    }
    double expect = static_cast<double>(kN) / kBins;
    double chi_r = 0, chi_a = 0;
    for (int i = 0; i < kBins; ++i) {
        chi_r += (radial[i] - expect) * (radial[i] - expect) / expect;
        chi_a += (angular[i] - expect) * (angular[i] - expect) / expect;
    }
    double crit = chi2_critical(kBins - 1, 3.0902);  // significance 1e-3
    CHECK(chi_r < crit);
    CHECK(chi_a < crit);
}

TEST_CASE("interior sphere: a ball admits a witness at every boundary point") {
    Domain ball = Domain::ball(Point::zero(1), 1.0);
    Rng rng(substream_key(32, StreamTag::Misc));
    for (int i = 0; i < 100; ++i) {
        Point bp = draw_sphere(rng, BallSpec(Point::zero(1), 1.0));
        auto verdict = interior_sphere_check(ball, bp, {0.5}, 1000 + i);
        CHECK(verdict.holds);
        if (verdict.holds) {
            // The witness sits on the diameter through bp.
            CHECK(verdict.witness.radius > 0.5 * (1 - 1e-4));
            CHECK(verdict.witness.center.dist(bp) == doctest::Approx(verdict.witness.radius)
                                                         .epsilon(1e-6));
        }
    }
}

TEST_CASE("interior sphere: polydisk witness and cusp failure") {
    Domain poly = Domain::polydisk(Point::zero(2), {1.0, 1.0});
    auto v = interior_sphere_check(poly, Point::make(2, {1.0, 0.0, 0.0, 0.0}), {0.3});
    CHECK(v.holds);

    Domain cusp = Domain::cusp(2.0);
    auto w = interior_sphere_check(cusp, Point::make(1, {1.0, 0.0}),
                                   {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    CHECK(!w.holds);
    CHECK(w.fails_up_to == 1e-6);
}

TEST_CASE("interior sphere: rejects off-boundary points") {
    Domain ball = Domain::ball(Point::zero(1), 1.0);
    CHECK_THROWS_AS(interior_sphere_check(ball, Point::make(1, {0.5, 0.0}), {0.1}), DomainError);
}

TEST_CASE("shrunk domain: margin must stay below the inradius") {
    CHECK_THROWS_AS(Domain::shrunk(Domain::ball(Point::zero(1), 1.0), 1.5), Error);
    Domain cusp_shr = Domain::shrunk(Domain::cusp(2.0), 0.05);
    CHECK(cusp_shr.contains(Point::make(1, {0.3, 0.0})));
    CHECK(!cusp_shr.contains(Point::make(1, {0.98, 0.0})));
}

TEST_CASE("boundary sampling lands on the boundary") {
    std::vector<Domain> domains;
    domains.push_back(Domain::ball(Point::zero(2), 1.0));
    domains.push_back(Domain::polydisk(Point::zero(1), {0.7}));
    domains.push_back(Domain::cusp(2.0));
    for (const auto& d : domains) {
        Rng rng(substream_key(33, StreamTag::Boundary, static_cast<int>(d.kind())));
        for (int i = 0; i < 200; ++i) {
            Point p = d.sample_boundary(rng);
            CHECK(d.boundary_distance(p) < 1e-9);
        }
    }
}
