#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "pshlab/catalog.hpp"
#include "pshlab/grammar.hpp"
#include "pshlab/integrability.hpp"
#include "pshlab/oscillation.hpp"

using namespace pshlab;

namespace {
IotaResult iota_default(const PshExpr& f, const Point& a, std::uint64_t seed) {
    return integrability_index(f, a, 0.05, 4.0, 0.05, 30, 20000, seed);
}
}  // namespace

TEST_CASE("integrability_index: the classical thresholds") {
    // |z|^{-2/r} is L^1 near 0 in R^2 iff 2/r < 2: iota = 1.
    IotaResult a = iota_default(parse_expr("logabs(poly 1 0)"), Point::zero(1), 81);
    CHECK(a.status == IotaResult::Status::Bracketed);
    CHECK(std::abs(a.iota - 1.0) <= 0.05 + a.tol);

    // ||z||^{-2/r} in R^4 iff 2/r < 4: iota = 1/2.
    IotaResult b = iota_default(parse_expr("lognorm(2 0 0 0 0)"), Point::zero(2), 82);
    CHECK(std::abs(b.iota - 0.5) <= 0.05 + b.tol);

    // |z1|^{-2/r} in C^2: Fubini reduces to the transverse plane: iota = 1.
    IotaResult c = iota_default(parse_expr("logabs(polyv 2 0 1 0 0 0)"), Point::zero(2), 83);
    CHECK(std::abs(c.iota - 1.0) <= 0.05 + c.tol);
}

TEST_CASE("integrability_index: window handling") {
    // Constants are integrable at every r: iota reported as 0 +- r_lo.
    IotaResult c = iota_default(parse_expr("const(1 -1)"), Point::zero(1), 84);
    CHECK(c.status == IotaResult::Status::BelowWindow);
    CHECK(c.iota == 0.0);
    CHECK(c.tol == 0.05);

    // Zero-Lelong compositions land below the window too.
    IotaResult z = iota_default(catalog_entry("neglogneg_log").expr, Point::zero(1), 85);
    CHECK(z.status == IotaResult::Status::BelowWindow);
    CHECK(z.iota == 0.0);

    // iota(double_log) = 2 sits above a [0.05, 0.5] window: a window error.
    CHECK_THROWS_AS(integrability_index(catalog_entry("double_log").expr, Point::zero(1), 0.05,
                                        0.5, 0.05, 30, 20000, 86),
                    EstimationError);
}

TEST_CASE("invariant: iota scales linearly") {
    PshExpr la = parse_expr("logabs(poly 1 0)");
    IotaResult base = iota_default(la, Point::zero(1), 87);
    IotaResult twice = iota_default(make_scale(2.0, la), Point::zero(1), 88);
    IotaResult half = iota_default(make_scale(0.5, la), Point::zero(1), 89);
    CHECK(std::abs(twice.iota - 2.0 * base.iota) <= 2.0 * base.tol + twice.tol + 0.05);
    CHECK(std::abs(half.iota - 0.5 * base.iota) <= 0.5 * base.tol + half.tol + 0.05);
}

TEST_CASE("skoda_report: the sandwich and its tight ends") {
    RadiusGrid grid;
    SkodaReport norm = skoda_report(catalog_entry("norm_log_C2").expr, Point::zero(2), grid,
                                    50000, 30, 20000, 90);
    CHECK(norm.pass);
    CHECK(std::abs(norm.nu - 1.0) <= 0.05);
    CHECK(std::abs(norm.iota - 0.5) <= 0.05 + norm.iota_tol);
    CHECK(norm.tight == SkodaReport::TightEnd::Lower);

    SkodaReport slice = skoda_report(catalog_entry("slice_log_C2").expr, Point::zero(2), grid,
                                     50000, 30, 20000, 91);
    CHECK(slice.pass);
    CHECK(std::abs(slice.iota - 1.0) <= 0.05 + slice.iota_tol);
    CHECK(slice.tight == SkodaReport::TightEnd::Upper);

    SkodaReport cc = skoda_report(parse_expr("const(1 -1)"), Point::zero(1), grid, 5000, 30,
                                  10000, 92);
    CHECK(cc.pass);
    CHECK(std::abs(cc.nu) <= 0.02);
    CHECK(cc.iota == 0.0);
}

TEST_CASE("invariant: Skoda sandwich on every catalog entry with known nu") {
    RadiusGrid grid;
    for (const auto& e : catalog()) {
        if (!e.expected_nu) continue;
        SkodaReport s =
            skoda_report(e.expr, e.distinguished, grid, 20000, 30, 10000, 93);
        CHECK(s.pass);
    }
}

TEST_CASE("jn_profile: constants have an instantly vanishing tail") {
    JNProfile p = jn_profile(parse_expr("const(1 -3)"), BallSpec(Point::zero(1), 1.0), 4.0, 40,
                             20000, 94);
    for (std::size_t i = 1; i < p.tail_fraction.size(); ++i) CHECK(p.tail_fraction[i] == 0.0);
    CHECK(std::isinf(p.decay_rate));
    CHECK(p.exp_moment == doctest::Approx(1.0));
}

TEST_CASE("jn_profile: log|z| decays at rate 2, and scaling divides the rate") {
    // Exact tail for log|z| on B(0,1): |{ |log|z| + 1/2| > lambda }| / |B|
    // equals e^{-2 lambda - 1} once lambda > 1/2.
    JNProfile p = jn_profile(parse_expr("logabs(poly 1 0)"), BallSpec(Point::zero(1), 1.0), 6.0,
                             160, 1000000, 95);
    CHECK(std::abs(p.decay_rate - 2.0) <= 0.1);
    double lam = 1.0;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < p.lambda.size(); ++i)
        if (std::abs(p.lambda[i] - lam) < std::abs(p.lambda[idx] - lam)) idx = i;
    CHECK(p.tail_fraction[idx] ==
          doctest::Approx(std::exp(-2.0 * p.lambda[idx] - 1.0)).epsilon(0.1));
    CHECK(std::isfinite(p.exp_moment));
    CHECK(p.exp_moment > 1.0);

    JNProfile p3 = jn_profile(parse_expr("scale(3 logabs(poly 1 0))"),
                              BallSpec(Point::zero(1), 1.0), 15.0, 160, 1000000, 96);
    CHECK(std::abs(p3.decay_rate - p.decay_rate / 3.0) <= 0.1 * p.decay_rate / 3.0);
}

TEST_CASE("kappa_transform: closed forms and the quadrature fallback") {
    EtaSpec lin = EtaSpec::linear(1.0);
    CHECK(kappa_transform(lin, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kappa_transform(lin, 1.0) == 0.0);

    // Power alpha = 1/4 with the gamma -> 0+ convention at t = 16:
    // (sqrt(1/2) / (1/4)) * 16^{1/4} = 4 sqrt 2.
    EtaSpec pow14 = EtaSpec::power(0.25, 0.0);
    CHECK(kappa_transform(pow14, 16.0) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(kappa_transform(pow14, 0.0) == 0.0);

    CHECK_THROWS_AS(kappa_transform(lin, 0.5), DomainError);
    CHECK_THROWS_AS(EtaSpec::power(0.5, 0.0), Error);
    CHECK_THROWS_AS(EtaSpec::linear(0.0), Error);

    // The generic tanh-sinh fallback must track the closed forms to 1e-10,
    // including the singular gamma = 0 endpoint of the power kind.
    for (double t : {1.5, 3.0, 20.0}) {
        CHECK(std::abs(kappa_transform_quadrature(lin, t) - kappa_transform(lin, t)) < 1e-10);
        EtaSpec pw = EtaSpec::power(0.3, 0.0);
        CHECK(std::abs(kappa_transform_quadrature(pw, t) - kappa_transform(pw, t)) < 1e-10);
        EtaSpec pw2 = EtaSpec::power(0.45, 0.5);
        CHECK(std::abs(kappa_transform_quadrature(pw2, t) - kappa_transform(pw2, t)) < 1e-10);
    }
}

TEST_CASE("invariant: kappa is strictly increasing in t") {
    Rng rng(substream_key(97, StreamTag::Misc));
    for (int i = 0; i < 1000; ++i) {
        bool linear = rng.next_u64() % 2 == 0;
        double gamma = linear ? rng.uniform(0.1, 2.0) : rng.uniform(0.0, 2.0);
        EtaSpec eta = linear ? EtaSpec::linear(gamma)
                             : EtaSpec::power(rng.uniform(0.05, 0.45), gamma);
        double t1 = gamma + rng.uniform(0.01, 5.0);
        double t2 = t1 + rng.uniform(0.01, 5.0);
        CHECK(kappa_transform(eta, t1) < kappa_transform(eta, t2));
    }
}

TEST_CASE("sobolev_check: the alpha = 1/2 exponent is the sharp boundary") {
    BallSpec region(Point::zero(2), 0.3);
    DivergenceVerdict ok =
        sobolev_check(catalog_entry("sobolev_alpha_040").expr, region, 40, 10000, 98);
    CHECK(ok.finite());
    DivergenceVerdict bad =
        sobolev_check(catalog_entry("sobolev_alpha_050").expr, region, 40, 10000, 99);
    CHECK(bad.divergent());

    // t^{(1)} of log|z| in C^1 is W^{1,2} near the pole.
    DivergenceVerdict t1 = sobolev_check(catalog_entry("neglogneg_log").expr,
                                         BallSpec(Point::zero(1), std::exp(-2.0)), 40, 10000, 100);
    CHECK(t1.finite());

    // |grad(-1/log|z|)|^2 ~ 1/(s log^2 s)^2 is integrable as well.
    DivergenceVerdict ni = sobolev_check(catalog_entry("neginv_log").expr,
                                         BallSpec(Point::zero(1), std::exp(-2.0)), 40, 10000, 101);
    CHECK(ni.finite());

    // Constants have zero gradient: trivially finite with zero mass.
    DivergenceVerdict cz =
        sobolev_check(parse_expr("const(2 -1)"), BallSpec(Point::zero(2), 0.5), 20, 2000, 102);
    CHECK(cz.finite());
    CHECK(cz.total.value == 0.0);
}

TEST_CASE("reporting: the BMO(iota) link stays finite across the catalog") {
    // The paper-level constant between iota and the BMO norm is not
    // computable here; the artifact reports the empirical ratios and asserts
    // finiteness only.
    RadiusGrid grid;
    double smallest_ratio = std::numeric_limits<double>::infinity();
    for (const char* name : {"log_abs", "double_log", "norm_log_C2"}) {
        const auto& e = catalog_entry(name);
        IotaResult iota = integrability_index(e.expr, e.distinguished, 0.05, 4.0, 0.1, 24, 5000,
                                              103);
        Domain d = Domain::ball(e.working_ball.center, e.working_ball.radius);
        BmoResult bmo = bmo_norm(e.expr, d, 16, {0.2, 0.1, 0.05}, 5000, 104);
        CHECK(std::isfinite(iota.iota));
        CHECK(std::isfinite(bmo.value.value));
        if (iota.iota > 0) smallest_ratio = std::min(smallest_ratio, bmo.value.value / iota.iota);
    }
    MESSAGE("empirical min bmo/iota ratio: ", smallest_ratio);
    CHECK(std::isfinite(smallest_ratio));
}

TEST_CASE("jn csv columns") {
    JNProfile p = jn_profile(parse_expr("logabs(poly 1 0)"), BallSpec(Point::zero(1), 1.0), 4.0,
                             40, 50000, 105);
    std::string csv = jn_csv(p);
    CHECK(csv.rfind("lambda,tail_fraction\n", 0) == 0);
}
