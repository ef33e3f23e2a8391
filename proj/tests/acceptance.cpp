// Acceptance suite: one pass/fail line per criterion, each against its pinned
// tolerance and budget. Exit code is nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "pshlab/catalog.hpp"
#include "pshlab/defaults.hpp"
#include "pshlab/grammar.hpp"
#include "pshlab/harness.hpp"
#include "pshlab/integrability.hpp"
#include "pshlab/lelong.hpp"
#include "pshlab/oscillation.hpp"

using namespace pshlab;

namespace {

struct Outcome {
    int id;
    std::string label;
    bool passed;
    std::string detail;
    double seconds;
};

std::vector<Outcome> g_outcomes;

template <typename Fn>
void criterion(int id, const std::string& label, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out{id, label, false, "", 0.0};
    try {
        out.passed = fn(out.detail);
    } catch (const std::exception& e) {
        out.passed = false;
        out.detail = std::string("exception: ") + e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d: %-38s (%.1f s)%s%s\n", out.passed ? "PASS" : "FAIL", id,
                label.c_str(), out.seconds, out.detail.empty() ? "" : "  -- ",
                out.detail.c_str());
    std::fflush(stdout);
    g_outcomes.push_back(out);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

RadiusGrid pinned_grid() {
    RadiusGrid g;
    g.r0 = defaults::kGridR0;
    g.ratio = defaults::kGridRatio;
    g.count = defaults::kGridCount;
    return g;
}

}  // namespace

int main() {
    const std::uint64_t seed = defaults::kDefaultSeed;
    std::printf("pshlab acceptance suite (seed %llu, %d worker thread(s))\n",
                static_cast<unsigned long long>(seed), thread_count());

    // 1. Lelong number of log|z-1| at its pole: 1 +- 0.05, spread <= 0.05,
    //    grid r0 = 1e-1, ratio 10^{-1/2}, 9 radii, 1e5 samples per radius,
    //    under 30 s.
    criterion(1, "lelong reproduction at the pole", [&](std::string& detail) {
        auto t0 = std::chrono::steady_clock::now();
        const auto& e = catalog_entry("log_abs_shift");
        LelongEstimate est =
            lelong_at(e.expr, e.distinguished, pinned_grid(), defaults::kBudgetPerRadius, seed);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail = fmt("consensus %.4f spread %.4f", est.consensus, est.spread);
        return std::abs(est.consensus - 1.0) <= 0.05 && est.spread <= 0.05 && secs < 30.0;
    });

    // 2. Three-formula agreement across the whole catalog: spread bounded by
    //    0.05 max(1, nu), total under 5 minutes.
    criterion(2, "three-formula agreement on the catalog", [&](std::string& detail) {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        double worst = 0.0;
        std::string worst_name;
        for (const auto& e : catalog()) {
            LelongEstimate est = lelong_at(e.expr, e.distinguished, pinned_grid(),
                                           defaults::kBudgetPerRadius, seed + 2);
            double nu = e.expected_nu.value_or(std::abs(est.consensus));
            double bound = 0.05 * std::max(1.0, nu);
            if (est.spread / bound > worst) {
                worst = est.spread / bound;
                worst_name = e.name;
            }
            ok = ok && est.spread <= bound && std::isfinite(est.consensus);
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail = fmt(("worst spread ratio %.2f (" + worst_name + ")").c_str(), worst);
        return ok && secs < 300.0;
    });

    // 3. Zero-Lelong compositions over log|z|: consensus <= 0.02 for all of
    //    -1/phi, -log(-phi), -(-phi)^{1/2}.
    criterion(3, "zero-Lelong compositions", [&](std::string& detail) {
        bool ok = true;
        double worst = 0.0;
        for (const char* name : {"neginv_log", "neglogneg_log", "negpow_log"}) {
            const auto& e = catalog_entry(name);
            LelongEstimate est = lelong_at(e.expr, e.distinguished, pinned_grid(),
                                           defaults::kBudgetPerRadius, seed + 3);
            worst = std::max(worst, est.consensus);
            ok = ok && est.consensus <= 0.02;
        }
        detail = fmt("max consensus %.4f", worst);
        return ok;
    });

    // 4. Skoda sandwich extremes: log||z|| in C^2 has iota = 0.50 +- 0.05
    //    with nu = 1.00 +- 0.05 (lower end tight); log|z1| in C^2 has
    //    iota = 1.00 +- 0.05 (upper end tight); each under 3 minutes.
    criterion(4, "Skoda sandwich extremes", [&](std::string& detail) {
        auto run = [&](const char* name, double expect_iota, SkodaReport::TightEnd end,
                       double& iota_out) {
            auto t0 = std::chrono::steady_clock::now();
            const auto& e = catalog_entry(name);
            SkodaReport s =
                skoda_report(e.expr, e.distinguished, pinned_grid(), defaults::kBudgetPerRadius,
                             defaults::kAnnulusLevels, defaults::kAnnulusBudget, seed + 4);
            double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            iota_out = s.iota;
            bool nu_ok = name == std::string("norm_log_C2") ? std::abs(s.nu - 1.0) <= 0.05 : true;
            return s.pass && nu_ok && std::abs(s.iota - expect_iota) <= 0.05 && s.tight == end &&
                   secs < 180.0;
        };
        double i1 = 0, i2 = 0;
        bool a = run("norm_log_C2", 0.5, SkodaReport::TightEnd::Lower, i1);
        bool b = run("slice_log_C2", 1.0, SkodaReport::TightEnd::Upper, i2);
        detail = fmt("iota(norm) %.3f iota(slice) %.3f", i1, i2);
        return a && b;
    });

    // 5. The cusp counterexample battery: shrinking oscillation with final
    //    value < 0.1, boundary Lelong number 1 +- 0.05 and no interior
    //    tangent ball down to 1e-6; under 5 minutes.
    criterion(5, "cusp counterexample battery", [&](std::string& detail) {
        auto t0 = std::chrono::steady_clock::now();
        Report rep = reproduce("example-5-1", "");
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double final_mo = rep.results["worst_mo"].back().get<double>();
        detail = fmt("final worst_mo %.4f, nu %.3f", final_mo,
                     rep.results["lelong_uniform"].get<double>());
        return rep.passed() && secs < 300.0;
    });

    // 6. Non-VMO control: log|z| on the unit ball keeps worst_mo >= 1/e - 3se
    //    at every radius.
    criterion(6, "non-VMO control on the unit ball", [&](std::string& detail) {
        OscillationProfile prof =
            vmo_modulus(catalog_entry("log_abs").expr, Domain::ball(Point::zero(1), 1.0),
                        {1e-1, 1e-2, 1e-3, 1e-4}, defaults::kOscCenters, 20000, seed + 6);
        bool ok = true;
        double worst = 1e300;
        for (std::size_t i = 0; i < prof.worst_mo.size(); ++i) {
            ok = ok && prof.worst_mo[i] >= std::exp(-1.0) - 3.0 * prof.stderrs[i];
            worst = std::min(worst, prof.worst_mo[i]);
        }
        detail = fmt("min worst_mo %.4f vs 1/e = %.4f", worst, std::exp(-1.0));
        return ok;
    });

    // 7. Decomposition bound on 100 random (entry, ball) pairs in n = 1 and
    //    n = 2: zero failures.
    criterion(7, "decomposition bound battery", [&](std::string& detail) {
        Report rep = reproduce("decomposition-battery", "");
        detail = "pairs: " + rep.results["pairs"].dump() +
                 ", failures: " + std::to_string(rep.results["failures"].size());
        return rep.passed();
    });

    // 8. MO <= 2 UO and sup >= sphere mean >= ball mean on 100 random pairs,
    //    zero failures beyond 3 stderr.
    criterion(8, "oscillation and mean orderings", [&](std::string& detail) {
        Rng rng(substream_key(seed + 8, StreamTag::Misc));
        const auto& entries = catalog();
        int failures = 0;
        for (int i = 0; i < 100; ++i) {
            const auto& e = entries[rng.next_u64() % entries.size()];
            Point c = draw_ball(rng, BallSpec(e.working_ball.center, 0.5 * e.working_ball.radius));
            double margin = e.working_ball.radius - c.dist(e.working_ball.center);
            BallSpec b(c, rng.uniform(0.1, 0.9) * margin);
            Estimate mm = mo(e.expr, b, 10000, seed + 800 + i);
            Estimate uu = uo(e.expr, b, 10000, seed + 900 + i);
            Estimate su = sup_on_ball(e.expr, b, 10000, seed + 1000 + i);
            Estimate sp = mean_on_sphere(e.expr, b, 10000, seed + 1100 + i);
            Estimate bl = mean_on_ball(e.expr, b, 10000, seed + 1200 + i);
            double slack1 = 3.0 * (mm.stderr_ + 2.0 * uu.stderr_) + 2.0 * uu.sup_gap + 1e-9;
            double slack2 = 3.0 * (sp.stderr_ + bl.stderr_) + 1e-9;
            if (!(mm.value <= 2.0 * uu.value + slack1)) ++failures;
            if (!(su.value >= sp.value - slack2 && sp.value >= bl.value - slack2)) ++failures;
        }
        detail = fmt("failures %g / 200 comparisons", static_cast<double>(failures));
        return failures == 0;
    });

    // 9. Harnack and barycenter batteries on 100 probes each, including the
    //    closed-form case log(1/2) - 1 <= -1/3.
    criterion(9, "Harnack and barycenter checks", [&](std::string& detail) {
        bool closed_form = (std::log(0.5) - 1.0) <= -1.0 / 3.0;
        HarnackVerdict h1 =
            harnack_check(make_add_const(-1.0, catalog_entry("log_abs").expr),
                          BallSpec(Point::zero(1), 1.0), 100, 50000, seed + 9);
        HarnackVerdict h2 =
            harnack_check(make_add_const(-1.0, catalog_entry("norm_log_C2").expr),
                          BallSpec(Point::zero(2), 1.0), 100, 50000, seed + 10);
        // Probe (1/2, 0) of the closed-form case through the sampled check.
        bool probe_ok = true;
        {
            double lhs = std::log(0.5) - 1.0;
            double kernel = (1.0 - 0.5) / (1.0 + 0.5);
            probe_ok = lhs <= kernel * h1.sphere_mean + 1e-6;
        }
        Rng rng(substream_key(seed + 11, StreamTag::Misc));
        const auto& entries = catalog();
        int bary_failures = 0;
        for (int i = 0; i < 100; ++i) {
            const auto& e = entries[rng.next_u64() % entries.size()];
            Point c = draw_ball(rng, BallSpec(e.working_ball.center, 0.5 * e.working_ball.radius));
            double margin = e.working_ball.radius - c.dist(e.working_ball.center);
            BallSpec b(c, rng.uniform(0.1, 0.9) * margin);
            if (!barycenter_check(e.expr, b, 10000, seed + 1300 + i).pass) ++bary_failures;
        }
        detail = fmt("barycenter failures %g / 100", static_cast<double>(bary_failures));
        return closed_form && probe_ok && h1.pass && h2.pass && bary_failures == 0;
    });

    // 10. John-Nirenberg profile: decay rate 2 +- 0.1 for log|z|, and the
    //     rate of 3 log|z| is one third of it within 10%.
    criterion(10, "John-Nirenberg decay rates", [&](std::string& detail) {
        JNProfile p1 = jn_profile(catalog_entry("log_abs").expr, BallSpec(Point::zero(1), 1.0),
                                  6.0, defaults::kJnSteps, defaults::kJnBudget, seed + 12);
        JNProfile p3 = jn_profile(make_scale(3.0, catalog_entry("log_abs").expr),
                                  BallSpec(Point::zero(1), 1.0), 15.0, defaults::kJnSteps,
                                  defaults::kJnBudget, seed + 13);
        detail = fmt("rate %.3f, rate/3 ratio %.3f", p1.decay_rate,
                     p3.decay_rate / (p1.decay_rate / 3.0));
        return std::abs(p1.decay_rate - 2.0) <= 0.1 &&
               std::abs(p3.decay_rate - p1.decay_rate / 3.0) <= 0.1 * p1.decay_rate / 3.0;
    });

    // 11. Sobolev sharpness: the alpha scan 0.30/0.40/0.45/0.50 reads
    //     finite/finite/finite/divergent, under 4 minutes.
    criterion(11, "Sobolev sharpness scan", [&](std::string& detail) {
        auto t0 = std::chrono::steady_clock::now();
        Report rep = reproduce("sobolev-sharpness", "");
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        detail = "outcomes:";
        for (const auto& row : rep.results["alpha_scan"])
            detail += " " + row["outcome"].get<std::string>();
        return rep.passed() && secs < 240.0;
    });

    // 12. Determinism: byte-identical reports across worker counts 1 and 8
    //     and across repeated runs with the same seed.
    criterion(12, "byte-identical reports across threads", [&](std::string& detail) {
        const char* configs[] = {
            "analysis = lelong\nfunction = logabs(poly 1 -1)\npoint = 1 0\nbudget = "
            "20000\nseed = 42\n",
            "analysis = vmo-profile\nfunction = logabs(poly 1 0)\ndomain = ball(0 0 "
            "1)\nradii = 0.1 0.01\ncenter_budget = 16\nbudget = 5000\nseed = 42\n",
        };
        int saved = thread_count();
        bool ok = true;
        for (const char* cfg : configs) {
            set_thread_count(1);
            std::string a = run_scenario(parse_config(cfg)).to_json();
            std::string a2 = run_scenario(parse_config(cfg)).to_json();
            set_thread_count(8);
            std::string b = run_scenario(parse_config(cfg)).to_json();
            ok = ok && a == b && a == a2;
        }
        set_thread_count(saved);
        detail = ok ? "reports identical" : "reports differ";
        return ok;
    });

    int failures = 0;
    for (const auto& o : g_outcomes) failures += o.passed ? 0 : 1;
    std::printf("%zu/%zu acceptance criteria passed\n", g_outcomes.size() - failures,
                g_outcomes.size());
    return failures == 0 ? 0 : 1;
}
