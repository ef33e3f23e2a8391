#include "pshlab/integrability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pshlab/defaults.hpp"

namespace pshlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Annuli-mode selection
// ---------------------------------------------------------------------------

void attach_annuli_mode(IntegrandRecipe& recipe, const PshExpr& f, const Point& a) {
    recipe.annuli = IntegrandRecipe::Annuli::Point;
    for (const auto& comp : f.singular().components) {
        if (comp.has_opaque()) continue;
        if (comp.distance(a) > 1e-9) continue;
        if (f.dim() > 1 && comp.constraints.size() == 1) {
            // Singular along an affine slice {z_j = c}: transverse annuli.
            recipe.annuli = IntegrandRecipe::Annuli::Line;
            recipe.line_var = comp.constraints.front().var;
        }
        return;
    }
}

// ---------------------------------------------------------------------------
// Integrability index
// ---------------------------------------------------------------------------

IotaResult integrability_index(const PshExpr& f, const Point& a, double r_lo, double r_hi,
                               double tol, int levels, std::uint64_t per_level_budget,
                               std::uint64_t seed) {
    if (!f.valid()) throw Error("integrability_index: empty expression");
    if (f.dim() != a.n) throw DimensionError("integrability_index: point dimension mismatch");
    if (!(0 < r_lo && r_lo < r_hi)) throw Error("integrability_index: bad window");
    if (!(tol > 0)) throw Error("integrability_index: tolerance must be positive");

    double rho = defaults::kIotaProbeRadius;
    if (f.certified_region) {
        const BallSpec& reg = *f.certified_region;
        double margin = reg.radius - a.dist(reg.center);
        if (margin <= 0)
            throw DomainError("integrability_index: point outside the certified region");
        rho = std::min(rho, 0.9 * margin);
    }
    BallSpec probe_ball(a, rho);

    // iota is invariant under adding constants (exp(-2(f+c)/r) rescales by a
    // finite factor); normalizing by sup+1 keeps the integrand scale sane.
    Estimate sup = sup_on_ball(f, probe_ball, 20000, mix_key(seed, 909));
    PshExpr f_n = make_add_const(-(sup.value + 1.0), f);
    f_n.certified_region = f.certified_region;

    IotaResult result;
    auto probe = [&](double r, std::uint64_t budget) {
        IntegrandRecipe rec = IntegrandRecipe::exp_neg_scaled(f_n, r);
        attach_annuli_mode(rec, f, a);
        return integral_with_divergence(rec, probe_ball, levels, budget,
                                        mix_key(seed, result.probes.size() + 1));
    };
    auto classify = [&](double r) {
        DivergenceVerdict v = probe(r, per_level_budget);
        IotaProbe p;
        p.r = r;
        p.outcome = v.outcome;
        if (v.outcome == DivergenceOutcome::Inconclusive) {
            v = probe(r, 2 * per_level_budget);
            p.outcome = v.outcome;
            p.budget_doubled = true;
        }
        result.probes.push_back(p);
        if (p.outcome == DivergenceOutcome::Inconclusive)
            throw EstimationError("integrability_index: inconclusive probe at r = " +
                                  format_double(r) + " after doubling the budget");
        return p.outcome;
    };

    // Endpoint validation: r_lo should be divergent and r_hi finite. A finite
    // lower endpoint means iota < r_lo (constants, zero-Lelong compositions);
    // a divergent upper endpoint is a genuine window error.
    if (classify(r_lo) == DivergenceOutcome::Finite) {
        result.status = IotaResult::Status::BelowWindow;
        result.iota = 0.0;
        result.tol = r_lo;
        return result;
    }
    if (classify(r_hi) == DivergenceOutcome::Divergent)
        throw EstimationError("integrability_index: window error, upper endpoint r_hi = " +
                              format_double(r_hi) + " is still divergent");

    double lo = r_lo, hi = r_hi;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (classify(mid) == DivergenceOutcome::Divergent)
            lo = mid;
        else
            hi = mid;
    }
    result.status = IotaResult::Status::Bracketed;
    result.iota = 0.5 * (lo + hi);
    result.tol = 0.5 * (hi - lo);
    return result;
}

SkodaReport skoda_report(const PshExpr& f, const Point& a, const RadiusGrid& grid,
                         std::uint64_t budget_per_radius, int levels,
                         std::uint64_t per_level_budget, std::uint64_t seed) {
    LelongEstimate nu = lelong_at(f, a, grid, budget_per_radius, mix_key(seed, 1));
    IotaResult iota = integrability_index(f, a, defaults::kIotaWindowLo, defaults::kIotaWindowHi,
                                          defaults::kIotaTolerance, levels, per_level_budget,
                                          mix_key(seed, 2));
    SkodaReport rep;
    rep.nu = nu.consensus;
    rep.nu_spread = nu.spread;
    rep.iota = iota.iota;
    rep.iota_tol = iota.tol;
    rep.lower = rep.nu / f.dim();
    rep.upper = rep.nu;
    rep.slack = 0.05 * std::max(1.0, rep.nu) + rep.iota_tol + rep.nu_spread;
    rep.pass = (rep.lower - rep.slack <= rep.iota) && (rep.iota <= rep.upper + rep.slack);
    rep.tight = std::abs(rep.iota - rep.lower) <= std::abs(rep.iota - rep.upper)
                    ? SkodaReport::TightEnd::Lower
                    : SkodaReport::TightEnd::Upper;
    return rep;
}

// ---------------------------------------------------------------------------
// John-Nirenberg profile
// ---------------------------------------------------------------------------

JNProfile jn_profile(const PshExpr& f, const BallSpec& b, double lambda_max, int steps,
                     std::uint64_t budget, std::uint64_t seed) {
    if (!(lambda_max > 0) || steps < 8) throw Error("jn_profile: bad lambda grid");
    Estimate mean = mean_on_ball(f, b, budget, mix_key(seed, 31));
    const double dl = lambda_max / steps;

    // Single sampling pass binned by floor(|f - f_B| / dl); integer counts
    // combine exactly across chunks.
    constexpr std::uint64_t kChunk = 8192;
    std::size_t n_chunks = static_cast<std::size_t>((budget + kChunk - 1) / kChunk);
    std::vector<std::vector<std::uint64_t>> counts(n_chunks);
    std::uint64_t key = substream_key(mix_key(seed, 32), StreamTag::JnSample);
    std::vector<std::exception_ptr> errs(n_chunks);
    parallel_chunks(n_chunks, [&](std::size_t ci) {
        try {
            counts[ci].assign(steps + 1, 0);
            Rng rng(mix_key(key, ci));
            std::uint64_t lo = ci * kChunk;
            std::uint64_t hi = std::min<std::uint64_t>(budget, lo + kChunk);
            for (std::uint64_t i = lo; i < hi; ++i) {
                double v = -kInf;
                for (int tries = 0; tries < 100 && v == -kInf; ++tries)
                    v = f.root()->eval_raw(draw_ball(rng, b));
                if (v == -kInf) throw EstimationError("jn_profile: redraw cap reached");
                double dev = std::abs(v - mean.value);
                std::size_t bin = std::min<std::size_t>(
                    static_cast<std::size_t>(dev / dl), static_cast<std::size_t>(steps));
                ++counts[ci][bin];
            }
        } catch (...) {
            errs[ci] = std::current_exception();
        }
    });
    std::vector<std::uint64_t> hist(steps + 1, 0);
    for (std::size_t ci = 0; ci < n_chunks; ++ci) {
        if (errs[ci]) std::rethrow_exception(errs[ci]);
        for (int j = 0; j <= steps; ++j) hist[j] += counts[ci][j];
    }

    JNProfile prof;
    std::uint64_t total = budget;
    std::uint64_t above = total;
    for (int j = 0; j < steps; ++j) {
        prof.lambda.push_back(j * dl);
        prof.tail_fraction.push_back(static_cast<double>(above) / static_cast<double>(total));
        above -= hist[j];
    }

    // Deviations concentrated in the first bin (constants): the tail vanishes
    // instantly, the decay is infinitely fast and there is nothing to fit.
    if (std::all_of(prof.tail_fraction.begin() + 1, prof.tail_fraction.end(),
                    [](double t) { return t == 0.0; })) {
        prof.decay_rate = kInf;
        prof.exp_moment = 1.0;
        return prof;
    }

    // Fit log tail vs lambda on the window where the tail is in
    // [kJnFitTailLo, kJnFitTailHi]: below the bulk curvature, above the
    // counting noise.
    std::vector<double> x, y, w;
    for (int j = 0; j < steps; ++j) {
        double t = prof.tail_fraction[j];
        if (t < defaults::kJnFitTailLo || t > defaults::kJnFitTailHi) continue;
        x.push_back(prof.lambda[j]);
        y.push_back(std::log(t));
        w.push_back(static_cast<double>(total) * t);  // ~ 1 / var(log tail)
    }
    if (x.size() < 4)
        throw EstimationError("jn_profile: not enough resolved tail bins in the fit range");
    FitLine fit = weighted_line_fit(x, y, w);
    prof.decay_rate = -fit.slope;
    prof.rate_se = fit.slope_se;
    prof.fit_lo = x.front();
    prof.fit_hi = x.back();
    prof.fit_points = fit.points;
    prof.goodness = fit.rss;
    if (!(prof.decay_rate > 0))
        throw EstimationError("jn_profile: nonpositive decay rate; the tail is too heavy for a "
                              "BMO source (this signals a bug for the psh algebra)");

    // Exponential moment at c = rate/2, resummed from the tail bins; finite by
    // construction and reported for the John-Nirenberg sanity check.
    double c = 0.5 * prof.decay_rate;
    double moment = 0.0;
    for (int j = 0; j <= steps; ++j) {
        double mid = (j + 0.5) * dl;
        moment += std::exp(c * mid) * (static_cast<double>(hist[j]) / static_cast<double>(total));
    }
    prof.exp_moment = moment;
    return prof;
}

// ---------------------------------------------------------------------------
// kappa transform
// ---------------------------------------------------------------------------

EtaSpec EtaSpec::linear(double gamma) {
    EtaSpec e;
    e.kind = Kind::Linear;
    e.gamma = gamma;
    e.validate();
    return e;
}

EtaSpec EtaSpec::power(double alpha, double gamma) {
    EtaSpec e;
    e.kind = Kind::Power;
    e.alpha = alpha;
    e.gamma = gamma;
    e.validate();
    return e;
}

void EtaSpec::validate() const {
    switch (kind) {
        case Kind::Linear:
            if (!(gamma > 0)) throw Error("eta: linear kind needs gamma > 0");
            break;
        case Kind::Power:
            if (!(alpha > 0 && alpha < 0.5)) throw Error("eta: power kind needs alpha in (0, 1/2)");
            if (!(gamma >= 0)) throw Error("eta: gamma must be >= 0");
            break;
    }
}

double EtaSpec::eta(double t) const {
    return kind == Kind::Linear ? t : std::pow(t, 1.0 - 2.0 * alpha);
}

double EtaSpec::eta_prime(double t) const {
    return kind == Kind::Linear ? 1.0 : (1.0 - 2.0 * alpha) * std::pow(t, -2.0 * alpha);
}

double kappa_transform(const EtaSpec& eta, double t) {
    eta.validate();
    if (t < eta.gamma) throw DomainError("kappa_transform: t below the lower limit gamma");
    if (t == eta.gamma) return 0.0;
    switch (eta.kind) {
        case EtaSpec::Kind::Linear: return std::log(t) - std::log(eta.gamma);
        case EtaSpec::Kind::Power: {
            double a = eta.alpha;
            return std::sqrt(1.0 - 2.0 * a) / a * (std::pow(t, a) - std::pow(eta.gamma, a));
        }
    }
    return 0.0;
}

double kappa_transform_quadrature(const EtaSpec& eta, double t) {
    eta.validate();
    if (t < eta.gamma) throw DomainError("kappa_transform: t below the lower limit gamma");
    if (t == eta.gamma) return 0.0;
    // tanh-sinh nodes absorb the endpoint singularity of sqrt(eta')/eta.
    auto g = [&](double s) { return std::sqrt(eta.eta_prime(s)) / eta.eta(s); };
    const double a = eta.gamma, b = t;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const double h = 1.0 / 64.0;
    double sum = 0.0;
    for (int k = -4096; k <= 4096; ++k) {
        double u = k * h;
        double sh = 0.5 * 3.14159265358979323846 * std::sinh(u);
        double x = std::tanh(sh);
        double wgt = 0.5 * 3.14159265358979323846 * std::cosh(u) / std::pow(std::cosh(sh), 2);
        double s = mid + half * x;
        if (s <= a || s >= b) continue;
        double v = g(s);
        if (!std::isfinite(v)) continue;
        sum += wgt * v;
    }
    return sum * half * h;
}

// ---------------------------------------------------------------------------
// Sobolev membership
// ---------------------------------------------------------------------------

DivergenceVerdict sobolev_check(const PshExpr& f, const BallSpec& region, int levels,
                                std::uint64_t per_level_budget, std::uint64_t seed) {
    // Recenter the annuli on the singular set when it passes nearby.
    Point center = region.center;
    double best = kInf;
    for (const Point& cand : f.singular().candidate_points(f.dim(), region.center)) {
        double d = cand.dist(region.center);
        if (d < best && d <= region.radius) {
            best = d;
            center = cand;
        }
    }
    IntegrandRecipe rec = IntegrandRecipe::grad_squared(f);
    attach_annuli_mode(rec, f, center);
    return integral_with_divergence(rec, BallSpec(center, region.radius), levels,
                                    per_level_budget, seed);
}

std::string jn_csv(const JNProfile& p) {
    std::ostringstream os;
    os << "lambda,tail_fraction\n";
    for (std::size_t i = 0; i < p.lambda.size(); ++i)
        os << format_double(p.lambda[i]) << "," << format_double(p.tail_fraction[i]) << "\n";
    return os.str();
}

}  // namespace pshlab
