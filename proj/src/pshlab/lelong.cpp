#include "pshlab/lelong.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pshlab/defaults.hpp"

namespace pshlab {

std::vector<double> RadiusGrid::radii() const {
    validate();
    std::vector<double> rs(count);
    double r = r0;
    for (int i = 0; i < count; ++i, r *= ratio) rs[i] = r;
    return rs;
}

void RadiusGrid::validate() const {
    if (count < 4) throw Error("radius grid needs at least 4 radii");
    if (!(r0 > 0) || !(ratio > 0) || !(ratio < 1))
        throw Error("radius grid requires r0 > 0 and ratio in (0,1)");
    if (r0 * std::pow(ratio, count - 1) < defaults::kMinRadius)
        throw Error("radius grid descends below the 1e-8 double-precision floor");
}

SlopeFit fit_slope(const std::vector<double>& radii, const std::vector<double>& values,
                   const std::vector<double>& errors, double window_fraction) {
    const std::size_t m = radii.size();
    if (m < 4 || values.size() != m || errors.size() != m)
        throw Error("fit_slope: need >= 4 aligned samples");
    SlopeFit fit;
    fit.t.resize(m);
    for (std::size_t i = 0; i < m; ++i) fit.t[i] = std::log(radii[i]);
    fit.v = values;
    fit.se = errors;

    // Plain least squares on the smallest-radii window (grid is descending,
    // so the window is the tail of the arrays).
    std::size_t w = std::max<std::size_t>(2, static_cast<std::size_t>(
                                                 std::ceil(window_fraction * m)));
    w = std::min(w, m);
    fit.window_points = static_cast<int>(w);
    std::size_t lo = m - w;
    double tbar = 0, vbar = 0;
    for (std::size_t i = lo; i < m; ++i) {
        tbar += fit.t[i];
        vbar += fit.v[i];
    }
    tbar /= w;
    vbar /= w;
    double stt = 0, stv = 0;
    for (std::size_t i = lo; i < m; ++i) {
        stt += (fit.t[i] - tbar) * (fit.t[i] - tbar);
        stv += (fit.t[i] - tbar) * (fit.v[i] - vbar);
    }
    fit.slope = stv / stt;
    fit.intercept = vbar - fit.slope * tbar;
    double se2 = 0;
    for (std::size_t i = lo; i < m; ++i) {
        double wi = (fit.t[i] - tbar) / stt;
        se2 += wi * wi * fit.se[i] * fit.se[i];
        fit.max_residual = std::max(
            fit.max_residual, std::abs(fit.v[i] - (fit.intercept + fit.slope * fit.t[i])));
    }
    fit.slope_se = std::sqrt(se2);

    // Raw-ordinate structure flags over the whole grid, with statistical slack.
    // t decreases along the arrays; monotone-nondecreasing in t means
    // v[i] >= v[i+1] (larger radius, larger sup).
    fit.monotone_nondecreasing = true;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        double slack = defaults::kSlackSigmas * (fit.se[i] + fit.se[i + 1]);
        if (fit.v[i] < fit.v[i + 1] - slack) fit.monotone_nondecreasing = false;
    }
    fit.midpoint_convex = true;
    for (std::size_t i = 0; i + 2 < m; ++i) {
        // Geometric radii make t equispaced, so v[i+1] is the midpoint value.
        double slack = defaults::kSlackSigmas *
                       (0.5 * (fit.se[i] + fit.se[i + 2]) + fit.se[i + 1]);
        if (fit.v[i + 1] > 0.5 * (fit.v[i] + fit.v[i + 2]) + slack) fit.midpoint_convex = false;
    }
    return fit;
}

namespace {

double median3(double a, double b, double c) {
    return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

void check_grid_fits_region(const PshExpr& f, const Point& a, double max_radius) {
    if (!f.certified_region) return;
    const BallSpec& reg = *f.certified_region;
    if (a.dist(reg.center) + max_radius > reg.radius + 1e-12)
        throw DomainError("radius grid leaves the certified region of the expression");
}

}  // namespace

LelongEstimate lelong_at(const PshExpr& f, const Point& a, const RadiusGrid& grid,
                         std::uint64_t budget_per_radius, std::uint64_t seed) {
    if (!f.valid()) throw Error("lelong_at: empty expression");
    if (f.dim() != a.n) throw DimensionError("lelong_at: point dimension mismatch");
    std::vector<double> radii = grid.radii();
    check_grid_fits_region(f, a, radii.front());

    const std::size_t m = radii.size();
    std::vector<double> sphere_v(m), sphere_se(m), ball_v(m), ball_se(m), sup_v(m), sup_se(m);
    for (std::size_t i = 0; i < m; ++i) {
        BallSpec b(a, radii[i]);
        Estimate sp = mean_on_sphere(f, b, budget_per_radius, mix_key(mix_key(seed, i), 1));
        Estimate bl = mean_on_ball(f, b, budget_per_radius, mix_key(mix_key(seed, i), 2));
        Estimate su = sup_on_ball(f, b, budget_per_radius, mix_key(mix_key(seed, i), 3));
        sphere_v[i] = sp.value;
        sphere_se[i] = sp.stderr_;
        ball_v[i] = bl.value;
        ball_se[i] = bl.stderr_;
        sup_v[i] = su.value;
        sup_se[i] = std::max(su.stderr_, su.sup_gap);
    }

    LelongEstimate est;
    est.at = a;
    est.sphere_fit = fit_slope(radii, sphere_v, sphere_se, defaults::kSlopeWindowFraction);
    est.ball_fit = fit_slope(radii, ball_v, ball_se, defaults::kSlopeWindowFraction);
    est.sup_fit = fit_slope(radii, sup_v, sup_se, defaults::kSlopeWindowFraction);
    est.raw_median = median3(est.sphere_fit.slope, est.ball_fit.slope, est.sup_fit.slope);
    est.spread = std::max({std::abs(est.sphere_fit.slope - est.ball_fit.slope),
                           std::abs(est.sphere_fit.slope - est.sup_fit.slope),
                           std::abs(est.ball_fit.slope - est.sup_fit.slope)});
    est.structural_zero = f.structural_zero_lelong();
    // chi'(-inf) = 0 makes the slope limit exactly zero whatever the finite
    // child slope is; the raw finite-radius fits are kept for inspection.
    est.consensus = est.structural_zero ? 0.0 : est.raw_median;
    return est;
}

UniformLelongResult lelong_uniform(const PshExpr& f, const Domain& d, int filler_centers,
                                   const RadiusGrid& grid, std::uint64_t budget_per_radius,
                                   std::uint64_t seed) {
    if (!f.valid()) throw Error("lelong_uniform: empty expression");
    if (f.dim() != d.dim()) throw DimensionError("lelong_uniform: domain dimension mismatch");
    std::vector<double> radii = grid.radii();
    const double r_max = radii.front();

    // Positive Lelong numbers force local unboundedness, which the algebra
    // localizes to the symbolic singular set: those points are the real
    // candidates, the filler is a safety net.
    std::vector<Point> centers;
    std::vector<bool> is_candidate;
    for (const Point& p : f.singular().candidate_points(f.dim(), d.anchor())) {
        if (d.contains(p) || d.boundary_distance(p) <= 1e-9) {
            centers.push_back(p);
            is_candidate.push_back(true);
        }
    }
    int boundary_share = std::min(filler_centers, defaults::kUniformBoundaryShare);
    int interior_share = filler_centers - boundary_share;
    {
        Rng rng(substream_key(seed, StreamTag::Filler));
        for (int i = 0; i < interior_share; ++i) {
            centers.push_back(d.sample_interior(rng));
            is_candidate.push_back(false);
        }
        Rng brng(substream_key(seed, StreamTag::Boundary));
        for (int i = 0; i < boundary_share; ++i) {
            centers.push_back(d.sample_boundary(brng));
            is_candidate.push_back(false);
        }
    }

    UniformLelongResult result;
    result.value = -1.0;
    std::size_t refused = 0;
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        UniformLelongRow row;
        row.center = centers[ci];
        row.is_singular_candidate = is_candidate[ci];
        bool fits = true;
        if (f.certified_region) {
            const BallSpec& reg = *f.certified_region;
            fits = centers[ci].dist(reg.center) + r_max <= reg.radius + 1e-12;
        }
        if (!fits) {
            // No psh extension is guessed for centers whose grid would leave
            // the certified region.
            row.refused = true;
            ++refused;
            result.table.push_back(row);
            if (is_candidate[ci])
                throw EstimationError(
                    "lelong_uniform: a singular-set candidate admits no valid radius grid "
                    "inside the certified region");
            continue;
        }
        LelongEstimate est =
            lelong_at(f, centers[ci], grid, budget_per_radius, mix_key(seed, ci + 1));
        row.consensus = est.consensus;
        row.spread = est.spread;
        result.table.push_back(row);
        if (est.consensus > result.value) {
            result.value = est.consensus;
            result.argmax = centers[ci];
            result.argmax_spread = est.spread;
        }
    }
    if (refused == centers.size())
        throw EstimationError("lelong_uniform: every center was refused");
    return result;
}

SlopeDiagnostics slope_diagnostics(const SlopeFit& fit) {
    SlopeDiagnostics d;
    d.monotone_ok = fit.monotone_nondecreasing;
    d.convex_ok = fit.midpoint_convex;
    if (!d.monotone_ok)
        d.violations.push_back("ordinates decrease with the radius beyond 3*stderr");
    if (!d.convex_ok)
        d.violations.push_back("midpoint convexity in log r violated beyond 3*stderr");
    d.data_quality_failure = !d.violations.empty();
    return d;
}

std::string lelong_csv(const LelongEstimate& est) {
    std::ostringstream os;
    os << "t,sphere_mean,sphere_stderr,ball_mean,ball_stderr,sup,sup_stderr\n";
    for (std::size_t i = 0; i < est.sphere_fit.t.size(); ++i) {
        os << format_double(est.sphere_fit.t[i]) << "," << format_double(est.sphere_fit.v[i])
           << "," << format_double(est.sphere_fit.se[i]) << "," << format_double(est.ball_fit.v[i])
           << "," << format_double(est.ball_fit.se[i]) << "," << format_double(est.sup_fit.v[i])
           << "," << format_double(est.sup_fit.se[i]) << "\n";
    }
    return os.str();
}

}  // namespace pshlab
