#include "pshlab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pshlab/defaults.hpp"

namespace pshlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTiny = 1e-12;
}  // namespace

Estimate mo(const PshExpr& f, const BallSpec& b, std::uint64_t budget, std::uint64_t seed) {
    Estimate mean = mean_on_ball(f, b, budget, mix_key(seed, 101));
    std::uint64_t key = substream_key(mix_key(seed, 202), StreamTag::MoPassTwo);
    Estimate dev = mc_mean(key, budget, [&](Rng& rng) {
        for (int tries = 0; tries < 100; ++tries) {
            double v = f.root()->eval_raw(draw_ball(rng, b));
            if (v != -kInf) return std::abs(v - mean.value);
        }
        throw EstimationError("redraw cap reached while estimating MO");
    });
    Estimate e;
    e.value = dev.value;
    // The pass-1 error shifts the deviation target by at most |mu_hat - mu|.
    e.stderr_ = std::sqrt(dev.stderr_ * dev.stderr_ + mean.stderr_ * mean.stderr_);
    e.budget = 2 * budget;
    e.seed = seed;
    return e;
}

Estimate uo(const PshExpr& f, const BallSpec& b, std::uint64_t budget, std::uint64_t seed) {
    Estimate sup = sup_on_ball(f, b, budget, mix_key(seed, 303));
    Estimate mean = mean_on_ball(f, b, budget, mix_key(seed, 404));
    Estimate e;
    e.value = sup.value - mean.value;
    e.stderr_ = mean.stderr_;
    e.sup_gap = sup.sup_gap;
    e.budget = 2 * budget;
    e.seed = seed;
    return e;
}

double admissible_radius(const PshExpr& f, const Domain& d, const Point& center,
                         double requested) {
    if (!d.contains(center)) return 0.0;
    double r = std::min(requested, 0.5 * d.boundary_distance(center));
    if (f.certified_region) {
        const BallSpec& reg = *f.certified_region;
        r = std::min(r, reg.radius - center.dist(reg.center));
    }
    return r > 0 ? r : 0.0;
}

BmoResult bmo_norm(const PshExpr& f, const Domain& d, int center_budget,
                   const std::vector<double>& radius_grid, std::uint64_t budget,
                   std::uint64_t seed) {
    if (center_budget < 1) throw Error("bmo_norm: needs at least one center");
    if (radius_grid.empty()) throw Error("bmo_norm: empty radius grid");
    BmoResult best;
    best.value.value = -kInf;
    for (int ci = 0; ci < center_budget; ++ci) {
        // One substream per center index keeps the family prefix-stable.
        Rng rng(substream_key(seed, StreamTag::Centers, static_cast<std::uint64_t>(ci)));
        Point c = d.sample_interior(rng);
        for (std::size_t rj = 0; rj < radius_grid.size(); ++rj) {
            double used = admissible_radius(f, d, c, radius_grid[rj]);
            if (used <= 0) continue;
            Estimate m = mo(f, BallSpec(c, used), budget,
                            mix_key(mix_key(seed, ci), rj));
            ++best.pairs_tested;
            if (m.value > best.value.value) {
                best.value = m;
                best.argmax_center = c;
                best.argmax_radius = used;
            }
        }
    }
    if (best.pairs_tested == 0)
        throw EstimationError("bmo_norm: the admissible (center, radius) family is empty");
    return best;
}

namespace {

// The geometric center sequence approaches the domain's boundary feature: the
// cusp tip for the cusp domain, otherwise the singular point of f inside the
// closure (worst oscillation centers accumulate there), otherwise the nearest
// boundary point of the anchor.
Point boundary_feature(const PshExpr& f, const Domain& d) {
    if (d.kind() == Domain::Kind::Cusp) return Point::make(1, {1.0, 0.0});
    for (const Point& p : f.singular().candidate_points(f.dim(), d.anchor())) {
        if (d.contains(p) || d.boundary_distance(p) <= 1e-9) return p;
    }
    Rng rng(substream_key(7, StreamTag::Boundary));
    return d.sample_boundary(rng);
}

}  // namespace

OscillationProfile vmo_modulus(const PshExpr& f, const Domain& d, std::vector<double> radii,
                               int center_budget, std::uint64_t budget, std::uint64_t seed) {
    if (radii.empty()) throw Error("vmo_modulus: empty radius grid");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (radii[i] <= radii[i + 1]) throw Error("vmo_modulus: radii must be sorted decreasing");
    if (center_budget < 2) throw Error("vmo_modulus: needs at least two centers");

    // Shared center set across radii: half uniform, half geometric toward the
    // boundary feature.
    std::vector<Point> centers;
    Point feature = boundary_feature(f, d);
    {
        Rng rng(substream_key(seed, StreamTag::Centers));
        int uniform = center_budget / 2;
        for (int i = 0; i < uniform; ++i) centers.push_back(d.sample_interior(rng));
        Point start = d.anchor();
        int geometric = center_budget - uniform;
        double t = 0.5;
        for (int i = 0; i < geometric; ++i, t *= 0.5) {
            Point p = Point::zero(d.dim());
            for (int k = 0; k < 2 * d.dim(); ++k)
                p.x[k] = feature.x[k] + t * (start.x[k] - feature.x[k]);
            if (d.contains(p)) centers.push_back(p);
        }
        if (d.contains(feature)) centers.push_back(feature);
    }

    OscillationProfile prof;
    prof.radii = radii;
    for (std::size_t rj = 0; rj < radii.size(); ++rj) {
        double worst = -kInf, worst_se = 0.0;
        Point arg = centers.front();
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
            double used = admissible_radius(f, d, centers[ci], radii[rj]);
            if (used <= 0) continue;
            Estimate m = mo(f, BallSpec(centers[ci], used), budget,
                            mix_key(mix_key(seed, ci + 1000), rj));
            OscillationCell cell;
            cell.center = centers[ci];
            cell.requested_radius = radii[rj];
            cell.used_radius = used;
            cell.mo_value = m.value;
            cell.mo_se = m.stderr_;
            prof.table.push_back(cell);
            if (m.value > worst) {
                worst = m.value;
                worst_se = m.stderr_;
                arg = centers[ci];
            }
        }
        if (worst == -kInf)
            throw EstimationError("vmo_modulus: no admissible center at radius " +
                                  format_double(radii[rj]));
        prof.worst_mo.push_back(worst);
        prof.stderrs.push_back(worst_se);
        prof.argmax_centers.push_back(arg);
    }
    return prof;
}

DecompositionReport decomposition_check(const PshExpr& f, const BallSpec& b,
                                        std::uint64_t budget, std::uint64_t seed) {
    DecompositionReport rep;
    rep.n = b.dim();
    rep.constant = std::pow(3.0, 2 * rep.n - 1) / std::pow(2.0, 2 * rep.n - 2);

    Estimate mo_est = mo(f, b, budget, mix_key(seed, 1));
    Estimate sup_r = sup_on_ball(f, b, budget, mix_key(seed, 2));
    Estimate sup_half = sup_on_ball(f, BallSpec(b.center, 0.5 * b.radius), budget, mix_key(seed, 3));
    Estimate sph_r = mean_on_sphere(f, b, budget, mix_key(seed, 4));
    double shrink = std::exp(-1.0 / (2.0 * rep.n));
    Estimate sph_sh =
        mean_on_sphere(f, BallSpec(b.center, shrink * b.radius), budget, mix_key(seed, 5));
    Estimate ball = mean_on_ball(f, b, budget, mix_key(seed, 6));

    rep.mo_value = mo_est.value;
    rep.sup_r = sup_r.value;
    rep.sup_half_r = sup_half.value;
    rep.sphere_r = sph_r.value;
    rep.sphere_shrunk = sph_sh.value;
    rep.ball_mean = ball.value;
    rep.uo_value = sup_r.value - ball.value;
    rep.i1 = sup_r.value - sph_r.value;
    rep.i2 = sph_r.value - ball.value;
    rep.rhs = 2.0 * rep.constant * (sup_r.value - sup_half.value) +
              2.0 * (sph_r.value - sph_sh.value);

    double stat = std::sqrt(mo_est.stderr_ * mo_est.stderr_ +
                            4.0 * (sph_r.stderr_ * sph_r.stderr_ + sph_sh.stderr_ * sph_sh.stderr_));
    rep.slack = defaults::kSlackSigmas * stat +
                2.0 * rep.constant * (sup_r.sup_gap + sup_half.sup_gap) + kTiny;
    rep.pass = rep.mo_value <= rep.rhs + rep.slack;
    return rep;
}

HarnackVerdict harnack_check(const PshExpr& f, const BallSpec& b, int probe_count,
                             std::uint64_t budget, std::uint64_t seed) {
    HarnackVerdict v;
    Estimate sup = sup_on_ball(f, b, budget, mix_key(seed, 11));
    v.sup_value = sup.value;
    if (!(sup.value <= defaults::kSlackSigmas * std::max(sup.stderr_, sup.sup_gap) + kTiny))
        throw DomainError("harnack_check: f is not <= 0 on the closed ball (sampled sup " +
                          format_double(sup.value) + ")");
    Estimate sph = mean_on_sphere(f, b, budget, mix_key(seed, 12));
    v.sphere_mean = sph.value;

    const int n = b.dim();
    Rng rng(substream_key(seed, StreamTag::Probes));
    v.pass = true;
    for (int i = 0; i < probe_count; ++i) {
        Point x = draw_ball(rng, b);
        double ax = x.dist(b.center);
        double kernel = std::pow(b.radius, 2 * n - 2) * (b.radius - ax) /
                        std::pow(b.radius + ax, 2 * n - 1);
        ProbeCheck pc;
        pc.x = x;
        pc.lhs = f.root()->eval_raw(x);  // -inf probes pass trivially
        pc.rhs = kernel * sph.value;
        pc.slack = defaults::kSlackSigmas * kernel * sph.stderr_ + kTiny;
        pc.pass = pc.lhs <= pc.rhs + pc.slack;
        v.pass = v.pass && pc.pass;
        v.probes.push_back(pc);
    }
    return v;
}

BarycenterVerdict barycenter_check(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                                   std::uint64_t seed) {
    const int n = b.dim();
    Estimate ball = mean_on_ball(f, b, budget, mix_key(seed, 21));
    double shrink = std::exp(-1.0 / (2.0 * n));
    Estimate sph =
        mean_on_sphere(f, BallSpec(b.center, shrink * b.radius), budget, mix_key(seed, 22));
    BarycenterVerdict v;
    v.ball_mean = ball.value;
    v.shrunk_sphere_mean = sph.value;
    v.slack = defaults::kSlackSigmas *
                  std::sqrt(ball.stderr_ * ball.stderr_ + sph.stderr_ * sph.stderr_) +
              kTiny;
    v.pass = ball.value >= sph.value - v.slack;
    return v;
}

std::string profile_csv(const OscillationProfile& p) {
    std::ostringstream os;
    os << "r,worst_mo,stderr,argmax";
    os << "\n";
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
        os << format_double(p.radii[i]) << "," << format_double(p.worst_mo[i]) << ","
           << format_double(p.stderrs[i]) << ",\"";
        const Point& a = p.argmax_centers[i];
        for (int k = 0; k < a.reals(); ++k) os << (k ? " " : "") << format_double(a.x[k]);
        os << "\"\n";
    }
    return os.str();
}

}  // namespace pshlab
