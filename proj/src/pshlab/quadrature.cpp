#include "pshlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "pshlab/defaults.hpp"

namespace pshlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kChunk = 8192;
}  // namespace

// ---------------------------------------------------------------------------
// Chunked mean
// ---------------------------------------------------------------------------

Estimate mc_mean(std::uint64_t stream_key, std::uint64_t budget,
                 const std::function<double(Rng&)>& draw) {
    if (budget < 1) throw EstimationError("mc_mean: empty budget");
    std::size_t n_chunks = static_cast<std::size_t>((budget + kChunk - 1) / kChunk);
    struct Partial {
        double sum = 0, sumsq = 0;
        std::uint64_t n = 0;
        std::exception_ptr err;
    };
    std::vector<Partial> parts(n_chunks);
    parallel_chunks(n_chunks, [&](std::size_t ci) {
        Partial& p = parts[ci];
        try {
            Rng rng(mix_key(stream_key, ci));
            std::uint64_t lo = ci * kChunk;
            std::uint64_t hi = std::min(budget, lo + kChunk);
            for (std::uint64_t i = lo; i < hi; ++i) {
                double v = draw(rng);
                p.sum += v;
                p.sumsq += v * v;
                ++p.n;
            }
        } catch (...) {
            p.err = std::current_exception();
        }
    });
    double sum = 0, sumsq = 0;
    std::uint64_t n = 0;
    for (const auto& p : parts) {
        if (p.err) std::rethrow_exception(p.err);
        sum += p.sum;
        sumsq += p.sumsq;
        n += p.n;
    }
    Estimate e;
    e.budget = n;
    e.value = sum / static_cast<double>(n);
    double var = std::max(0.0, sumsq / static_cast<double>(n) - e.value * e.value);
    e.stderr_ = std::sqrt(var / static_cast<double>(n));
    return e;
}

namespace {

double eval_avoiding_pole(const PshExpr& f, Rng& rng, const std::function<Point(Rng&)>& sample) {
    for (int tries = 0; tries < 100; ++tries) {
        double v = f.root()->eval_raw(sample(rng));
        if (v != -kInf) return v;
    }
    throw EstimationError("redraw cap reached: samples keep landing on the singular set");
}

void check_mean_args(const PshExpr& f, const BallSpec& b, std::uint64_t budget) {
    if (!f.valid()) throw Error("empty expression");
    if (f.dim() != b.dim()) throw DimensionError("estimator: expression/ball dimension mismatch");
    if (budget < 100) throw EstimationError("mean estimators require budget >= 100");
}

}  // namespace

Estimate mean_on_sphere(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                        std::uint64_t seed) {
    check_mean_args(f, b, budget);
    Estimate e = mc_mean(substream_key(seed, StreamTag::SphereMean), budget,
                         [&](Rng& rng) {
                             return eval_avoiding_pole(
                                 f, rng, [&](Rng& r) { return draw_sphere(r, b); });
                         });
    e.seed = seed;
    return e;
}

Estimate mean_on_ball(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                      std::uint64_t seed) {
    check_mean_args(f, b, budget);
    Estimate e = mc_mean(substream_key(seed, StreamTag::BallMean), budget,
                         [&](Rng& rng) {
                             return eval_avoiding_pole(
                                 f, rng, [&](Rng& r) { return draw_ball(r, b); });
                         });
    e.seed = seed;
    return e;
}

// ---------------------------------------------------------------------------
// Sampled supremum
// ---------------------------------------------------------------------------

namespace {

struct Incumbent {
    double value = -kInf;
    std::array<double, kMaxReal> dir{};  // unit direction from the center
};

void unit_from(const Point& center, const Point& p, double* dir, int reals) {
    double nrm = 0.0;
    for (int i = 0; i < reals; ++i) {
        dir[i] = p.x[i] - center.x[i];
        nrm += dir[i] * dir[i];
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0) {
        dir[0] = 1.0;
        return;
    }
    for (int i = 0; i < reals; ++i) dir[i] /= nrm;
}

}  // namespace

Estimate sup_on_ball(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                     std::uint64_t seed, const SupOptions& opts) {
    if (!f.valid()) throw Error("empty expression");
    if (f.dim() != b.dim()) throw DimensionError("sup_on_ball: dimension mismatch");
    budget = std::max<std::uint64_t>(budget, 64);
    const int reals = 2 * b.dim();

    std::uint64_t coarse = budget - budget / 4;
    std::uint64_t sphere_budget = opts.sphere_only ? coarse : coarse - coarse / 3;
    std::uint64_t ball_budget = coarse - sphere_budget;

    // Coarse pass, chunk-deterministic.
    std::size_t n_chunks =
        static_cast<std::size_t>((sphere_budget + kChunk - 1) / kChunk);
    std::vector<Incumbent> parts(std::max<std::size_t>(n_chunks, 1));
    std::uint64_t coarse_key = substream_key(seed, StreamTag::SupCoarse);
    parallel_chunks(n_chunks, [&](std::size_t ci) {
        Rng rng(mix_key(coarse_key, ci));
        std::uint64_t lo = ci * kChunk;
        std::uint64_t hi = std::min(sphere_budget, lo + kChunk);
        Incumbent& inc = parts[ci];
        for (std::uint64_t i = lo; i < hi; ++i) {
            Point p = draw_sphere(rng, b);
            double v = f.root()->eval_raw(p);
            if (v > inc.value) {
                inc.value = v;
                unit_from(b.center, p, inc.dir.data(), reals);
            }
        }
    });
    Incumbent best;
    for (const auto& inc : parts)
        if (inc.value > best.value) best = inc;

    if (!opts.sphere_only && ball_budget > 0) {
        Rng rng(substream_key(seed, StreamTag::SupCoarse, 1));
        for (std::uint64_t i = 0; i < ball_budget; ++i) {
            Point p = draw_ball(rng, b);
            double v = f.root()->eval_raw(p);
            if (v > best.value) {
                best.value = v;
                unit_from(b.center, p, best.dir.data(), reals);
            }
        }
    }
    if (best.value == -kInf) {
        // Every coarse sample hit the pole set; cannot happen for the algebra.
        throw EstimationError("sup_on_ball: all samples landed on the singular set");
    }

    // Shrinking-cap refinement around the incumbent direction (the sup of a
    // psh function over the closed ball is attained on the sphere).
    double prev_round = best.value;
    double gap = 0.0;
    std::uint64_t round_budget = (budget / 4) / std::max(1, opts.refine_rounds);
    Rng rng(substream_key(seed, StreamTag::SupRefine));
    double theta = 3.14159265358979323846 / opts.cap_shrink;
    for (int round = 0; round < opts.refine_rounds; ++round, theta /= opts.cap_shrink) {
        prev_round = best.value;
        for (std::uint64_t i = 0; i < round_budget; ++i) {
            // Tangent perturbation: v = cos(phi) u + sin(phi) w, phi <= theta.
            double w[kMaxReal];
            double dot = 0.0, nrm = 0.0;
            for (int k = 0; k < reals; ++k) {
                w[k] = rng.normal();
                dot += w[k] * best.dir[k];
            }
            for (int k = 0; k < reals; ++k) {
                w[k] -= dot * best.dir[k];
                nrm += w[k] * w[k];
            }
            nrm = std::sqrt(nrm);
            if (nrm < 1e-300) continue;
            double phi = theta * std::sqrt(rng.uniform01());
            double c = std::cos(phi), s = std::sin(phi) / nrm;
            double cand[kMaxReal];
            double cn = 0.0;
            for (int k = 0; k < reals; ++k) {
                cand[k] = c * best.dir[k] + s * w[k];
                cn += cand[k] * cand[k];
            }
            // Renormalize: rounding drift off the unit sphere would otherwise
            // ratchet outward on radially increasing functions.
            cn = std::sqrt(cn);
            if (cn < 1e-300) continue;
            Point p = b.center;
            for (int k = 0; k < reals; ++k) {
                cand[k] /= cn;
                p.x[k] += b.radius * cand[k];
            }
            double v = f.root()->eval_raw(p);
            if (v > best.value) {
                best.value = v;
                std::copy(cand, cand + reals, best.dir.begin());
            }
        }
        gap = best.value - prev_round;
    }

    Estimate e;
    e.value = best.value;
    e.stderr_ = gap;
    e.sup_gap = gap;
    e.budget = budget;
    e.seed = seed;
    return e;
}

// ---------------------------------------------------------------------------
// Dyadic-annulus divergence detection
// ---------------------------------------------------------------------------

IntegrandRecipe IntegrandRecipe::exp_neg_scaled(PshExpr f, double r) {
    if (!(r > 0)) throw Error("exp_neg_scaled: scale must be positive");
    IntegrandRecipe rec;
    rec.kind = Kind::ExpNegScaled;
    rec.f = std::move(f);
    rec.scale_r = r;
    return rec;
}

IntegrandRecipe IntegrandRecipe::grad_squared(PshExpr f) {
    IntegrandRecipe rec;
    rec.kind = Kind::GradSquared;
    rec.f = std::move(f);
    return rec;
}

FitLine weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w) {
    FitLine fit;
    fit.points = static_cast<int>(x.size());
    if (x.size() < 2) {
        fit.slope_se = kInf;
        fit.rss = kInf;
        return fit;
    }
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0) {
        fit.slope_se = kInf;
        fit.rss = kInf;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.slope_se = std::sqrt(1.0 / sxx);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.rss += w[i] * r * r;
    }
    return fit;
}

namespace {

// One annulus level estimated in log space (contributions can span hundreds of
// orders of magnitude near strong singularities).
struct LogLevel {
    double log_mean = -kInf;  // log of the plain sample mean of the integrand
    double rel_se = kInf;
    bool all_zero = false;
};

LogLevel chunked_log_mean(std::uint64_t key, std::uint64_t budget,
                          const std::function<double(Rng&)>& draw_log) {
    std::size_t n_chunks = static_cast<std::size_t>((budget + kChunk - 1) / kChunk);
    struct Partial {
        double mx = -kInf, sum = 0, sumsq = 0;
        std::uint64_t n = 0;
        std::exception_ptr err;
    };
    std::vector<Partial> parts(n_chunks);
    parallel_chunks(n_chunks, [&](std::size_t ci) {
        Partial& p = parts[ci];
        try {
            Rng rng(mix_key(key, ci));
            std::uint64_t lo = ci * kChunk;
            std::uint64_t hi = std::min(budget, lo + kChunk);
            std::vector<double> ts;
            ts.reserve(hi - lo);
            for (std::uint64_t i = lo; i < hi; ++i) {
                double t = draw_log(rng);
                ts.push_back(t);
                p.mx = std::max(p.mx, t);
            }
            // Shifted second pass within the chunk keeps exp() in range.
            if (p.mx > -kInf) {
                for (double t : ts) {
                    double e = std::exp(t - p.mx);
                    p.sum += e;
                    p.sumsq += e * e;
                }
            }
            p.n = ts.size();
        } catch (...) {
            p.err = std::current_exception();
        }
    });
    double gmax = -kInf;
    for (const auto& p : parts) {
        if (p.err) std::rethrow_exception(p.err);
        gmax = std::max(gmax, p.mx);
    }
    LogLevel lv;
    std::uint64_t n = 0;
    if (gmax == -kInf) {
        for (const auto& p : parts) n += p.n;
        lv.all_zero = true;
        lv.rel_se = 0.0;
        return lv;
    }
    double sum = 0, sumsq = 0;
    for (const auto& p : parts) {
        double shift = std::exp(p.mx - gmax);
        sum += p.sum * shift;
        sumsq += p.sumsq * shift * shift;
        n += p.n;
    }
    double mean = sum / static_cast<double>(n);
    double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    lv.log_mean = gmax + std::log(mean);
    lv.rel_se = std::sqrt(var / static_cast<double>(n)) / mean;
    return lv;
}

}  // namespace

DivergenceVerdict integral_with_divergence(const IntegrandRecipe& recipe, const BallSpec& b,
                                           int levels, std::uint64_t per_level_budget,
                                           std::uint64_t seed) {
    if (!recipe.f.valid()) throw Error("integral_with_divergence: empty recipe");
    if (recipe.f.dim() != b.dim())
        throw DimensionError("integral_with_divergence: dimension mismatch");
    levels = std::clamp(levels, 8, defaults::kMaxAnnulusLevels);
    per_level_budget = std::max<std::uint64_t>(per_level_budget, 256);
    const int n = b.dim();
    const bool line_mode = recipe.annuli == IntegrandRecipe::Annuli::Line;
    const int annulus_reals = line_mode ? 2 : 2 * n;
    const double R = b.radius;

    auto integrand_log = [&](const Point& p) -> double {
        if (recipe.kind == IntegrandRecipe::Kind::ExpNegScaled) {
            double v = recipe.f.root()->eval_raw(p);
            if (v == -kInf) return kInf;  // pole marker, triggers a redraw
            return -2.0 * v / recipe.scale_r;
        }
        GradResult g = recipe.f.grad(p);
        double q = 0.0;
        for (int i = 0; i < 2 * n; ++i) q += g.g[i] * g.g[i];
        return q == 0.0 ? -kInf : std::log(q);
    };

    DivergenceVerdict verdict;
    verdict.levels.resize(levels);

    for (int k = 0; k < levels; ++k) {
        double outer = std::ldexp(R, -k);
        double inner = std::ldexp(R, -k - 1);
        if (inner < 1e-300) {
            verdict.levels.resize(k);
            break;
        }
        double volume;
        if (line_mode) {
            // Cylinder slab: 2D annulus in z_{line_var} times disks of radius R
            // in the remaining coordinates.
            volume = 3.14159265358979323846 * (outer * outer - inner * inner);
            for (int j = 1; j < n; ++j) volume *= 3.14159265358979323846 * R * R;
        } else {
            volume = ball_volume(2 * n, outer) - ball_volume(2 * n, inner);
        }

        std::uint64_t key = substream_key(seed, StreamTag::Annulus, static_cast<std::uint64_t>(k));
        LogLevel lv = chunked_log_mean(key, per_level_budget, [&](Rng& rng) -> double {
            for (int tries = 0; tries < 100; ++tries) {
                Point p = b.center;
                if (line_mode) {
                    double dir[2];
                    double a = rng.uniform(0.0, 6.283185307179586476925286766559);
                    dir[0] = std::cos(a);
                    dir[1] = std::sin(a);
                    double u = rng.uniform(inner * inner, outer * outer);
                    double r = std::sqrt(u);
                    p.x[2 * recipe.line_var] += r * dir[0];
                    p.x[2 * recipe.line_var + 1] += r * dir[1];
                    for (int j = 0; j < n; ++j) {
                        if (j == recipe.line_var) continue;
                        double aj = rng.uniform(0.0, 6.283185307179586476925286766559);
                        double rj = R * std::sqrt(rng.uniform01());
                        p.x[2 * j] += rj * std::cos(aj);
                        p.x[2 * j + 1] += rj * std::sin(aj);
                    }
                } else {
                    double dir[kMaxReal];
                    double nrm2 = 0.0;
                    for (int i = 0; i < annulus_reals; ++i) {
                        dir[i] = rng.normal();
                        nrm2 += dir[i] * dir[i];
                    }
                    double inv = 1.0 / std::sqrt(nrm2);
                    double u = rng.uniform(std::pow(inner, 2 * n), std::pow(outer, 2 * n));
                    double r = std::pow(u, 1.0 / (2 * n));
                    for (int i = 0; i < 2 * n; ++i) p.x[i] += r * dir[i] * inv;
                }
                double t;
                try {
                    t = integrand_log(p);
                } catch (const SingularPointError&) {
                    continue;  // redraw
                }
                if (t == kInf) continue;  // pole hit, redraw
                return t;
            }
            throw EstimationError("redraw cap reached inside an annulus level");
        });

        DivergenceLevel& out = verdict.levels[k];
        out.budget = per_level_budget;
        out.zero = lv.all_zero;
        out.rel_se = lv.rel_se;
        if (lv.all_zero) {
            out.log_value = -kInf;
            out.value = 0.0;
            out.reliable = true;
        } else {
            out.log_value = lv.log_mean + std::log(volume);
            out.value = std::exp(out.log_value);
            out.reliable = lv.rel_se <= 0.5;
        }
    }

    // Gather reliable, nonzero levels for the fits.
    std::vector<int> usable;
    bool any_nonzero = false;
    for (std::size_t k = 0; k < verdict.levels.size(); ++k) {
        const auto& lv = verdict.levels[k];
        if (lv.zero) continue;
        any_nonzero = true;
        if (lv.reliable) usable.push_back(static_cast<int>(k));
    }
    if (!any_nonzero) {
        // Integrand vanishes on every level (e.g. gradient of a constant).
        verdict.outcome = DivergenceOutcome::Finite;
        verdict.rule = "all-zero";
        verdict.total = Estimate{};
        verdict.total.seed = seed;
        return verdict;
    }
    if (usable.size() < 4) {
        verdict.outcome = DivergenceOutcome::Inconclusive;
        verdict.rule = "noise";
        return verdict;
    }

    auto collect = [&](const std::vector<int>& ks, bool power_x) {
        std::vector<double> x, y, w;
        for (int k : ks) {
            const auto& lv = verdict.levels[k];
            double se = std::max(lv.rel_se, 1e-4);
            double depth = k + 0.5 - std::log2(R);  // |log2| of the level midpoint
            if (power_x && depth < 0.5) continue;
            x.push_back(power_x ? std::log(depth) : static_cast<double>(k));
            y.push_back(lv.log_value);
            w.push_back(1.0 / (se * se));
        }
        return std::tuple{x, y, w};
    };

    std::vector<int> window(usable.end() - std::min<std::size_t>(usable.size(),
                                                                 defaults::kDivergenceFitWindow),
                            usable.end());
    {
        auto [x, y, w] = collect(window, false);
        verdict.geometric_fit = weighted_line_fit(x, y, w);
    }
    verdict.growth_rate = verdict.geometric_fit.slope;

    // Branch 1: statistically nonnegative growth per level means the dyadic
    // tail cannot be summable.
    double g = verdict.geometric_fit.slope;
    double sg = verdict.geometric_fit.slope_se;
    if (g >= -3.0 * sg - 1e-12) {
        verdict.outcome = DivergenceOutcome::Divergent;
        verdict.rule = "geometric-nonnegative";
        return verdict;
    }

    // Model selection over the full usable range (skip the transition level 0):
    // log-singular integrands give power-law contributions in the level depth,
    // whose convergence boundary is the harmonic exponent -1.
    std::vector<int> body(usable.begin() + (usable.front() == 0 ? 1 : 0), usable.end());
    bool power_branch = false;
    if (body.size() >= 6) {
        auto [xg, yg, wg] = collect(body, false);
        auto [xp, yp, wp] = collect(body, true);
        FitLine geom_all = weighted_line_fit(xg, yg, wg);
        verdict.power_fit = weighted_line_fit(xp, yp, wp);
        if (verdict.power_fit.points >= 6 && verdict.power_fit.rss < 0.5 * geom_all.rss) {
            double span = std::abs(verdict.power_fit.slope) * (xp.back() - xp.front());
            if (span >= defaults::kPowerBranchMinDrop) power_branch = true;
        }
    }

    auto finite_total = [&](double tail) {
        Estimate total;
        double sum = 0.0, var = 0.0;
        for (const auto& lv : verdict.levels) {
            sum += lv.value;
            var += (lv.value * lv.rel_se) * (lv.value * lv.rel_se);
        }
        total.value = sum + tail;
        total.stderr_ = std::sqrt(var);
        total.budget = per_level_budget * verdict.levels.size();
        total.seed = seed;
        total.converged = tail <= 0.01 * sum;
        return total;
    };

    if (power_branch) {
        double beta = verdict.power_fit.slope;
        if (beta >= -(1.0 + defaults::kPowerLawDelta)) {
            verdict.outcome = DivergenceOutcome::Divergent;
            verdict.rule = "power-tail";
            return verdict;
        }
        const auto& last = verdict.levels[usable.back()];
        double depth = usable.back() + 0.5 - std::log2(R);
        double tail = last.value * depth / (-beta - 1.0);
        verdict.outcome = DivergenceOutcome::Finite;
        verdict.rule = "power-tail";
        verdict.total = finite_total(tail);
        return verdict;
    }

    // Geometric decay; the 1% tail bound gates the converged flag, not the
    // Finite outcome itself (a significantly negative log-ratio already gives
    // a summable dominating geometric series).
    double rho = std::exp(g);
    const auto& last = verdict.levels[usable.back()];
    double tail = rho < 1.0 ? last.value * rho / (1.0 - rho) : 0.0;
    verdict.outcome = DivergenceOutcome::Finite;
    verdict.rule = "geometric";
    verdict.total = finite_total(tail);
    verdict.total.converged = verdict.total.converged && g <= -defaults::kGeometricDelta;
    return verdict;
}

}  // namespace pshlab
