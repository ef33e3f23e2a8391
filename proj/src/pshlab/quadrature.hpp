#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pshlab/expr.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/types.hpp"

namespace pshlab {

// Chunk-deterministic Monte Carlo mean: the budget is split into fixed-size
// chunks keyed by (stream_key, chunk index) and partials are combined in chunk
// order, so the result is bitwise independent of the worker count.
Estimate mc_mean(std::uint64_t stream_key, std::uint64_t budget,
                 const std::function<double(Rng&)>& draw);

// Spherical / solid means of a psh expression. Samples landing exactly on the
// singular set are redrawn (probability-zero event, capped at 100 redraws).
Estimate mean_on_sphere(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                        std::uint64_t seed);
Estimate mean_on_ball(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                      std::uint64_t seed);

struct SupOptions {
    // The maximum principle puts the sup of a psh function on the boundary
    // sphere; pass false to also sample the interior on the coarse pass.
    bool sphere_only = true;
    int refine_rounds = 4;
    double cap_shrink = 4.0;
};

// Sampled supremum: coarse boundary pass (3/4 of the budget) plus shrinking
// spherical-cap refinements around the incumbent. The result is a lower bound
// of the true sup; stderr_ and sup_gap report the last-two-round gap.
Estimate sup_on_ball(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                     std::uint64_t seed, const SupOptions& opts = {});

// ---------------------------------------------------------------------------
// Possibly-divergent integrals over dyadic annuli
// ---------------------------------------------------------------------------

struct IntegrandRecipe {
    enum class Kind { ExpNegScaled, GradSquared };
    enum class Annuli { Point, Line };

    Kind kind = Kind::ExpNegScaled;
    PshExpr f;
    double scale_r = 1.0;  // ExpNegScaled: integrand exp(-2 f / scale_r)

    Annuli annuli = Annuli::Point;
    int line_var = 0;  // Line mode: dyadic levels in |z_var - center_var|

    static IntegrandRecipe exp_neg_scaled(PshExpr f, double r);
    static IntegrandRecipe grad_squared(PshExpr f);
};

struct DivergenceLevel {
    double log_value = 0.0;  // log of the annulus contribution
    double value = 0.0;
    double rel_se = 0.0;
    std::uint64_t budget = 0;
    bool reliable = false;
    bool zero = false;  // integrand identically 0 on the level samples
};

enum class DivergenceOutcome { Finite, Divergent, Inconclusive };

struct FitLine {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double rss = 0.0;  // weighted residual sum of squares
    int points = 0;
};

struct DivergenceVerdict {
    DivergenceOutcome outcome = DivergenceOutcome::Inconclusive;
    double growth_rate = 0.0;  // fitted log-ratio per annulus level
    Estimate total;            // meaningful for Finite outcomes
    std::vector<DivergenceLevel> levels;
    FitLine geometric_fit;  // log contribution vs level, last-window
    FitLine power_fit;      // log contribution vs log(level depth)
    std::string rule;       // which classification branch decided
    bool finite() const { return outcome == DivergenceOutcome::Finite; }
    bool divergent() const { return outcome == DivergenceOutcome::Divergent; }
};

// Decomposes the ball into dyadic annuli around the singularity (point mode)
// or around the singular line (line mode, transverse slab sampled uniformly),
// estimates each level by uniform sampling times the level volume, and
// classifies the tail. Geometric tails are judged by the fitted per-level
// log-ratio; slowly varying tails fall back to a power-law fit in the level
// depth, whose convergence boundary is the harmonic exponent -1.
DivergenceVerdict integral_with_divergence(const IntegrandRecipe& recipe, const BallSpec& b,
                                           int levels, std::uint64_t per_level_budget,
                                           std::uint64_t seed);

// Weighted least squares of y against x (weights ~ 1/se^2).
FitLine weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w);

}  // namespace pshlab
