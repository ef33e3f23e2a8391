#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pshlab/expr.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/quadrature.hpp"

namespace pshlab {

// Geometric radius grid r_k = r0 * ratio^k discretizing r -> 0+.
struct RadiusGrid {
    double r0 = 1e-1;
    double ratio = 0.31622776601683794;
    int count = 9;

    std::vector<double> radii() const;
    void validate() const;
};

// Regression of an ordinate against t = log r, with monotonicity/convexity
// diagnostics computed from the raw ordinates (not from the fit).
struct SlopeFit {
    std::vector<double> t;   // log r, in grid order (descending)
    std::vector<double> v;   // ordinates
    std::vector<double> se;  // per-ordinate statistical error
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double max_residual = 0.0;
    int window_points = 0;  // smallest-radii window used by the fit
    bool monotone_nondecreasing = false;
    bool midpoint_convex = false;
};

SlopeFit fit_slope(const std::vector<double>& radii, const std::vector<double>& values,
                   const std::vector<double>& errors, double window_fraction);

struct LelongEstimate {
    Point at = Point::zero(1);
    SlopeFit sphere_fit;
    SlopeFit ball_fit;
    SlopeFit sup_fit;
    double raw_median = 0.0;  // median of the three fitted slopes
    double consensus = 0.0;
    double spread = 0.0;  // max pairwise slope difference
    // True when the tree structure forces nu = 0 (composition with
    // chi'(-inf) = 0, bounded-below branches); consensus is then exactly 0 and
    // the three raw fits document the finite-radius behavior.
    bool structural_zero = false;
};

LelongEstimate lelong_at(const PshExpr& f, const Point& a, const RadiusGrid& grid,
                         std::uint64_t budget_per_radius, std::uint64_t seed);

struct UniformLelongRow {
    Point center = Point::zero(1);
    bool refused = false;  // grid does not fit inside the certified region
    bool is_singular_candidate = false;
    double consensus = 0.0;
    double spread = 0.0;
};

struct UniformLelongResult {
    double value = 0.0;
    Point argmax = Point::zero(1);
    double argmax_spread = 0.0;
    std::vector<UniformLelongRow> table;
};

// sup of nu over the closure of d: evaluates lelong_at at every symbolic
// singular-set candidate inside the closure plus a quasi-uniform filler
// (interior + boundary samples). Centers whose grid would leave the certified
// region of f are refused and recorded.
UniformLelongResult lelong_uniform(const PshExpr& f, const Domain& d, int filler_centers,
                                   const RadiusGrid& grid, std::uint64_t budget_per_radius,
                                   std::uint64_t seed);

struct SlopeDiagnostics {
    bool monotone_ok = false;
    bool convex_ok = false;
    std::vector<std::string> violations;
    bool data_quality_failure = false;
};

// Checks the convex/nondecreasing structure of sup-based ordinates within
// 3*stderr slack; violations indicate bad data, not mathematical findings.
SlopeDiagnostics slope_diagnostics(const SlopeFit& fit);

// Per-radius table: t, sphere_mean, sphere_stderr, ball_mean, ball_stderr,
// sup, sup_stderr.
std::string lelong_csv(const LelongEstimate& est);

}  // namespace pshlab
