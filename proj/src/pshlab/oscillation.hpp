#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pshlab/expr.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/quadrature.hpp"

namespace pshlab {

// Mean oscillation of f over the ball: two-pass estimate (ball mean first,
// then the mean absolute deviation on a fresh substream); stderr combines
// both passes.
Estimate mo(const PshExpr& f, const BallSpec& b, std::uint64_t budget, std::uint64_t seed);

// Upper oscillation sup_B f - f_B; value carries the sampled-sup gap.
Estimate uo(const PshExpr& f, const BallSpec& b, std::uint64_t budget, std::uint64_t seed);

struct BmoResult {
    Estimate value;  // sampled maximum of MO over admissible (center, radius) pairs
    Point argmax_center = Point::zero(1);
    double argmax_radius = 0.0;
    std::size_t pairs_tested = 0;
    bool lower_bound_flag = true;  // a sampled max never certifies the sup
};

// Restricted-family BMO norm: sup of MO over centers z in d and radii
// r <= min(grid radius, dist(z, boundary)/2). Center streams are
// prefix-stable in center_budget.
BmoResult bmo_norm(const PshExpr& f, const Domain& d, int center_budget,
                   const std::vector<double>& radius_grid, std::uint64_t budget,
                   std::uint64_t seed);

struct OscillationCell {
    Point center = Point::zero(1);
    double requested_radius = 0.0;
    double used_radius = 0.0;  // min(r, dist/2), clamped to the certified region
    double mo_value = 0.0;
    double mo_se = 0.0;
};

struct OscillationProfile {
    std::vector<double> radii;     // requested radii, decreasing
    std::vector<double> worst_mo;  // per-radius max over sampled centers
    std::vector<double> stderrs;   // stderr at the argmax center
    std::vector<Point> argmax_centers;
    std::vector<OscillationCell> table;
};

// Per-radius worst-case mean oscillation over sampled admissible centers; the
// center mixture is half uniform, half a geometric sequence accumulating at
// the boundary feature (cusp tip / singular point), matching where the worst
// centers live.
OscillationProfile vmo_modulus(const PshExpr& f, const Domain& d, std::vector<double> radii,
                               int center_budget, std::uint64_t budget, std::uint64_t seed);

struct DecompositionReport {
    int n = 1;
    double constant = 0.0;  // 3^{2n-1} / 2^{2n-2}
    double mo_value = 0.0;
    double uo_value = 0.0;
    double i1 = 0.0;  // sup_B - sphere mean
    double i2 = 0.0;  // sphere mean - ball mean
    double sup_r = 0.0, sup_half_r = 0.0;
    double sphere_r = 0.0, sphere_shrunk = 0.0;
    double ball_mean = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
};

// MO <= 2 (3^{2n-1}/2^{2n-2}) (sup_r - sup_{r/2}) + 2 (f_{dB_r} - f_{dB_{e^{-1/2n} r}}),
// with slack 3*stderr plus the sampled-sup gaps.
DecompositionReport decomposition_check(const PshExpr& f, const BallSpec& b,
                                        std::uint64_t budget, std::uint64_t seed);

struct ProbeCheck {
    Point x = Point::zero(1);
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
};

struct HarnackVerdict {
    double sup_value = 0.0;  // verification of f <= 0 on the closed ball
    double sphere_mean = 0.0;
    std::vector<ProbeCheck> probes;
    bool pass = false;
};

// f(x) <= r^{2n-2}(r-|x|)/(r+|x|)^{2n-1} * (sphere mean) for f <= 0 on the
// closed ball; the nonpositivity precondition is verified by sup_on_ball and
// violations throw DomainError.
HarnackVerdict harnack_check(const PshExpr& f, const BallSpec& b, int probe_count,
                             std::uint64_t budget, std::uint64_t seed);

struct BarycenterVerdict {
    double ball_mean = 0.0;
    double shrunk_sphere_mean = 0.0;  // sphere mean at radius e^{-1/(2n)} r
    double slack = 0.0;
    bool pass = false;
};

// f_B >= f_{dB(c, e^{-1/(2n)} r)}: the ball mean is the d(e^{2nt})-average of
// the convex sphere-mean profile, whose barycenter sits at t = -1/(2n).
BarycenterVerdict barycenter_check(const PshExpr& f, const BallSpec& b, std::uint64_t budget,
                                   std::uint64_t seed);

// Worst-center admissible radius: min(requested, dist/2), further clamped so
// the ball stays inside the expression's certified region. Returns 0 when no
// admissible radius exists.
double admissible_radius(const PshExpr& f, const Domain& d, const Point& center,
                         double requested);

std::string profile_csv(const OscillationProfile& p);

}  // namespace pshlab
