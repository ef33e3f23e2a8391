#pragma once

#include <cstdint>

// Pinned defaults: every budget, grid and threshold the scenario runner and
// the acceptance suite rely on lives here, so published numbers stay stable
// across releases.
namespace pshlab::defaults {

// Lelong radius grid: r_k = r0 * q^k, k = 0..m-1.
inline constexpr double kGridR0 = 1e-1;
inline constexpr double kGridRatio = 0.31622776601683794;  // 10^(-1/2)
inline constexpr int kGridCount = 9;
inline constexpr double kMinRadius = 1e-8;  // double-precision floor for log-range grids

// Fraction of the smallest radii used for asymptotic slope fits.
inline constexpr double kSlopeWindowFraction = 0.6;

inline constexpr std::uint64_t kBudgetPerRadius = 100000;
inline constexpr std::uint64_t kBudgetDefault = 100000;

// Dyadic-annulus divergence detection.
inline constexpr int kAnnulusLevels = 30;
inline constexpr int kMaxAnnulusLevels = 40;
inline constexpr std::uint64_t kAnnulusBudget = 20000;
inline constexpr int kDivergenceFitWindow = 8;
inline constexpr double kGeometricDelta = 0.05;  // converged-flag threshold on the log-ratio
inline constexpr double kPowerLawDelta = 0.05;   // margin below the harmonic exponent -1
inline constexpr double kPowerBranchMinDrop = 0.7;

// Integrability-index bisection window.
inline constexpr double kIotaWindowLo = 0.05;
inline constexpr double kIotaWindowHi = 4.0;
inline constexpr double kIotaTolerance = 0.05;
inline constexpr double kIotaProbeRadius = 0.1;

// Oscillation defaults.
inline constexpr int kOscCenters = 64;
inline constexpr int kBmoRadii = 6;
inline constexpr double kSlackSigmas = 3.0;

// Sup refinement schedule.
inline constexpr int kSupRounds = 4;
inline constexpr double kSupCapShrink = 4.0;

// John-Nirenberg profile.
inline constexpr double kJnLambdaMax = 6.0;
inline constexpr int kJnSteps = 160;
inline constexpr std::uint64_t kJnBudget = 1000000;
inline constexpr double kJnFitTailHi = 1e-1;
inline constexpr double kJnFitTailLo = 1e-4;

// lelong_uniform center sampling.
inline constexpr int kUniformFillerCenters = 100;
inline constexpr int kUniformBoundaryShare = 36;  // of the filler centers

inline constexpr std::uint64_t kDefaultSeed = 42;

}  // namespace pshlab::defaults
