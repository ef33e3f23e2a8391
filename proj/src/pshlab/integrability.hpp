#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pshlab/expr.hpp"
#include "pshlab/lelong.hpp"
#include "pshlab/quadrature.hpp"

namespace pshlab {

// ---------------------------------------------------------------------------
// Integrability index iota = inf { r > 0 : exp(-2 f / r) locally L^1 }
// ---------------------------------------------------------------------------

struct IotaProbe {
    double r = 0.0;
    DivergenceOutcome outcome = DivergenceOutcome::Inconclusive;
    bool budget_doubled = false;
};

struct IotaResult {
    double iota = 0.0;
    double tol = 0.0;
    // BelowWindow: the lower endpoint was already integrable, so iota lies in
    // [0, r_lo); reported as 0 +- r_lo (constants and the section-5
    // compositions land here).
    enum class Status { Bracketed, BelowWindow } status = Status::Bracketed;
    std::vector<IotaProbe> probes;
};

IotaResult integrability_index(const PshExpr& f, const Point& a, double r_lo, double r_hi,
                               double tol, int levels, std::uint64_t per_level_budget,
                               std::uint64_t seed);

struct SkodaReport {
    double nu = 0.0;
    double nu_spread = 0.0;
    double iota = 0.0;
    double iota_tol = 0.0;
    double lower = 0.0;  // nu / n
    double upper = 0.0;  // nu
    double slack = 0.0;
    bool pass = false;
    enum class TightEnd { Lower, Upper } tight = TightEnd::Lower;
};

// nu/n <= iota <= nu with slack 0.05 max(1, nu) plus propagated tolerances.
SkodaReport skoda_report(const PshExpr& f, const Point& a, const RadiusGrid& grid,
                         std::uint64_t budget_per_radius, int levels,
                         std::uint64_t per_level_budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// John-Nirenberg tail profiles
// ---------------------------------------------------------------------------

struct JNProfile {
    std::vector<double> lambda;
    std::vector<double> tail_fraction;  // fraction of samples with |f - f_B| > lambda
    double decay_rate = 0.0;            // -slope of log tail vs lambda on the linear range
    double rate_se = 0.0;
    double fit_lo = 0.0, fit_hi = 0.0;  // lambda range used by the fit
    int fit_points = 0;
    double goodness = 0.0;    // weighted rss of the fit
    double exp_moment = 0.0;  // resummed mean of exp((rate/2) |f - f_B|)
};

JNProfile jn_profile(const PshExpr& f, const BallSpec& b, double lambda_max, int steps,
                     std::uint64_t budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// kappa_eta transform and W^{1,2} membership
// ---------------------------------------------------------------------------

struct EtaSpec {
    enum class Kind { Linear, Power } kind = Kind::Linear;
    double alpha = 0.25;  // Power: eta(t) = t^{1-2 alpha}, 0 < alpha < 1/2
    double gamma = 1.0;   // lower integration limit; Power admits the 0+ limit

    static EtaSpec linear(double gamma = 1.0);
    static EtaSpec power(double alpha, double gamma = 0.0);
    void validate() const;
    double eta(double t) const;
    double eta_prime(double t) const;
};

// kappa_eta(t) = int_gamma^t sqrt(eta'(s)) / eta(s) ds, in closed form.
double kappa_transform(const EtaSpec& eta, double t);
// Generic quadrature fallback (tanh-sinh; handles endpoint singularities);
// agrees with the closed forms to 1e-10.
double kappa_transform_quadrature(const EtaSpec& eta, double t);

// Divergence verdict on the integral of |grad f|^2 with annuli centered on
// the singular set (dyadic in the transverse distance for singular lines).
DivergenceVerdict sobolev_check(const PshExpr& f, const BallSpec& region, int levels,
                                std::uint64_t per_level_budget, std::uint64_t seed);

// Shared annuli-mode selection: returns a recipe template with the annulus
// geometry implied by the singular component at/near the point.
void attach_annuli_mode(IntegrandRecipe& recipe, const PshExpr& f, const Point& a);

std::string jn_csv(const JNProfile& p);

}  // namespace pshlab
