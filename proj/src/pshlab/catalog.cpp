#include "pshlab/catalog.hpp"

#include <cmath>
#include <cstdio>

namespace pshlab {

namespace {

PshExpr log_abs_z(int n, int var) {
    return make_log_abs_poly(Poly::univariate(n, var, {{1.0, 0.0}, {0.0, 0.0}}));
}

std::vector<CatalogEntry> build() {
    std::vector<CatalogEntry> out;
    const double inv_e = std::exp(-1.0);

    auto add = [&](CatalogEntry e) { out.push_back(std::move(e)); };

    {
        CatalogEntry e;
        e.name = "log_abs";
        e.dim = 1;
        e.expr = log_abs_z(1, 0);
        e.distinguished = Point::zero(1);
        e.expected_nu = 1.0;
        e.expected_iota = 1.0;
        e.expected_centered_mo = inv_e;
        e.working_ball = BallSpec(Point::zero(1), 1.0);
        add(e);
    }
    {
        CatalogEntry e;
        e.name = "log_abs_shift";
        e.dim = 1;
        e.expr = make_log_abs_poly(Poly::univariate(1, 0, {{1.0, 0.0}, {-1.0, 0.0}}));
        e.distinguished = Point::make(1, {1.0, 0.0});
        e.expected_nu = 1.0;
        e.expected_iota = 1.0;
        e.expected_centered_mo = inv_e;
        e.working_ball = BallSpec(Point::make(1, {1.0, 0.0}), 1.0);
        e.note = "log|z-1|";
        add(e);
    }
    for (int m = 2; m <= 3; ++m) {
        CatalogEntry e;
        e.name = m == 2 ? "double_log" : "triple_log";
        e.dim = 1;
        e.expr = make_scale(m, log_abs_z(1, 0));
        e.distinguished = Point::zero(1);
        e.expected_nu = m;
        e.expected_iota = m;
        e.expected_centered_mo = m * inv_e;
        e.working_ball = BallSpec(Point::zero(1), 1.0);
        add(e);
    }
    {
        CatalogEntry e;
        e.name = "norm_log_C2";
        e.dim = 2;
        e.expr = make_log_norm(Point::zero(2), {0, 1});
        e.distinguished = Point::zero(2);
        e.expected_nu = 1.0;
        e.expected_iota = 0.5;  // ||z||^{-2/r} is L^1 near 0 in R^4 iff 2/r < 4
        e.expected_centered_mo = 0.5 * inv_e;
        e.working_ball = BallSpec(Point::zero(2), 1.0);
        add(e);
    }
    {
        CatalogEntry e;
        e.name = "slice_log_C2";
        e.dim = 2;
        e.expr = log_abs_z(2, 0);
        e.distinguished = Point::zero(2);
        e.expected_nu = 1.0;
        e.expected_iota = 1.0;  // Fubini reduces |z1|^{-2/r} to the C^1 case
        // MO of centered balls in R^4: |z1|/r has density 4t(1-t^2); the
        // antiderivative (2t^2-t^4) log t + (t^2-t^4)/2 gives 2e^{-3/2}-e^{-3}/2.
        e.expected_centered_mo = 2.0 * std::exp(-1.5) - 0.5 * std::exp(-3.0);
        e.working_ball = BallSpec(Point::zero(2), 1.0);
        add(e);
    }

    // Section-5 compositions over phi = log|z| on {|z| < e^{-2}} (gamma = 2).
    {
        BallSpec certify(Point::zero(1), std::exp(-2.0));
        PshExpr phi = log_abs_z(1, 0);
        auto composed = [&](const ConvexChi& chi) { return compose_convex(chi, phi, certify); };
        {
            CatalogEntry e;
            e.name = "neginv_log";
            e.dim = 1;
            e.expr = composed(ConvexChi::neg_inverse(2.0));
            e.distinguished = Point::zero(1);
            e.expected_nu = 0.0;
            e.expected_iota = 0.0;
            e.expected_sobolev_finite = true;  // |grad|^2 ~ 1/(s^2 log^4 s), integrable
            e.working_ball = certify;
            e.note = "-1/log|z|";
            add(e);
        }
        {
            CatalogEntry e;
            e.name = "neglogneg_log";
            e.dim = 1;
            e.expr = composed(ConvexChi::neg_log_neg(2.0));
            e.distinguished = Point::zero(1);
            e.expected_nu = 0.0;
            e.expected_iota = 0.0;
            e.expected_sobolev_finite = true;  // t^{(1)} of a subharmonic function
            e.working_ball = certify;
            e.note = "-log(-log|z|)";
            add(e);
        }
        {
            CatalogEntry e;
            e.name = "negpow_log";
            e.dim = 1;
            e.expr = composed(ConvexChi::neg_pow_neg(0.5, 2.0));
            e.distinguished = Point::zero(1);
            e.expected_nu = 0.0;
            e.expected_iota = 0.0;
            e.expected_sobolev_finite = false;  // alpha = 1/2 sits on the sharp exponent
            e.working_ball = certify;
            e.note = "-(-log|z|)^(1/2)";
            add(e);
        }
    }

    // The same compositions over psi = log|z1|^2 in C^2 on {||z|| < e^{-1}}.
    {
        BallSpec certify(Point::zero(2), std::exp(-1.0));
        PshExpr psi = make_scale(2.0, log_abs_z(2, 0));
        auto composed = [&](const ConvexChi& chi) { return compose_convex(chi, psi, certify); };
        {
            CatalogEntry e;
            e.name = "neginv_slicelog2_C2";
            e.dim = 2;
            e.expr = composed(ConvexChi::neg_inverse(2.0));
            e.distinguished = Point::zero(2);
            e.expected_nu = 0.0;
            e.expected_iota = 0.0;
            e.working_ball = certify;
            e.note = "-1/log|z1|^2";
            add(e);
        }
        {
            CatalogEntry e;
            e.name = "neglogneg_slicelog2_C2";
            e.dim = 2;
            e.expr = composed(ConvexChi::neg_log_neg(2.0));
            e.distinguished = Point::zero(2);
            e.expected_nu = 0.0;
            e.expected_iota = 0.0;
            e.working_ball = certify;
            e.note = "-log(-log|z1|^2)";
            add(e);
        }
        {
            CatalogEntry e;
            e.name = "negpow_slicelog2_C2";
            e.dim = 2;
            e.expr = composed(ConvexChi::neg_pow_neg(0.5, 2.0));
            e.distinguished = Point::zero(2);
            e.expected_nu = 0.0;
            e.expected_iota = 0.0;
            e.expected_sobolev_finite = false;
            e.working_ball = certify;
            e.note = "-(-log|z1|^2)^(1/2)";
            add(e);
        }
        for (double alpha : {0.3, 0.4, 0.5}) {
            CatalogEntry e;
            char buf[32];
            std::snprintf(buf, sizeof buf, "sobolev_alpha_%03d", static_cast<int>(alpha * 100));
            e.name = buf;
            e.dim = 2;
            e.expr = composed(ConvexChi::neg_pow_neg(alpha, 2.0));
            e.distinguished = Point::zero(2);
            e.expected_nu = 0.0;
            e.expected_iota = 0.0;
            e.expected_sobolev_finite = alpha < 0.5;
            e.working_ball = certify;
            e.note = "-(-log|z1|^2)^alpha";
            add(e);
        }
    }
    return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw Error("unknown catalog entry: " + name);
}

bool catalog_has(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return true;
    return false;
}

}  // namespace pshlab
