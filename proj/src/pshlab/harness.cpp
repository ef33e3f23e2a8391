#include "pshlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pshlab/catalog.hpp"
#include "pshlab/defaults.hpp"
#include "pshlab/grammar.hpp"
#include "pshlab/integrability.hpp"
#include "pshlab/oscillation.hpp"
#include "pshlab/svg.hpp"

namespace pshlab {

namespace {

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    double v;
    while (is >> v) out.push_back(v);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    cfg.echo = text;
    cfg.grid.r0 = defaults::kGridR0;
    cfg.grid.ratio = defaults::kGridRatio;
    cfg.grid.count = defaults::kGridCount;
    cfg.seed = defaults::kDefaultSeed;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "analysis") cfg.analysis = value;
            else if (key == "function") cfg.function_text = value;
            else if (key == "domain") cfg.domain_text = value;
            else if (key == "point") cfg.point = parse_number_list(value);
            else if (key == "ball") cfg.ball = parse_number_list(value);
            else if (key == "grid.r0") cfg.grid.r0 = std::stod(value);
            else if (key == "grid.ratio") cfg.grid.ratio = std::stod(value);
            else if (key == "grid.count") cfg.grid.count = std::stoi(value);
            else if (key == "radii") cfg.radii = parse_number_list(value);
            else if (key == "budget") cfg.budget = std::stoull(value);
            else if (key == "center_budget") cfg.center_budget = std::stoi(value);
            else if (key == "probes") cfg.probes = std::stoi(value);
            else if (key == "levels") cfg.levels = std::stoi(value);
            else if (key == "lambda.max") cfg.lambda_max = std::stod(value);
            else if (key == "lambda.steps") cfg.lambda_steps = std::stoi(value);
            else if (key == "window.lo") cfg.window_lo = std::stod(value);
            else if (key == "window.hi") cfg.window_hi = std::stod(value);
            else if (key == "tol") cfg.tol = std::stod(value);
            else if (key == "eta.kind") cfg.eta_kind = value;
            else if (key == "eta.alpha") cfg.eta_alpha = std::stod(value);
            else if (key == "eta.gamma") cfg.eta_gamma = std::stod(value);
            else if (key == "kappa.t") cfg.kappa_t = parse_number_list(value);
            else if (key == "seed") { cfg.seed = std::stoull(value); cfg.seed_given = true; }
            else if (key == "out") cfg.out_dir = value;
            else if (key == "threads") cfg.threads = std::stoi(value);
            else if (key == "expect.field") cfg.expect_field = value;
            else if (key == "expect.value") cfg.expect_value = std::stod(value);
            else if (key == "expect.tol") cfg.expect_tol = std::stod(value);
            else if (key == "expect.outcome") cfg.expect_outcome = value;
            else throw ParseError("unknown config key: " + key);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError("config line " + std::to_string(lineno) + " (" + key +
                             "): " + e.what());
        }
    }
    if (cfg.analysis.empty()) throw ParseError("config: missing 'analysis'");
    return cfg;
}

namespace {

struct Resolved {
    PshExpr f;
    std::optional<Point> point;
    std::optional<BallSpec> ball;
    std::optional<Domain> domain;
    const CatalogEntry* entry = nullptr;
};

Point point_from(const std::vector<double>& xs) {
    if (xs.size() % 2 != 0 || xs.empty() || xs.size() > 2 * kMaxDim)
        throw ParseError("point: expected 2n coordinates");
    Point p = Point::zero(static_cast<int>(xs.size() / 2));
    for (std::size_t i = 0; i < xs.size(); ++i) p.x[i] = xs[i];
    return p;
}

Resolved resolve(const ScenarioConfig& cfg, bool need_function = true) {
    Resolved r;
    if (!cfg.function_text.empty()) {
        if (cfg.function_text.rfind("catalog:", 0) == 0) {
            r.entry = &catalog_entry(cfg.function_text.substr(8));
            r.f = r.entry->expr;
        } else {
            r.f = parse_expr(cfg.function_text);
        }
    } else if (need_function) {
        throw ParseError("config: missing 'function'");
    }
    if (!cfg.point.empty()) {
        r.point = point_from(cfg.point);
    } else if (r.entry) {
        r.point = r.entry->distinguished;
    }
    if (!cfg.ball.empty()) {
        if (cfg.ball.size() % 2 == 0 || cfg.ball.size() < 3)
            throw ParseError("ball: expected 2n center coordinates and a radius");
        std::vector<double> c(cfg.ball.begin(), cfg.ball.end() - 1);
        r.ball = BallSpec(point_from(c), cfg.ball.back());
    } else if (r.entry) {
        r.ball = BallSpec(r.entry->distinguished, 0.5 * r.entry->working_ball.radius);
    }
    if (!cfg.domain_text.empty()) r.domain = parse_domain(cfg.domain_text);
    if (r.f.valid()) {
        if (r.point && r.point->n != r.f.dim())
            throw DimensionError("config: point dimension does not match the function");
        if (r.ball && r.ball->dim() != r.f.dim())
            throw DimensionError("config: ball dimension does not match the function");
        if (r.domain && r.domain->dim() != r.f.dim())
            throw DimensionError("config: domain dimension does not match the function");
    }
    return r;
}

nlohmann::ordered_json estimate_json(const Estimate& e) {
    nlohmann::ordered_json j;
    j["value"] = e.value;
    j["stderr"] = e.stderr_;
    j["budget"] = e.budget;
    if (e.sup_gap > 0) j["sup_gap"] = e.sup_gap;
    return j;
}

nlohmann::ordered_json point_json(const Point& p) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (int i = 0; i < p.reals(); ++i) j.push_back(p.x[i]);
    return j;
}

void put_scalar(Report& rep, const std::string& name, double v) {
    if (!rep.results.contains("scalars")) rep.results["scalars"] = nlohmann::ordered_json::object();
    rep.results["scalars"][name] = v;
}

void put_plot(Report& rep, const std::string& name, const PlotSpec& spec) {
    nlohmann::ordered_json pj;
    pj["title"] = spec.title;
    pj["xlabel"] = spec.xlabel;
    pj["ylabel"] = spec.ylabel;
    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (const auto& s : spec.series) {
        nlohmann::ordered_json sj;
        sj["label"] = s.label;
        sj["x"] = s.x;
        sj["y"] = s.y;
        series.push_back(sj);
    }
    pj["series"] = series;
    if (spec.fit) pj["fit"] = {spec.fit->first, spec.fit->second};
    if (!rep.results.contains("plots")) rep.results["plots"] = nlohmann::ordered_json::object();
    rep.results["plots"][name] = pj;
}

PlotSpec plot_from_json(const nlohmann::ordered_json& pj) {
    PlotSpec spec;
    spec.title = pj.value("title", "");
    spec.xlabel = pj.value("xlabel", "");
    spec.ylabel = pj.value("ylabel", "");
    for (const auto& sj : pj.value("series", nlohmann::ordered_json::array())) {
        PlotSeries s;
        s.label = sj.value("label", "");
        s.x = sj.value("x", std::vector<double>{});
        s.y = sj.value("y", std::vector<double>{});
        spec.series.push_back(std::move(s));
    }
    if (pj.contains("fit")) spec.fit = {pj["fit"][0].get<double>(), pj["fit"][1].get<double>()};
    return spec;
}

nlohmann::ordered_json lelong_json(const LelongEstimate& est) {
    nlohmann::ordered_json j;
    j["consensus"] = est.consensus;
    j["raw_median"] = est.raw_median;
    j["spread"] = est.spread;
    j["structural_zero"] = est.structural_zero;
    auto fit_json = [](const SlopeFit& f) {
        nlohmann::ordered_json fj;
        fj["slope"] = f.slope;
        fj["slope_stderr"] = f.slope_se;
        fj["intercept"] = f.intercept;
        fj["max_residual"] = f.max_residual;
        fj["monotone_nondecreasing"] = f.monotone_nondecreasing;
        fj["midpoint_convex"] = f.midpoint_convex;
        return fj;
    };
    j["sphere_fit"] = fit_json(est.sphere_fit);
    j["ball_fit"] = fit_json(est.ball_fit);
    j["sup_fit"] = fit_json(est.sup_fit);
    return j;
}

PlotSpec slope_plot(const LelongEstimate& est) {
    PlotSpec spec;
    spec.title = "slopes toward the Lelong number";
    spec.xlabel = "log r";
    spec.ylabel = "lambda / means / sup";
    PlotSeries sp{"sphere mean", est.sphere_fit.t, est.sphere_fit.v};
    PlotSeries bl{"ball mean", est.ball_fit.t, est.ball_fit.v};
    PlotSeries su{"sup", est.sup_fit.t, est.sup_fit.v};
    spec.series = {sp, bl, su};
    spec.fit = {est.sphere_fit.slope, est.sphere_fit.intercept};
    return spec;
}

PlotSpec vmo_plot(const OscillationProfile& prof) {
    PlotSpec spec;
    spec.title = "worst-case mean oscillation";
    spec.xlabel = "log r";
    spec.ylabel = "omega(r)";
    PlotSeries s;
    s.label = "worst MO";
    for (std::size_t i = 0; i < prof.radii.size(); ++i) {
        s.x.push_back(std::log(prof.radii[i]));
        s.y.push_back(prof.worst_mo[i]);
    }
    spec.series = {s};
    return spec;
}

PlotSpec jn_plot(const JNProfile& prof) {
    PlotSpec spec;
    spec.title = "John-Nirenberg tail";
    spec.xlabel = "lambda";
    spec.ylabel = "log tail fraction";
    PlotSeries s;
    s.label = "log tail";
    for (std::size_t i = 0; i < prof.lambda.size(); ++i) {
        if (prof.tail_fraction[i] <= 0) continue;
        s.x.push_back(prof.lambda[i]);
        s.y.push_back(std::log(prof.tail_fraction[i]));
    }
    spec.series = {s};
    spec.fit = {-prof.decay_rate, 0.0};
    if (!s.x.empty()) {
        // Anchor the drawn line at the first fitted bin.
        double x0 = prof.fit_lo;
        double y0 = 0.0;
        for (std::size_t i = 0; i < prof.lambda.size(); ++i)
            if (prof.lambda[i] == x0 && prof.tail_fraction[i] > 0)
                y0 = std::log(prof.tail_fraction[i]);
        spec.fit = {-prof.decay_rate, y0 + prof.decay_rate * x0};
    }
    return spec;
}

std::string outcome_name(DivergenceOutcome o) {
    switch (o) {
        case DivergenceOutcome::Finite: return "finite";
        case DivergenceOutcome::Divergent: return "divergent";
        case DivergenceOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

nlohmann::ordered_json divergence_json(const DivergenceVerdict& v) {
    nlohmann::ordered_json j;
    j["outcome"] = outcome_name(v.outcome);
    j["growth_rate"] = v.growth_rate;
    j["rule"] = v.rule;
    if (v.finite()) {
        j["total"] = estimate_json(v.total);
        j["converged"] = v.total.converged;
    }
    nlohmann::ordered_json lv = nlohmann::ordered_json::array();
    for (const auto& l : v.levels) {
        nlohmann::ordered_json lj;
        lj["value"] = l.value;
        lj["rel_se"] = l.rel_se;
        lj["reliable"] = l.reliable;
        lv.push_back(lj);
    }
    j["levels"] = lv;
    return j;
}

void expect_checks(Report& rep, const ScenarioConfig& cfg) {
    if (cfg.expect_field.empty() || !cfg.expect_value) return;
    if (!rep.results.contains("scalars") || !rep.results["scalars"].contains(cfg.expect_field))
        throw ParseError("expect.field '" + cfg.expect_field + "' is not a scalar of analysis '" +
                         cfg.analysis + "'");
    double got = rep.results["scalars"][cfg.expect_field].get<double>();
    double tol = cfg.expect_tol.value_or(0.0);
    Check c;
    c.name = "expect." + cfg.expect_field;
    c.lhs = got;
    c.rhs = *cfg.expect_value;
    c.slack = tol;
    c.passed = std::abs(got - *cfg.expect_value) <= tol;
    c.tolerance_provenance = "pinned in config";
    rep.add_check(std::move(c));
}

void write_outputs(Report& rep, const std::string& out_dir,
                   const std::vector<std::pair<std::string, std::string>>& files,
                   double wall_seconds) {
    for (const auto& [name, content] : files) {
        std::string kind = name.size() > 4 && name.substr(name.size() - 4) == ".svg" ? "svg" : "csv";
        rep.artifacts.push_back({kind, name});
    }
    if (out_dir.empty()) return;
    for (const auto& [name, content] : files) write_text_file(out_dir + "/" + name, content);
    write_text_file(out_dir + "/report.json", rep.to_json());
    std::ostringstream timing;
    timing << "wall_seconds = " << wall_seconds << "\n";
    write_text_file(out_dir + "/timing.txt", timing.str());
}

}  // namespace

Report run_scenario(const ScenarioConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.threads > 0) set_thread_count(cfg.threads);

    Report rep;
    rep.analysis = cfg.analysis;
    rep.config_echo = cfg.echo;
    rep.seed = cfg.seed;
    std::vector<std::pair<std::string, std::string>> files;

    const std::uint64_t budget = cfg.budget ? cfg.budget : defaults::kBudgetDefault;

    if (cfg.analysis == "lelong") {
        Resolved r = resolve(cfg);
        if (!r.point) throw ParseError("lelong: needs 'point'");
        LelongEstimate est = lelong_at(r.f, *r.point, cfg.grid, budget, cfg.seed);
        rep.results["lelong"] = lelong_json(est);
        rep.results["point"] = point_json(*r.point);
        put_scalar(rep, "consensus", est.consensus);
        put_scalar(rep, "spread", est.spread);
        rep.total_samples = 3 * budget * cfg.grid.count;
        Check c;
        c.name = "consensus_nonnegative_within_spread";
        c.lhs = est.consensus;
        c.rhs = 0.0;
        c.slack = est.spread;
        c.passed = est.consensus >= -est.spread;
        c.tolerance_provenance = "LelongEstimate invariant: consensus >= -spread";
        rep.add_check(std::move(c));
        files.emplace_back("lelong_radii.csv", lelong_csv(est));
        PlotSpec sp = slope_plot(est);
        put_plot(rep, "slope", sp);
        files.emplace_back("slope.svg", render_svg(sp));
    } else if (cfg.analysis == "lelong-uniform") {
        Resolved r = resolve(cfg);
        if (!r.domain) throw ParseError("lelong-uniform: needs 'domain'");
        int fillers = cfg.center_budget ? cfg.center_budget : defaults::kUniformFillerCenters;
        std::uint64_t b = cfg.budget ? cfg.budget : 20000;
        UniformLelongResult res = lelong_uniform(r.f, *r.domain, fillers, cfg.grid, b, cfg.seed);
        rep.results["value"] = res.value;
        rep.results["argmax"] = point_json(res.argmax);
        rep.results["argmax_spread"] = res.argmax_spread;
        nlohmann::ordered_json table = nlohmann::ordered_json::array();
        for (const auto& row : res.table) {
            nlohmann::ordered_json tj;
            tj["center"] = point_json(row.center);
            tj["consensus"] = row.consensus;
            tj["spread"] = row.spread;
            tj["refused"] = row.refused;
            tj["singular_candidate"] = row.is_singular_candidate;
            table.push_back(tj);
        }
        rep.results["table"] = table;
        put_scalar(rep, "value", res.value);
        rep.total_samples = 3 * b * cfg.grid.count * res.table.size();
    } else if (cfg.analysis == "mo" || cfg.analysis == "uo") {
        Resolved r = resolve(cfg);
        if (!r.ball) throw ParseError(cfg.analysis + ": needs 'ball'");
        Estimate e = cfg.analysis == "mo" ? mo(r.f, *r.ball, budget, cfg.seed)
                                          : uo(r.f, *r.ball, budget, cfg.seed);
        rep.results[cfg.analysis] = estimate_json(e);
        put_scalar(rep, "value", e.value);
        rep.total_samples = e.budget;
    } else if (cfg.analysis == "bmo") {
        Resolved r = resolve(cfg);
        if (!r.domain) throw ParseError("bmo: needs 'domain'");
        std::vector<double> radii = cfg.radii;
        if (radii.empty()) {
            double r0 = 0.5 * r.domain->inradius_estimate();
            for (int i = 0; i < defaults::kBmoRadii; ++i, r0 *= 0.5) radii.push_back(r0);
        }
        int centers = cfg.center_budget ? cfg.center_budget : defaults::kOscCenters;
        std::uint64_t b = cfg.budget ? cfg.budget : 20000;
        BmoResult res = bmo_norm(r.f, *r.domain, centers, radii, b, cfg.seed);
        rep.results["bmo"] = estimate_json(res.value);
        rep.results["argmax_center"] = point_json(res.argmax_center);
        rep.results["argmax_radius"] = res.argmax_radius;
        rep.results["pairs_tested"] = res.pairs_tested;
        rep.results["lower_bound_flag"] = res.lower_bound_flag;
        put_scalar(rep, "value", res.value.value);
        rep.total_samples = 2 * b * res.pairs_tested;
    } else if (cfg.analysis == "vmo-profile") {
        Resolved r = resolve(cfg);
        if (!r.domain) throw ParseError("vmo-profile: needs 'domain'");
        std::vector<double> radii = cfg.radii;
        if (radii.empty()) radii = {1e-1, 1e-2, 1e-3, 1e-4};
        int centers = cfg.center_budget ? cfg.center_budget : defaults::kOscCenters;
        std::uint64_t b = cfg.budget ? cfg.budget : 20000;
        OscillationProfile prof = vmo_modulus(r.f, *r.domain, radii, centers, b, cfg.seed);
        rep.results["radii"] = prof.radii;
        rep.results["worst_mo"] = prof.worst_mo;
        rep.results["stderrs"] = prof.stderrs;
        nlohmann::ordered_json args = nlohmann::ordered_json::array();
        for (const auto& p : prof.argmax_centers) args.push_back(point_json(p));
        rep.results["argmax_centers"] = args;
        put_scalar(rep, "worst_mo_final", prof.worst_mo.back());
        put_scalar(rep, "worst_mo_max",
                   *std::max_element(prof.worst_mo.begin(), prof.worst_mo.end()));
        rep.total_samples = 2 * b * prof.table.size();
        files.emplace_back("vmo_profile.csv", profile_csv(prof));
        PlotSpec sp = vmo_plot(prof);
        put_plot(rep, "vmo", sp);
        files.emplace_back("vmo_profile.svg", render_svg(sp));
    } else if (cfg.analysis == "decomposition") {
        Resolved r = resolve(cfg);
        if (!r.ball) throw ParseError("decomposition: needs 'ball'");
        DecompositionReport d = decomposition_check(r.f, *r.ball, budget, cfg.seed);
        nlohmann::ordered_json dj;
        dj["n"] = d.n;
        dj["constant"] = d.constant;
        dj["mo"] = d.mo_value;
        dj["uo"] = d.uo_value;
        dj["i1"] = d.i1;
        dj["i2"] = d.i2;
        dj["rhs"] = d.rhs;
        dj["slack"] = d.slack;
        rep.results["decomposition"] = dj;
        put_scalar(rep, "mo", d.mo_value);
        rep.total_samples = 7 * budget;
        Check c;
        c.name = "mo_le_decomposition_rhs";
        c.lhs = d.mo_value;
        c.rhs = d.rhs;
        c.slack = d.slack;
        c.passed = d.pass;
        c.tolerance_provenance = "3*stderr + sampled-sup gaps";
        rep.add_check(std::move(c));
    } else if (cfg.analysis == "harnack") {
        Resolved r = resolve(cfg);
        if (!r.ball) throw ParseError("harnack: needs 'ball'");
        int probes = cfg.probes ? cfg.probes : 100;
        HarnackVerdict v = harnack_check(r.f, *r.ball, probes, budget, cfg.seed);
        rep.results["sup"] = v.sup_value;
        rep.results["sphere_mean"] = v.sphere_mean;
        int failures = 0;
        for (const auto& pc : v.probes) failures += pc.pass ? 0 : 1;
        rep.results["probes"] = v.probes.size();
        rep.results["failures"] = failures;
        put_scalar(rep, "failures", failures);
        rep.total_samples = 2 * budget + probes;
        Check c;
        c.name = "harnack_bound_all_probes";
        c.lhs = failures;
        c.rhs = 0.0;
        c.slack = 0.0;
        c.passed = v.pass;
        c.tolerance_provenance = "3*stderr per probe";
        rep.add_check(std::move(c));
    } else if (cfg.analysis == "barycenter") {
        Resolved r = resolve(cfg);
        if (!r.ball) throw ParseError("barycenter: needs 'ball'");
        BarycenterVerdict v = barycenter_check(r.f, *r.ball, budget, cfg.seed);
        rep.results["ball_mean"] = v.ball_mean;
        rep.results["shrunk_sphere_mean"] = v.shrunk_sphere_mean;
        put_scalar(rep, "gap", v.ball_mean - v.shrunk_sphere_mean);
        rep.total_samples = 2 * budget;
        Check c;
        c.name = "ball_mean_ge_shrunk_sphere_mean";
        c.lhs = v.ball_mean;
        c.rhs = v.shrunk_sphere_mean;
        c.slack = v.slack;
        c.passed = v.pass;
        c.tolerance_provenance = "3*stderr";
        rep.add_check(std::move(c));
    } else if (cfg.analysis == "iota") {
        Resolved r = resolve(cfg);
        if (!r.point) throw ParseError("iota: needs 'point'");
        double lo = cfg.window_lo > 0 ? cfg.window_lo : defaults::kIotaWindowLo;
        double hi = cfg.window_hi > 0 ? cfg.window_hi : defaults::kIotaWindowHi;
        double tol = cfg.tol > 0 ? cfg.tol : defaults::kIotaTolerance;
        int levels = cfg.levels ? cfg.levels : defaults::kAnnulusLevels;
        std::uint64_t b = cfg.budget ? cfg.budget : defaults::kAnnulusBudget;
        IotaResult res = integrability_index(r.f, *r.point, lo, hi, tol, levels, b, cfg.seed);
        rep.results["iota"] = res.iota;
        rep.results["tol"] = res.tol;
        rep.results["status"] =
            res.status == IotaResult::Status::Bracketed ? "bracketed" : "below-window";
        nlohmann::ordered_json probes = nlohmann::ordered_json::array();
        for (const auto& p : res.probes)
            probes.push_back({{"r", p.r}, {"outcome", outcome_name(p.outcome)}});
        rep.results["probes"] = probes;
        put_scalar(rep, "iota", res.iota);
        rep.total_samples = res.probes.size() * levels * b;
    } else if (cfg.analysis == "skoda") {
        Resolved r = resolve(cfg);
        if (!r.point) throw ParseError("skoda: needs 'point'");
        int levels = cfg.levels ? cfg.levels : defaults::kAnnulusLevels;
        std::uint64_t ab = defaults::kAnnulusBudget;
        SkodaReport s = skoda_report(r.f, *r.point, cfg.grid, budget, levels, ab, cfg.seed);
        nlohmann::ordered_json sj;
        sj["nu"] = s.nu;
        sj["nu_spread"] = s.nu_spread;
        sj["iota"] = s.iota;
        sj["iota_tol"] = s.iota_tol;
        sj["lower"] = s.lower;
        sj["upper"] = s.upper;
        sj["tight_end"] = s.tight == SkodaReport::TightEnd::Lower ? "lower" : "upper";
        rep.results["skoda"] = sj;
        put_scalar(rep, "nu", s.nu);
        put_scalar(rep, "iota", s.iota);
        rep.total_samples = 3 * budget * cfg.grid.count + 10 * levels * ab;
        Check c;
        c.name = "skoda_sandwich";
        c.lhs = s.iota;
        c.rhs = s.upper;
        c.slack = s.slack;
        c.passed = s.pass;
        c.tolerance_provenance = "0.05*max(1,nu) + propagated tolerances";
        c.note = std::string("tight end: ") +
                 (s.tight == SkodaReport::TightEnd::Lower ? "lower" : "upper");
        rep.add_check(std::move(c));
    } else if (cfg.analysis == "jn") {
        Resolved r = resolve(cfg);
        if (!r.ball) throw ParseError("jn: needs 'ball'");
        double lmax = cfg.lambda_max > 0 ? cfg.lambda_max : defaults::kJnLambdaMax;
        int steps = cfg.lambda_steps ? cfg.lambda_steps : defaults::kJnSteps;
        std::uint64_t b = cfg.budget ? cfg.budget : defaults::kJnBudget;
        JNProfile prof = jn_profile(r.f, *r.ball, lmax, steps, b, cfg.seed);
        rep.results["decay_rate"] = prof.decay_rate;
        rep.results["rate_stderr"] = prof.rate_se;
        rep.results["fit_range"] = {prof.fit_lo, prof.fit_hi};
        rep.results["exp_moment_at_half_rate"] = prof.exp_moment;
        put_scalar(rep, "rate", prof.decay_rate);
        rep.total_samples = 2 * b;
        files.emplace_back("jn_profile.csv", jn_csv(prof));
        PlotSpec sp = jn_plot(prof);
        put_plot(rep, "jn", sp);
        files.emplace_back("jn_profile.svg", render_svg(sp));
    } else if (cfg.analysis == "sobolev") {
        Resolved r = resolve(cfg);
        if (!r.ball) throw ParseError("sobolev: needs 'ball' (the region)");
        int levels = cfg.levels ? cfg.levels : defaults::kMaxAnnulusLevels;
        std::uint64_t b = cfg.budget ? cfg.budget : 10000;
        DivergenceVerdict v = sobolev_check(r.f, *r.ball, levels, b, cfg.seed);
        rep.results["sobolev"] = divergence_json(v);
        rep.total_samples = v.levels.size() * b;
        if (!cfg.expect_outcome.empty()) {
            Check c;
            c.name = "sobolev_outcome";
            c.passed = outcome_name(v.outcome) == cfg.expect_outcome;
            c.tolerance_provenance = "pinned in config";
            c.note = "expected " + cfg.expect_outcome + ", got " + outcome_name(v.outcome);
            rep.add_check(std::move(c));
        }
    } else if (cfg.analysis == "kappa") {
        EtaSpec eta = cfg.eta_kind == "power" ? EtaSpec::power(cfg.eta_alpha, cfg.eta_gamma)
                                              : EtaSpec::linear(cfg.eta_gamma > 0 ? cfg.eta_gamma : 1.0);
        std::vector<double> ts = cfg.kappa_t;
        if (ts.empty()) throw ParseError("kappa: needs 'kappa.t'");
        std::vector<double> vals;
        for (double t : ts) vals.push_back(kappa_transform(eta, t));
        rep.results["t"] = ts;
        rep.results["kappa"] = vals;
        put_scalar(rep, "kappa_last", vals.back());
        bool monotone = true;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i)
            if (ts[i] < ts[i + 1] && !(vals[i] < vals[i + 1])) monotone = false;
        Check c;
        c.name = "kappa_strictly_increasing";
        c.passed = monotone;
        c.tolerance_provenance = "exact closed form";
        rep.add_check(std::move(c));
    } else {
        throw ParseError("unknown analysis: " + cfg.analysis);
    }

    expect_checks(rep, cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(rep, cfg.out_dir, files, wall);
    return rep;
}

// ---------------------------------------------------------------------------
// Pinned reproduction cases
// ---------------------------------------------------------------------------

std::vector<std::string> reproduce_case_ids() {
    return {"example-5-1", "example-5-2", "skoda-extremes", "sobolev-sharpness",
            "decomposition-battery"};
}

namespace {

Report reproduce_example_5_1(std::uint64_t seed) {
    Report rep;
    rep.analysis = "reproduce";
    rep.seed = seed;

    const CatalogEntry& entry = catalog_entry("log_abs_shift");
    Domain cusp = Domain::cusp(2.0);

    // (i) the oscillation profile shrinks toward 0 on the cusp domain.
    std::vector<double> radii = {1e-1, 1e-2, 1e-3, 1e-4};
    OscillationProfile prof = vmo_modulus(entry.expr, cusp, radii, defaults::kOscCenters, 20000,
                                          mix_key(seed, 1));
    rep.results["radii"] = prof.radii;
    rep.results["worst_mo"] = prof.worst_mo;
    rep.results["stderrs"] = prof.stderrs;
    bool nonincreasing = true;
    for (std::size_t i = 0; i + 1 < prof.worst_mo.size(); ++i) {
        double slack = defaults::kSlackSigmas * (prof.stderrs[i] + prof.stderrs[i + 1]);
        if (prof.worst_mo[i + 1] > prof.worst_mo[i] + slack) nonincreasing = false;
    }
    rep.add_check({"vmo_profile_nonincreasing", nonincreasing, 0, 0, 0,
                   "3*stderr per adjacent pair", ""});
    rep.add_check({"vmo_profile_final_below_0.1", prof.worst_mo.back() < 0.1,
                   prof.worst_mo.back(), 0.1, 0.0, "pinned threshold", ""});

    // (ii) the boundary Lelong number at the cusp tip is 1.
    RadiusGrid grid;
    UniformLelongResult uni =
        lelong_uniform(entry.expr, cusp, 60, grid, 20000, mix_key(seed, 2));
    rep.results["lelong_uniform"] = uni.value;
    rep.results["lelong_argmax"] = point_json(uni.argmax);
    rep.add_check({"uniform_lelong_is_1", std::abs(uni.value - 1.0) <= 0.05, uni.value, 1.0, 0.05,
                   "pinned tolerance 0.05", ""});

    // (iii) no interior tangent ball exists at the tip down to 1e-6.
    std::vector<double> sphere_grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    InteriorSphereVerdict isc =
        interior_sphere_check(cusp, Point::make(1, {1.0, 0.0}), sphere_grid, mix_key(seed, 3));
    rep.results["interior_sphere_holds"] = isc.holds;
    rep.results["interior_sphere_fails_up_to"] = isc.fails_up_to;
    rep.add_check({"interior_sphere_fails_to_1e-6", !isc.holds && isc.fails_up_to == 1e-6,
                   isc.fails_up_to, 1e-6, 0.0, "grid floor", ""});
    return rep;
}

Report reproduce_example_5_2(std::uint64_t seed) {
    Report rep;
    rep.analysis = "reproduce";
    rep.seed = seed;
    RadiusGrid grid;
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const char* name : {"neginv_log", "neglogneg_log", "negpow_log"}) {
        const CatalogEntry& e = catalog_entry(name);
        LelongEstimate est = lelong_at(e.expr, e.distinguished, grid, defaults::kBudgetPerRadius,
                                       mix_key(seed, std::hash<std::string>{}(name)));
        table.push_back({{"name", name},
                         {"consensus", est.consensus},
                         {"raw_median", est.raw_median},
                         {"spread", est.spread}});
        rep.add_check({std::string(name) + "_zero_lelong", est.consensus <= 0.02, est.consensus,
                       0.02, 0.0, "pinned tolerance 0.02", ""});
    }
    rep.results["compositions"] = table;
    return rep;
}

Report reproduce_skoda_extremes(std::uint64_t seed) {
    Report rep;
    rep.analysis = "reproduce";
    rep.seed = seed;
    RadiusGrid grid;
    auto run_one = [&](const char* name, double expect_iota, SkodaReport::TightEnd end,
                       std::uint64_t s) {
        const CatalogEntry& e = catalog_entry(name);
        SkodaReport rep_s =
            skoda_report(e.expr, e.distinguished, grid, defaults::kBudgetPerRadius,
                         defaults::kAnnulusLevels, defaults::kAnnulusBudget, s);
        nlohmann::ordered_json sj;
        sj["name"] = name;
        sj["nu"] = rep_s.nu;
        sj["iota"] = rep_s.iota;
        sj["tight_end"] = rep_s.tight == SkodaReport::TightEnd::Lower ? "lower" : "upper";
        rep.add_check({std::string(name) + "_sandwich", rep_s.pass, rep_s.iota, rep_s.upper,
                       rep_s.slack, "0.05*max(1,nu) + tolerances", ""});
        rep.add_check({std::string(name) + "_iota", std::abs(rep_s.iota - expect_iota) <= 0.05,
                       rep_s.iota, expect_iota, 0.05, "pinned tolerance 0.05", ""});
        rep.add_check({std::string(name) + "_tight_end", rep_s.tight == end, 0, 0, 0,
                       "derived closed forms", ""});
        return sj;
    };
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    rows.push_back(run_one("norm_log_C2", 0.5, SkodaReport::TightEnd::Lower, mix_key(seed, 1)));
    rows.push_back(run_one("slice_log_C2", 1.0, SkodaReport::TightEnd::Upper, mix_key(seed, 2)));
    rep.results["extremes"] = rows;
    return rep;
}

Report reproduce_sobolev_sharpness(std::uint64_t seed) {
    Report rep;
    rep.analysis = "reproduce";
    rep.seed = seed;
    PshExpr psi = make_scale(2.0, make_log_abs_poly(Poly::univariate(2, 0, {{1, 0}, {0, 0}})));
    BallSpec certify(Point::zero(2), std::exp(-1.0));
    BallSpec region(Point::zero(2), 0.3);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    int idx = 0;
    for (double alpha : {0.30, 0.40, 0.45, 0.50}) {
        PshExpr f = compose_convex(ConvexChi::neg_pow_neg(alpha, 2.0), psi, certify);
        DivergenceVerdict v = sobolev_check(f, region, defaults::kMaxAnnulusLevels, 10000,
                                            mix_key(seed, ++idx));
        bool expect_finite = alpha < 0.5;
        rows.push_back({{"alpha", alpha}, {"outcome", outcome_name(v.outcome)}});
        char name[64];
        std::snprintf(name, sizeof name, "alpha_%.2f_%s", alpha,
                      expect_finite ? "finite" : "divergent");
        rep.add_check({name,
                       v.outcome == (expect_finite ? DivergenceOutcome::Finite
                                                   : DivergenceOutcome::Divergent),
                       v.growth_rate, 0, 0, "sharp exponent 1/2", v.rule});
    }
    rep.results["alpha_scan"] = rows;
    return rep;
}

Report reproduce_decomposition_battery(std::uint64_t seed) {
    Report rep;
    rep.analysis = "reproduce";
    rep.seed = seed;
    std::vector<const CatalogEntry*> dim1, dim2;
    for (const auto& e : catalog())
        (e.dim == 1 ? dim1 : dim2).push_back(&e);
    Rng rng(substream_key(seed, StreamTag::Misc));
    int failures = 0, total = 0;
    nlohmann::ordered_json failures_json = nlohmann::ordered_json::array();
    for (int i = 0; i < 100; ++i) {
        const auto& pool = (i % 2 == 0) ? dim1 : dim2;
        const CatalogEntry& e = *pool[rng.next_u64() % pool.size()];
        // A ball well inside the working region keeps f psh on a neighborhood.
        const BallSpec& wb = e.working_ball;
        Point c = draw_ball(rng, BallSpec(wb.center, 0.5 * wb.radius));
        double margin = wb.radius - c.dist(wb.center);
        double radius = (0.2 + 0.6 * rng.uniform01()) * 0.9 * margin;
        DecompositionReport d =
            decomposition_check(e.expr, BallSpec(c, radius), 10000, mix_key(seed, i));
        ++total;
        if (!d.pass) {
            ++failures;
            failures_json.push_back({{"entry", e.name},
                                     {"mo", d.mo_value},
                                     {"rhs", d.rhs},
                                     {"slack", d.slack}});
        }
    }
    rep.results["pairs"] = total;
    rep.results["failures"] = failures_json;
    rep.add_check({"decomposition_bound_zero_failures", failures == 0,
                   static_cast<double>(failures), 0, 0, "3*stderr + sup gaps per pair", ""});
    return rep;
}

}  // namespace

Report reproduce(const std::string& case_id, const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t seed = defaults::kDefaultSeed;
    Report rep;
    if (case_id == "example-5-1") rep = reproduce_example_5_1(seed);
    else if (case_id == "example-5-2") rep = reproduce_example_5_2(seed);
    else if (case_id == "skoda-extremes") rep = reproduce_skoda_extremes(seed);
    else if (case_id == "sobolev-sharpness") rep = reproduce_sobolev_sharpness(seed);
    else if (case_id == "decomposition-battery") rep = reproduce_decomposition_battery(seed);
    else throw ParseError("unknown reproduce case: " + case_id);
    rep.config_echo = "reproduce " + case_id;
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out_dir.empty()) {
        write_text_file(out_dir + "/report.json", rep.to_json());
        std::ostringstream timing;
        timing << "wall_seconds = " << wall << "\n";
        write_text_file(out_dir + "/timing.txt", timing.str());
    }
    return rep;
}

std::string plot_from_report(const Report& report, const std::string& artifact) {
    if (!report.results.contains("plots") || !report.results["plots"].contains(artifact)) {
        std::string have;
        if (report.results.contains("plots"))
            for (auto it = report.results["plots"].begin(); it != report.results["plots"].end();
                 ++it)
                have += (have.empty() ? "" : ", ") + it.key();
        throw ParseError("report has no plot '" + artifact + "' (available: " + have + ")");
    }
    return render_svg(plot_from_json(report.results["plots"][artifact]));
}

int exit_code_for(const Report& report) { return report.passed() ? 0 : 1; }

std::string catalog_listing() {
    std::ostringstream os;
    os << "name                      dim  nu      iota    expression\n";
    for (const auto& e : catalog()) {
        char line[256];
        auto opt = [](const std::optional<double>& v) {
            return v ? format_double(*v) : std::string("?");
        };
        std::snprintf(line, sizeof line, "%-25s %-4d %-7s %-7s %s\n", e.name.c_str(), e.dim,
                      opt(e.expected_nu).c_str(), opt(e.expected_iota).c_str(),
                      e.expr.print().c_str());
        os << line;
    }
    return os.str();
}

}  // namespace pshlab
