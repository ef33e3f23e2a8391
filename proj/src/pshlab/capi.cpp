#include "pshlab/pshlab.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "pshlab/errors.hpp"
#include "pshlab/expr.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/grammar.hpp"
#include "pshlab/harness.hpp"
#include "pshlab/report.hpp"
#include "pshlab/rng.hpp"
#include "pshlab/svg.hpp"

struct pshlab_expr {
    pshlab::PshExpr impl;
};
struct pshlab_domain {
    pshlab::Domain impl;
};
struct pshlab_report {
    pshlab::Report impl;
};

namespace {

thread_local std::string t_last_error;

pshlab_status fail(pshlab_status code, const std::string& msg) {
    t_last_error = msg;
    return code;
}

// Translate the C++ error taxonomy at the ABI boundary.
template <typename Fn>
pshlab_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return PSHLAB_OK;
    } catch (const pshlab::ParseError& e) {
        return fail(PSHLAB_ERR_PARSE, e.what());
    } catch (const pshlab::DimensionError& e) {
        return fail(PSHLAB_ERR_DIMENSION, e.what());
    } catch (const pshlab::SingularPointError& e) {
        return fail(PSHLAB_ERR_SINGULAR, e.what());
    } catch (const pshlab::DomainError& e) {
        return fail(PSHLAB_ERR_DOMAIN, e.what());
    } catch (const pshlab::EstimationError& e) {
        return fail(PSHLAB_ERR_ESTIMATION, e.what());
    } catch (const pshlab::IoError& e) {
        return fail(PSHLAB_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(PSHLAB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PSHLAB_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

pshlab::Point point_from(const double* coords, size_t n_coords) {
    if (coords == nullptr || n_coords == 0 || n_coords % 2 != 0 ||
        n_coords > 2 * pshlab::kMaxDim)
        throw pshlab::DimensionError("coords must hold 2n doubles, n in {1,2,3}");
    pshlab::Point p = pshlab::Point::zero(static_cast<int>(n_coords / 2));
    for (size_t i = 0; i < n_coords; ++i) p.x[i] = coords[i];
    return p;
}

}  // namespace

extern "C" {

const char* pshlab_version(void) { return "0.1.0"; }

const char* pshlab_last_error(void) { return t_last_error.c_str(); }

void pshlab_string_free(char* s) { std::free(s); }

void pshlab_set_threads(int n) { pshlab::set_thread_count(n); }

pshlab_status pshlab_expr_parse(const char* text, pshlab_expr** out) {
    if (!text || !out) return fail(PSHLAB_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new pshlab_expr{pshlab::parse_expr(text)}; });
}

void pshlab_expr_free(pshlab_expr* e) { delete e; }

int pshlab_expr_dim(const pshlab_expr* e) { return e && e->impl.valid() ? e->impl.dim() : -1; }

pshlab_status pshlab_expr_print(const pshlab_expr* e, char** out) {
    if (!e || !out) return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(e->impl.print()); });
}

pshlab_status pshlab_expr_eval(const pshlab_expr* e, const double* coords, size_t n_coords,
                               double* value, int* minus_inf) {
    if (!e || !value || !minus_inf) return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] {
        pshlab::ExtReal v = e->impl.eval(point_from(coords, n_coords));
        *minus_inf = v.is_minus_inf() ? 1 : 0;
        *value = v.is_minus_inf() ? 0.0 : v.v;
    });
}

pshlab_status pshlab_expr_grad(const pshlab_expr* e, const double* coords, size_t n_coords,
                               double* grad) {
    if (!e || !grad) return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] {
        pshlab::GradResult g = e->impl.grad(point_from(coords, n_coords));
        for (size_t i = 0; i < n_coords; ++i) grad[i] = g.g[i];
    });
}

pshlab_status pshlab_domain_parse(const char* text, pshlab_domain** out) {
    if (!text || !out) return fail(PSHLAB_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new pshlab_domain{pshlab::parse_domain(text)}; });
}

void pshlab_domain_free(pshlab_domain* d) { delete d; }

int pshlab_domain_dim(const pshlab_domain* d) { return d ? d->impl.dim() : -1; }

pshlab_status pshlab_domain_contains(const pshlab_domain* d, const double* coords,
                                     size_t n_coords, int* inside) {
    if (!d || !inside) return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] { *inside = d->impl.contains(point_from(coords, n_coords)) ? 1 : 0; });
}

pshlab_status pshlab_domain_dist_to_boundary(const pshlab_domain* d, const double* coords,
                                             size_t n_coords, double* dist) {
    if (!d || !dist) return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] { *dist = d->impl.dist_to_boundary(point_from(coords, n_coords)); });
}

pshlab_status pshlab_run_config(const char* config_text, const char* out_dir,
                                pshlab_report** out) {
    if (!config_text || !out) return fail(PSHLAB_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        pshlab::ScenarioConfig cfg = pshlab::parse_config(config_text);
        if (out_dir && *out_dir) cfg.out_dir = out_dir;
        *out = new pshlab_report{pshlab::run_scenario(cfg)};
    });
}

pshlab_status pshlab_reproduce(const char* case_id, const char* out_dir, pshlab_report** out) {
    if (!case_id || !out) return fail(PSHLAB_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new pshlab_report{pshlab::reproduce(case_id, out_dir ? out_dir : "")};
    });
}

int pshlab_report_passed(const pshlab_report* r) { return r ? (r->impl.passed() ? 1 : 0) : -1; }

pshlab_status pshlab_report_json(const pshlab_report* r, char** out) {
    if (!r || !out) return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(r->impl.to_json()); });
}

void pshlab_report_free(pshlab_report* r) { delete r; }

pshlab_status pshlab_plot(const char* report_json_path, const char* artifact,
                          const char* out_svg_path) {
    if (!report_json_path || !artifact || !out_svg_path)
        return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] {
        pshlab::Report rep = pshlab::Report::from_json(pshlab::read_text_file(report_json_path));
        pshlab::write_text_file(out_svg_path, pshlab::plot_from_report(rep, artifact));
    });
}

pshlab_status pshlab_catalog_text(char** out) {
    if (!out) return fail(PSHLAB_ERR_INVALID, "null argument");
    return guarded([&] { *out = dup_string(pshlab::catalog_listing()); });
}

}  // extern "C"
