#include "pshlab/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "pshlab/rng.hpp"

namespace pshlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly::Poly(int n, std::vector<PolyTerm> terms) : n_(n) {
    Point::check_dim(n);
    for (auto& t : terms) {
        for (int j = n; j < kMaxDim; ++j)
            if (t.exp[j] != 0) throw DimensionError("polynomial exponent beyond dimension");
        if (t.coeff != std::complex<double>(0.0, 0.0)) terms_.push_back(t);
    }
    if (terms_.empty()) throw Error("zero polynomial: log|0| is identically -inf");
}

Poly Poly::univariate(int n, int var, const std::vector<std::complex<double>>& coeffs_desc) {
    if (var < 0 || var >= n) throw DimensionError("polynomial variable out of range");
    std::vector<PolyTerm> ts;
    int d = static_cast<int>(coeffs_desc.size()) - 1;
    for (int i = 0; i <= d; ++i) {
        PolyTerm t;
        t.coeff = coeffs_desc[i];
        t.exp[var] = static_cast<std::uint8_t>(d - i);
        ts.push_back(t);
    }
    return Poly(n, std::move(ts));
}

namespace {
std::complex<double> cpow_i(std::complex<double> z, int e) {
    std::complex<double> r{1.0, 0.0};
    while (e-- > 0) r *= z;
    return r;
}
}  // namespace

std::complex<double> Poly::eval(const Point& p) const {
    std::complex<double> s{0.0, 0.0};
    for (const auto& t : terms_) {
        std::complex<double> v = t.coeff;
        for (int j = 0; j < n_; ++j)
            if (t.exp[j]) v *= cpow_i(p.z(j), t.exp[j]);
        s += v;
    }
    return s;
}

std::complex<double> Poly::deriv_eval(int var, const Point& p) const {
    std::complex<double> s{0.0, 0.0};
    for (const auto& t : terms_) {
        if (!t.exp[var]) continue;
        std::complex<double> v = t.coeff * static_cast<double>(t.exp[var]);
        for (int j = 0; j < n_; ++j) {
            int e = t.exp[j] - (j == var ? 1 : 0);
            if (e) v *= cpow_i(p.z(j), e);
        }
        s += v;
    }
    return s;
}

std::optional<int> Poly::single_variable() const {
    int var = -1;
    for (const auto& t : terms_)
        for (int j = 0; j < n_; ++j)
            if (t.exp[j]) {
                if (var == -1) var = j;
                else if (var != j) return std::nullopt;
            }
    if (var == -1) return std::nullopt;  // constant
    return var;
}

std::vector<std::complex<double>> Poly::coeffs_desc(int var) const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.exp[var]));
    std::vector<std::complex<double>> cs(d + 1, {0.0, 0.0});
    for (const auto& t : terms_) cs[d - t.exp[var]] += t.coeff;
    return cs;
}

int Poly::degree() const {
    int d = 0;
    for (const auto& t : terms_) {
        int s = 0;
        for (int j = 0; j < n_; ++j) s += t.exp[j];
        d = std::max(d, s);
    }
    return d;
}

std::vector<std::complex<double>> poly_roots(const std::vector<std::complex<double>>& coeffs_desc) {
    // Strip leading zeros.
    std::size_t lead = 0;
    while (lead < coeffs_desc.size() && std::abs(coeffs_desc[lead]) == 0.0) ++lead;
    std::vector<std::complex<double>> c(coeffs_desc.begin() + lead, coeffs_desc.end());
    if (c.size() <= 1) return {};
    for (auto& ci : c) ci /= c[0];

    int d = static_cast<int>(c.size()) - 1;
    if (d == 1) return {-c[1]};

    double bound = 0.0;
    for (int i = 1; i <= d; ++i) bound = std::max(bound, std::abs(c[i]));
    bound = 1.0 + bound;

    // Durand-Kerner from the usual spiral start.
    std::vector<std::complex<double>> x(d);
    std::complex<double> seed{0.4, 0.9};
    std::complex<double> acc{1.0, 0.0};
    for (int k = 0; k < d; ++k) {
        acc *= seed;
        x[k] = bound * acc;
    }
    auto peval = [&](std::complex<double> z) {
        std::complex<double> s = c[0];
        for (int i = 1; i <= d; ++i) s = s * z + c[i];
        return s;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double step = 0.0;
        for (int k = 0; k < d; ++k) {
            std::complex<double> den{1.0, 0.0};
            for (int j = 0; j < d; ++j)
                if (j != k) den *= (x[k] - x[j]);
            if (std::abs(den) == 0.0) continue;
            std::complex<double> dx = peval(x[k]) / den;
            x[k] -= dx;
            step = std::max(step, std::abs(dx));
        }
        if (step < 1e-14 * bound) break;
    }

    // Merge clusters (multiple roots converge slowly but cluster tightly).
    std::vector<std::complex<double>> roots;
    std::vector<bool> used(d, false);
    for (int k = 0; k < d; ++k) {
        if (used[k]) continue;
        std::complex<double> sum = x[k];
        int count = 1;
        for (int j = k + 1; j < d; ++j) {
            if (!used[j] && std::abs(x[j] - x[k]) < 1e-6 * bound) {
                sum += x[j];
                used[j] = true;
                ++count;
            }
        }
        roots.push_back(sum / static_cast<double>(count));
    }
    return roots;
}

// ---------------------------------------------------------------------------
// ConvexChi
// ---------------------------------------------------------------------------

ConvexChi ConvexChi::neg_inverse(double gamma) {
    ConvexChi c;
    c.kind = ChiKind::NegInverse;
    c.gamma = gamma;
    c.validate();
    return c;
}

ConvexChi ConvexChi::neg_log_neg(double gamma) {
    ConvexChi c;
    c.kind = ChiKind::NegLogNeg;
    c.gamma = gamma;
    c.validate();
    return c;
}

ConvexChi ConvexChi::neg_pow_neg(double alpha, double gamma) {
    ConvexChi c;
    c.kind = ChiKind::NegPowNeg;
    c.alpha = alpha;
    c.gamma = gamma;
    c.validate();
    return c;
}

ConvexChi ConvexChi::iterated_t(int m, double gamma) {
    ConvexChi c;
    c.kind = ChiKind::IteratedT;
    c.m = m;
    c.gamma = gamma;
    c.validate();
    return c;
}

ConvexChi ConvexChi::affine(double a, double b) {
    ConvexChi c;
    c.kind = ChiKind::AffineIncreasing;
    c.a = a;
    c.b = b;
    c.gamma = 0.0;
    c.validate();
    return c;
}

namespace {
// t^{(m)} requires t^{(k)}(x) < 0 for all k < m; the bound is g_1 = 0,
// g_{k+1} = exp(g_k).
double iterated_t_min_gamma(int m) {
    double g = 0.0;
    for (int k = 1; k < m; ++k) g = std::exp(g);
    return g;
}
}  // namespace

void ConvexChi::validate() const {
    switch (kind) {
        case ChiKind::AffineIncreasing:
            if (a < 0) throw Error("chi: affine slope must be >= 0");
            return;
        case ChiKind::NegPowNeg:
            if (!(alpha > 0 && alpha < 1)) throw Error("chi: alpha must be in (0,1)");
            break;
        case ChiKind::IteratedT:
            if (m < 1) throw Error("chi: iterated t needs m >= 1");
            if (gamma < iterated_t_min_gamma(m))
                throw Error("chi: gamma too small for t^{(m)} to stay defined");
            break;
        default:
            break;
    }
    if (!(gamma > 0)) throw Error("chi: gamma must be positive");
}

bool ConvexChi::prime_at_minus_infinity_zero() const {
    return kind != ChiKind::AffineIncreasing;
}

double ConvexChi::operator()(double x) const {
    switch (kind) {
        case ChiKind::NegInverse: return -1.0 / x;
        case ChiKind::NegLogNeg: return -std::log(-x);
        case ChiKind::NegPowNeg: return -std::pow(-x, alpha);
        case ChiKind::IteratedT: {
            double v = x;
            for (int k = 0; k < m; ++k) v = -std::log(-v);
            return v;
        }
        case ChiKind::AffineIncreasing: return a * x + b;
    }
    return 0.0;
}

double ConvexChi::value_at_minus_inf() const {
    switch (kind) {
        case ChiKind::NegInverse: return 0.0;
        case ChiKind::AffineIncreasing: return a > 0 ? -kInf : b;
        default: return -kInf;
    }
}

double ConvexChi::deriv(double x) const {
    switch (kind) {
        case ChiKind::NegInverse: return 1.0 / (x * x);
        case ChiKind::NegLogNeg: return -1.0 / x;
        case ChiKind::NegPowNeg: return alpha * std::pow(-x, alpha - 1.0);
        case ChiKind::IteratedT: {
            // (t^m)'(x) = prod_k t'(t^k(x)), t'(u) = -1/u.
            double v = x, d = 1.0;
            for (int k = 0; k < m; ++k) {
                d *= -1.0 / v;
                v = -std::log(-v);
            }
            return d;
        }
        case ChiKind::AffineIncreasing: return a;
    }
    return 0.0;
}

std::string ConvexChi::print() const {
    std::ostringstream os;
    switch (kind) {
        case ChiKind::NegInverse: os << "neginv(" << format_double(gamma) << ")"; break;
        case ChiKind::NegLogNeg: os << "neglogneg(" << format_double(gamma) << ")"; break;
        case ChiKind::NegPowNeg:
            os << "negpow(" << format_double(alpha) << " " << format_double(gamma) << ")";
            break;
        case ChiKind::IteratedT: os << "itert(" << m << " " << format_double(gamma) << ")"; break;
        case ChiKind::AffineIncreasing:
            os << "affine(" << format_double(a) << " " << format_double(b) << ")";
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// SingularSet
// ---------------------------------------------------------------------------

bool SingularComponent::contains(const Point& p, double tol) const {
    for (const auto& c : constraints) {
        double best = kInf;
        for (const auto& v : c.values) best = std::min(best, std::abs(p.z(c.var) - v));
        if (!(best <= tol)) return false;
    }
    for (const auto& q : opaque)
        if (!(std::abs(q.eval(p)) <= tol)) return false;
    return true;
}

double SingularComponent::distance(const Point& p) const {
    if (has_opaque()) return kInf;
    double s = 0.0;
    for (const auto& c : constraints) {
        double best = kInf;
        for (const auto& v : c.values) best = std::min(best, std::abs(p.z(c.var) - v));
        s += best * best;
    }
    return std::sqrt(s);
}

bool SingularSet::contains(const Point& p, double tol) const {
    for (const auto& c : components)
        if (c.contains(p, tol)) return true;
    return false;
}

double SingularSet::distance(const Point& p) const {
    double best = kInf;
    for (const auto& c : components) best = std::min(best, c.distance(p));
    return best;
}

std::vector<Point> SingularSet::candidate_points(int n, const Point& anchor, std::size_t cap) const {
    std::vector<Point> out;
    auto push = [&](const Point& p) {
        for (const auto& q : out)
            if (q.dist(p) < 1e-12) return;
        if (out.size() < cap) out.push_back(p);
    };
    for (const auto& comp : components) {
        if (comp.has_opaque() || comp.constraints.empty()) continue;
        // Cartesian product of the per-variable value sets.
        std::vector<std::size_t> idx(comp.constraints.size(), 0);
        for (;;) {
            Point p = anchor;
            p.n = n;
            for (std::size_t i = 0; i < comp.constraints.size(); ++i)
                p.set_z(comp.constraints[i].var, comp.constraints[i].values[idx[i]]);
            push(p);
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == comp.constraints[i].values.size()) {
                idx[i] = 0;
                ++i;
            }
            if (i == idx.size()) break;
        }
    }
    return out;
}

SingularSet SingularSet::union_of(const SingularSet& a, const SingularSet& b) {
    SingularSet s = a;
    s.components.insert(s.components.end(), b.components.begin(), b.components.end());
    return s;
}

SingularSet SingularSet::intersection_of(const SingularSet& a, const SingularSet& b) {
    constexpr double kMatchTol = 1e-9;
    SingularSet s;
    for (const auto& ca : a.components) {
        for (const auto& cb : b.components) {
            SingularComponent m = ca;
            bool impossible = false;
            for (const auto& c : cb.constraints) {
                auto it = std::find_if(m.constraints.begin(), m.constraints.end(),
                                       [&](const VarConstraint& v) { return v.var == c.var; });
                if (it == m.constraints.end()) {
                    m.constraints.push_back(c);
                    continue;
                }
                std::vector<std::complex<double>> common;
                for (const auto& v : it->values)
                    for (const auto& w : c.values)
                        if (std::abs(v - w) <= kMatchTol) common.push_back((v + w) / 2.0);
                if (common.empty()) {
                    impossible = true;
                    break;
                }
                it->values = std::move(common);
            }
            if (impossible) continue;
            m.opaque.insert(m.opaque.end(), cb.opaque.begin(), cb.opaque.end());
            if (s.components.size() < 64) s.components.push_back(std::move(m));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Expression nodes
// ---------------------------------------------------------------------------

namespace {

class ConstNode final : public ExprNode {
  public:
    ConstNode(int n, double k) : n_(n), k_(k) {
        Point::check_dim(n);
        if (!std::isfinite(k)) throw Error("const: value must be finite");
    }
    int dim() const override { return n_; }
    double eval_raw(const Point&) const override { return k_; }
    void grad_raw(const Point&, double*, GradResult&) const override {}
    SingularSet singular_set() const override { return {}; }
    bool structural_zero_lelong() const override { return true; }
    void print(std::ostream& os) const override {
        os << "const(" << n_ << " " << format_double(k_) << ")";
    }

  private:
    int n_;
    double k_;
};

void print_poly(std::ostream& os, const Poly& p) {
    auto sv = p.single_variable();
    bool real_coeffs = true;
    for (const auto& t : p.terms())
        if (t.coeff.imag() != 0.0) real_coeffs = false;
    if (p.dim() == 1 && real_coeffs) {
        os << "poly";
        for (const auto& c : p.coeffs_desc(0)) os << " " << format_double(c.real());
    } else if (sv || p.degree() == 0) {
        int var = sv ? *sv : 0;
        os << "polyv " << p.dim() << " " << var;
        for (const auto& c : p.coeffs_desc(var))
            os << " " << format_double(c.real()) << " " << format_double(c.imag());
    } else {
        os << "polyn " << p.dim() << " " << p.terms().size();
        for (const auto& t : p.terms()) {
            os << " " << format_double(t.coeff.real()) << " " << format_double(t.coeff.imag());
            for (int j = 0; j < p.dim(); ++j) os << " " << static_cast<int>(t.exp[j]);
        }
    }
}

class LogAbsPolyNode final : public ExprNode {
  public:
    explicit LogAbsPolyNode(Poly p) : p_(std::move(p)) {}
    int dim() const override { return p_.dim(); }
    double eval_raw(const Point& z) const override {
        double m = std::abs(p_.eval(z));
        return m == 0.0 ? -kInf : std::log(m);
    }
    void grad_raw(const Point& z, double* g, GradResult&) const override {
        std::complex<double> pv = p_.eval(z);
        for (int j = 0; j < p_.dim(); ++j) {
            std::complex<double> w = p_.deriv_eval(j, z) / pv;
            g[2 * j] += w.real();
            g[2 * j + 1] += -w.imag();
        }
    }
    SingularSet singular_set() const override {
        SingularSet s;
        if (p_.degree() == 0) return s;  // nonzero constant
        SingularComponent comp;
        if (auto var = p_.single_variable()) {
            VarConstraint vc;
            vc.var = *var;
            vc.values = poly_roots(p_.coeffs_desc(*var));
            if (vc.values.empty()) return s;
            comp.constraints.push_back(std::move(vc));
        } else {
            comp.opaque.push_back(p_);
        }
        s.components.push_back(std::move(comp));
        return s;
    }
    bool structural_zero_lelong() const override { return p_.degree() == 0; }
    void print(std::ostream& os) const override {
        os << "logabs(";
        print_poly(os, p_);
        os << ")";
    }
    const Poly& poly() const { return p_; }

  private:
    Poly p_;
};

class LogNormNode final : public ExprNode {
  public:
    LogNormNode(Point center, std::vector<int> coords, std::vector<double> weights)
        : c_(center), coords_(std::move(coords)), w_(std::move(weights)) {
        if (coords_.empty()) throw Error("lognorm: needs at least one coordinate");
        for (int j : coords_)
            if (j < 0 || j >= c_.n) throw DimensionError("lognorm: coordinate out of range");
        if (w_.empty()) w_.assign(coords_.size(), 1.0);
        if (w_.size() != coords_.size()) throw Error("lognorm: weight count mismatch");
        for (double w : w_)
            if (!(w > 0)) throw Error("lognorm: weights must be positive");
    }
    int dim() const override { return c_.n; }
    double eval_raw(const Point& z) const override {
        double q = quad(z);
        return q == 0.0 ? -kInf : 0.5 * std::log(q);
    }
    void grad_raw(const Point& z, double* g, GradResult&) const override {
        double q = quad(z);
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            int j = coords_[i];
            double w2 = w_[i] * w_[i];
            g[2 * j] += w2 * (z.x[2 * j] - c_.x[2 * j]) / q;
            g[2 * j + 1] += w2 * (z.x[2 * j + 1] - c_.x[2 * j + 1]) / q;
        }
    }
    SingularSet singular_set() const override {
        SingularSet s;
        SingularComponent comp;
        for (int j : coords_) {
            VarConstraint vc;
            vc.var = j;
            vc.values = {c_.z(j)};
            comp.constraints.push_back(std::move(vc));
        }
        s.components.push_back(std::move(comp));
        return s;
    }
    bool structural_zero_lelong() const override { return false; }
    void print(std::ostream& os) const override {
        os << "lognorm(" << c_.n;
        for (int i = 0; i < c_.reals(); ++i) os << " " << format_double(c_.x[i]);
        os << " sel";
        for (int j : coords_) os << " " << j;
        bool unit = std::all_of(w_.begin(), w_.end(), [](double w) { return w == 1.0; });
        if (!unit) {
            os << " w";
            for (double w : w_) os << " " << format_double(w);
        }
        os << ")";
    }

  private:
    double quad(const Point& z) const {
        double q = 0.0;
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            int j = coords_[i];
            double dx = z.x[2 * j] - c_.x[2 * j];
            double dy = z.x[2 * j + 1] - c_.x[2 * j + 1];
            q += w_[i] * w_[i] * (dx * dx + dy * dy);
        }
        return q;
    }

    Point c_;
    std::vector<int> coords_;
    std::vector<double> w_;
};

class SumNode final : public ExprNode {
  public:
    SumNode(std::vector<double> weights, std::vector<NodePtr> children)
        : w_(std::move(weights)), ch_(std::move(children)) {
        if (ch_.empty() || ch_.size() != w_.size()) throw Error("sum: weight/child mismatch");
        for (double w : w_)
            if (!(w >= 0)) throw Error("sum: weights must be nonnegative");
        for (const auto& c : ch_)
            if (c->dim() != ch_[0]->dim()) throw DimensionError("sum: mixed dimensions");
    }
    int dim() const override { return ch_[0]->dim(); }
    double eval_raw(const Point& z) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < ch_.size(); ++i) {
            if (w_[i] == 0.0) continue;
            double v = ch_[i]->eval_raw(z);
            if (v == -kInf) return -kInf;
            s += w_[i] * v;
        }
        return s;
    }
    void grad_raw(const Point& z, double* g, GradResult& flags) const override {
        double tmp[kMaxReal];
        for (std::size_t i = 0; i < ch_.size(); ++i) {
            if (w_[i] == 0.0) continue;
            std::fill(tmp, tmp + kMaxReal, 0.0);
            ch_[i]->grad_raw(z, tmp, flags);
            for (int k = 0; k < 2 * dim(); ++k) g[k] += w_[i] * tmp[k];
        }
    }
    SingularSet singular_set() const override {
        SingularSet s;
        for (std::size_t i = 0; i < ch_.size(); ++i)
            if (w_[i] > 0.0) s = SingularSet::union_of(s, ch_[i]->singular_set());
        return s;
    }
    bool structural_zero_lelong() const override {
        for (std::size_t i = 0; i < ch_.size(); ++i)
            if (w_[i] > 0.0 && !ch_[i]->structural_zero_lelong()) return false;
        return true;
    }
    void print(std::ostream& os) const override {
        os << "sum(";
        for (std::size_t i = 0; i < ch_.size(); ++i) {
            if (i) os << " ";
            os << format_double(w_[i]) << " ";
            ch_[i]->print(os);
        }
        os << ")";
    }

  private:
    std::vector<double> w_;
    std::vector<NodePtr> ch_;
};

class MaxNode final : public ExprNode {
  public:
    explicit MaxNode(std::vector<NodePtr> children) : ch_(std::move(children)) {
        if (ch_.empty()) throw Error("max: needs at least one child");
        for (const auto& c : ch_)
            if (c->dim() != ch_[0]->dim()) throw DimensionError("max: mixed dimensions");
    }
    int dim() const override { return ch_[0]->dim(); }
    double eval_raw(const Point& z) const override {
        double m = -kInf;
        for (const auto& c : ch_) m = std::max(m, c->eval_raw(z));
        return m;
    }
    void grad_raw(const Point& z, double* g, GradResult& flags) const override {
        // Gradient of the achieving branch; ties break to the first branch
        // and are flagged nonsmooth.
        double best = -kInf;
        std::size_t arg = 0;
        int ties = 0;
        for (std::size_t i = 0; i < ch_.size(); ++i) {
            double v = ch_[i]->eval_raw(z);
            if (v > best) {
                best = v;
                arg = i;
                ties = 1;
            } else if (v == best) {
                ++ties;
            }
        }
        if (ties > 1) flags.nonsmooth = true;
        ch_[arg]->grad_raw(z, g, flags);
    }
    SingularSet singular_set() const override {
        SingularSet s = ch_[0]->singular_set();
        for (std::size_t i = 1; i < ch_.size(); ++i)
            s = SingularSet::intersection_of(s, ch_[i]->singular_set());
        return s;
    }
    bool structural_zero_lelong() const override {
        // nu_max = min over branches, so one zero branch forces zero.
        for (const auto& c : ch_)
            if (c->structural_zero_lelong()) return true;
        return false;
    }
    void print(std::ostream& os) const override {
        os << "max(";
        for (std::size_t i = 0; i < ch_.size(); ++i) {
            if (i) os << " ";
            ch_[i]->print(os);
        }
        os << ")";
    }

  private:
    std::vector<NodePtr> ch_;
};

class ScaleNode final : public ExprNode {
  public:
    ScaleNode(double c, NodePtr child) : c_(c), ch_(std::move(child)) {
        if (!(c > 0)) throw Error("scale: factor must be positive");
    }
    int dim() const override { return ch_->dim(); }
    double eval_raw(const Point& z) const override {
        double v = ch_->eval_raw(z);
        return v == -kInf ? -kInf : c_ * v;
    }
    void grad_raw(const Point& z, double* g, GradResult& flags) const override {
        double tmp[kMaxReal] = {0};
        ch_->grad_raw(z, tmp, flags);
        for (int k = 0; k < 2 * dim(); ++k) g[k] += c_ * tmp[k];
    }
    SingularSet singular_set() const override { return ch_->singular_set(); }
    bool structural_zero_lelong() const override { return ch_->structural_zero_lelong(); }
    void print(std::ostream& os) const override {
        os << "scale(" << format_double(c_) << " ";
        ch_->print(os);
        os << ")";
    }

  private:
    double c_;
    NodePtr ch_;
};

class AddConstNode final : public ExprNode {
  public:
    AddConstNode(double k, NodePtr child) : k_(k), ch_(std::move(child)) {
        if (!std::isfinite(k)) throw Error("addconst: offset must be finite");
    }
    int dim() const override { return ch_->dim(); }
    double eval_raw(const Point& z) const override {
        double v = ch_->eval_raw(z);
        return v == -kInf ? -kInf : v + k_;
    }
    void grad_raw(const Point& z, double* g, GradResult& flags) const override {
        ch_->grad_raw(z, g, flags);
    }
    SingularSet singular_set() const override { return ch_->singular_set(); }
    bool structural_zero_lelong() const override { return ch_->structural_zero_lelong(); }
    void print(std::ostream& os) const override {
        os << "addconst(" << format_double(k_) << " ";
        ch_->print(os);
        os << ")";
    }

  private:
    double k_;
    NodePtr ch_;
};

class ComposeNode final : public ExprNode {
  public:
    ComposeNode(ConvexChi chi, NodePtr child) : chi_(chi), ch_(std::move(child)) {
        chi_.validate();
    }
    int dim() const override { return ch_->dim(); }
    double eval_raw(const Point& z) const override {
        double v = ch_->eval_raw(z);
        if (v == -kInf) return chi_.value_at_minus_inf();
        if (chi_.kind != ChiKind::AffineIncreasing && v >= -chi_.gamma)
            throw DomainError("composition evaluated where child >= -gamma (child = " +
                              format_double(v) + ", gamma = " + format_double(chi_.gamma) + ")");
        return chi_(v);
    }
    void grad_raw(const Point& z, double* g, GradResult& flags) const override {
        double v = ch_->eval_raw(z);
        if (v == -kInf)
            throw SingularPointError("gradient of a composition at a pole of the child");
        if (chi_.kind != ChiKind::AffineIncreasing && v >= -chi_.gamma)
            throw DomainError("composition gradient where child >= -gamma");
        double tmp[kMaxReal] = {0};
        ch_->grad_raw(z, tmp, flags);
        double d = chi_.deriv(v);
        for (int k = 0; k < 2 * dim(); ++k) g[k] += d * tmp[k];
    }
    SingularSet singular_set() const override {
        return chi_.value_at_minus_inf() == -kInf ? ch_->singular_set() : SingularSet{};
    }
    bool structural_zero_lelong() const override {
        return chi_.prime_at_minus_infinity_zero() || ch_->structural_zero_lelong();
    }
    void print(std::ostream& os) const override {
        os << "compose(" << chi_.print() << " ";
        ch_->print(os);
        os << ")";
    }
    const ConvexChi& chi() const { return chi_; }

  private:
    ConvexChi chi_;
    NodePtr ch_;
};

}  // namespace

// ---------------------------------------------------------------------------
// PshExpr
// ---------------------------------------------------------------------------

PshExpr::PshExpr(NodePtr root) : root_(std::move(root)) {
    singular_ = std::make_shared<SingularSet>(root_->singular_set());
}

int PshExpr::dim() const {
    if (!root_) throw Error("empty expression");
    return root_->dim();
}

ExtReal PshExpr::eval(const Point& p) const {
    if (p.n != dim()) throw DimensionError("eval: point dimension does not match expression");
    return ExtReal::of(root_->eval_raw(p));
}

GradResult PshExpr::grad(const Point& p) const {
    if (p.n != dim()) throw DimensionError("grad: point dimension does not match expression");
    double v = root_->eval_raw(p);
    if (v == -kInf) throw SingularPointError("gradient requested on the singular set");
    GradResult r;
    r.n = dim();
    if (root_->has_analytic_grad()) {
        root_->grad_raw(p, r.g.data(), r);
    } else {
        r = finite_difference_grad(*this, p);
    }
    return r;
}

const SingularSet& PshExpr::singular() const {
    if (!singular_) throw Error("empty expression");
    return *singular_;
}

bool PshExpr::structural_zero_lelong() const { return root_->structural_zero_lelong(); }

std::string PshExpr::print() const {
    std::ostringstream os;
    root_->print(os);
    return os.str();
}

PshExpr make_const(int n, double k) { return PshExpr(std::make_shared<ConstNode>(n, k)); }

PshExpr make_log_abs_poly(Poly p) { return PshExpr(std::make_shared<LogAbsPolyNode>(std::move(p))); }

PshExpr make_log_norm(Point center, std::vector<int> coords, std::vector<double> weights) {
    return PshExpr(std::make_shared<LogNormNode>(center, std::move(coords), std::move(weights)));
}

namespace {

// Combination nodes inherit the tightest certified region of the children;
// the ball centered at the smallest region, shrunk to fit inside the others.
std::optional<BallSpec> combined_region(const std::vector<PshExpr>& children) {
    std::optional<BallSpec> out;
    for (const auto& c : children) {
        if (!c.certified_region) continue;
        if (!out || c.certified_region->radius < out->radius) out = c.certified_region;
    }
    if (!out) return out;
    double r = out->radius;
    for (const auto& c : children) {
        if (!c.certified_region) continue;
        r = std::min(r, c.certified_region->radius - out->center.dist(c.certified_region->center));
    }
    if (r > 0) out->radius = r;
    return out;
}

}  // namespace

PshExpr make_sum(std::vector<double> weights, std::vector<PshExpr> children) {
    std::vector<NodePtr> nodes;
    nodes.reserve(children.size());
    for (auto& c : children) nodes.push_back(c.root());
    auto region = combined_region(children);
    PshExpr e(std::make_shared<SumNode>(std::move(weights), std::move(nodes)));
    e.certified_region = region;
    return e;
}

PshExpr make_max(std::vector<PshExpr> children) {
    std::vector<NodePtr> nodes;
    nodes.reserve(children.size());
    for (auto& c : children) nodes.push_back(c.root());
    auto region = combined_region(children);
    PshExpr e(std::make_shared<MaxNode>(std::move(nodes)));
    e.certified_region = region;
    return e;
}

PshExpr make_scale(double c, PshExpr child) {
    PshExpr e(std::make_shared<ScaleNode>(c, child.root()));
    e.certified_region = child.certified_region;
    return e;
}

PshExpr make_add_const(double k, PshExpr child) {
    PshExpr e(std::make_shared<AddConstNode>(k, child.root()));
    e.certified_region = child.certified_region;
    return e;
}

PshExpr compose_convex_unchecked(const ConvexChi& chi, const PshExpr& f) {
    PshExpr e(std::make_shared<ComposeNode>(chi, f.root()));
    e.certified_region = f.certified_region;
    return e;
}

PshExpr compose_convex(const ConvexChi& chi, const PshExpr& f, const BallSpec& certify,
                       std::uint64_t samples, std::uint64_t seed) {
    chi.validate();
    if (certify.dim() != f.dim())
        throw DimensionError("compose_convex: certificate ball dimension mismatch");
    if (f.certified_region) {
        const auto& inner = *f.certified_region;
        if (certify.center.dist(inner.center) + certify.radius > inner.radius + 1e-12)
            throw DomainError("compose_convex: certificate ball exceeds the child's certified region");
    }
    if (chi.kind != ChiKind::AffineIncreasing) {
        Rng rng(substream_key(seed, StreamTag::Witness));
        const int d = 2 * certify.dim();
        for (std::uint64_t s = 0; s < samples; ++s) {
            Point p = certify.center;
            double dir[kMaxReal], nrm = 0.0;
            for (int i = 0; i < d; ++i) {
                dir[i] = rng.normal();
                nrm += dir[i] * dir[i];
            }
            nrm = std::sqrt(nrm);
            double r = certify.radius * std::pow(rng.uniform01(), 1.0 / d);
            for (int i = 0; i < d; ++i) p.x[i] += r * dir[i] / nrm;
            double v = f.root()->eval_raw(p);
            if (!(v < -chi.gamma))
                throw DomainError("compose_convex: sampled child value " + format_double(v) +
                                  " violates the bound < -" + format_double(chi.gamma));
        }
    }
    PshExpr e(std::make_shared<ComposeNode>(chi, f.root()));
    e.certified_region = certify;
    return e;
}

GradResult finite_difference_grad(const PshExpr& f, const Point& p) {
    GradResult r;
    r.n = p.n;
    r.finite_difference = true;
    double h = 1e-6 * std::max(1.0, p.norm());
    for (int i = 0; i < 2 * p.n; ++i) {
        Point a = p, b = p;
        a.x[i] += h;
        b.x[i] -= h;
        double va = f.root()->eval_raw(a);
        double vb = f.root()->eval_raw(b);
        if (va == -kInf || vb == -kInf)
            throw SingularPointError("finite differences stepped onto the singular set");
        r.g[i] = (va - vb) / (2.0 * h);
    }
    return r;
}

}  // namespace pshlab
