#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pshlab/types.hpp"

namespace pshlab {

// ---------------------------------------------------------------------------
// Complex polynomials (atoms of the expression algebra)
// ---------------------------------------------------------------------------

struct PolyTerm {
    std::complex<double> coeff;
    std::array<std::uint8_t, kMaxDim> exp{};  // per-variable exponent
};

class Poly {
  public:
    Poly(int n, std::vector<PolyTerm> terms);

    // p(z_var) with real or complex coefficients, descending degree.
    static Poly univariate(int n, int var, const std::vector<std::complex<double>>& coeffs_desc);

    int dim() const { return n_; }
    const std::vector<PolyTerm>& terms() const { return terms_; }
    std::complex<double> eval(const Point& p) const;
    std::complex<double> deriv_eval(int var, const Point& p) const;  // dp/dz_var at p

    // Variable index if the polynomial involves exactly one variable.
    std::optional<int> single_variable() const;
    // Dense descending coefficients in that variable (requires single_variable()).
    std::vector<std::complex<double>> coeffs_desc(int var) const;
    int degree() const;

  private:
    int n_;
    std::vector<PolyTerm> terms_;
};

// Roots of a univariate complex polynomial (Durand-Kerner with clustering of
// near-multiple roots). Degree 0 has no roots.
std::vector<std::complex<double>> poly_roots(const std::vector<std::complex<double>>& coeffs_desc);

// ---------------------------------------------------------------------------
// Convex increasing reparametrizations chi (section-5 compositions)
// ---------------------------------------------------------------------------

enum class ChiKind { NegInverse, NegLogNeg, NegPowNeg, IteratedT, AffineIncreasing };

struct ConvexChi {
    ChiKind kind = ChiKind::NegLogNeg;
    double alpha = 0.5;  // NegPowNeg, in (0,1)
    int m = 1;           // IteratedT iterations
    double a = 1.0;      // Affine slope (>= 0)
    double b = 0.0;      // Affine offset
    double gamma = 1.0;  // child values must stay < -gamma

    static ConvexChi neg_inverse(double gamma = 1.0);
    static ConvexChi neg_log_neg(double gamma = 1.0);
    static ConvexChi neg_pow_neg(double alpha, double gamma = 1.0);
    static ConvexChi iterated_t(int m, double gamma);
    static ConvexChi affine(double a, double b);

    // True exactly for the kinds with chi'(-inf) = 0; composing such a chi
    // kills every Lelong number of the child.
    bool prime_at_minus_infinity_zero() const;

    double operator()(double x) const;    // requires x < -gamma
    double value_at_minus_inf() const;    // limit of chi at -inf
    double deriv(double x) const;         // chi'(x), x < -gamma
    void validate() const;
    std::string print() const;
};

// ---------------------------------------------------------------------------
// Symbolic singular sets (preimages of -inf)
// ---------------------------------------------------------------------------

// A component is a conjunction of per-variable membership constraints
// z_j in {values}; zero sets that do not factor per variable are kept as
// opaque polynomials (membership test only).
struct VarConstraint {
    int var = 0;
    std::vector<std::complex<double>> values;
};

struct SingularComponent {
    std::vector<VarConstraint> constraints;
    std::vector<Poly> opaque;

    bool has_opaque() const { return !opaque.empty(); }
    bool contains(const Point& p, double tol) const;
    // Euclidean distance to the constrained set; +inf when opaque parts make
    // it unrepresentable.
    double distance(const Point& p) const;
};

struct SingularSet {
    std::vector<SingularComponent> components;

    bool empty() const { return components.empty(); }
    bool contains(const Point& p, double tol = 0.0) const;
    double distance(const Point& p) const;  // min over components, +inf if empty

    // Finite candidate locations inside/near the anchor's neighborhood: the
    // fully-constrained combinations, with free coordinates taken from the
    // anchor. Used to seed Lelong-number searches.
    std::vector<Point> candidate_points(int n, const Point& anchor, std::size_t cap = 64) const;

    static SingularSet union_of(const SingularSet& a, const SingularSet& b);
    static SingularSet intersection_of(const SingularSet& a, const SingularSet& b);
};

// ---------------------------------------------------------------------------
// Expression tree
// ---------------------------------------------------------------------------

struct GradResult {
    int n = 1;
    std::array<double, kMaxReal> g{};
    bool nonsmooth = false;          // landed on a Max tie set
    bool finite_difference = false;  // numeric fallback used somewhere
};

class ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

class ExprNode {
  public:
    virtual ~ExprNode() = default;
    virtual int dim() const = 0;
    // May return -inf; never +inf/NaN. Throws DomainError if a composition is
    // evaluated outside its certified range.
    virtual double eval_raw(const Point& p) const = 0;
    // Accumulate the analytic gradient; pre: eval_raw(p) finite.
    virtual void grad_raw(const Point& p, double* g, GradResult& flags) const = 0;
    virtual bool has_analytic_grad() const { return true; }
    virtual SingularSet singular_set() const = 0;
    // True when the tree structure forces nu == 0 everywhere (bounded-below
    // parts, compositions with chi'(-inf) = 0, and their positive combinations).
    virtual bool structural_zero_lelong() const = 0;
    virtual void print(std::ostream& os) const = 0;
};

class PshExpr {
  public:
    PshExpr() = default;
    explicit PshExpr(NodePtr root);

    bool valid() const { return root_ != nullptr; }
    int dim() const;
    ExtReal eval(const Point& p) const;
    GradResult grad(const Point& p) const;
    const SingularSet& singular() const;
    bool structural_zero_lelong() const;
    std::string print() const;
    const NodePtr& root() const { return root_; }

    // Region on which the expression is certified (compositions record the
    // ball on which the child bound f < -gamma was checked). Empty means the
    // whole ambient space.
    std::optional<BallSpec> certified_region;

  private:
    NodePtr root_;
    std::shared_ptr<SingularSet> singular_;  // computed once at construction
};

// --- constructors -----------------------------------------------------------

PshExpr make_const(int n, double k);
PshExpr make_log_abs_poly(Poly p);
// log ||diag(w) (z - c)|| over the selected complex coordinates; w defaults to 1.
PshExpr make_log_norm(Point center, std::vector<int> coords, std::vector<double> weights = {});
PshExpr make_sum(std::vector<double> weights, std::vector<PshExpr> children);
PshExpr make_max(std::vector<PshExpr> children);
PshExpr make_scale(double c, PshExpr child);
PshExpr make_add_const(double k, PshExpr child);

// Composition with a certified bound sup f < -gamma on `certify`: the bound is
// checked by sampling (failure on any violation), and the certificate region
// is attached to the result.
PshExpr compose_convex(const ConvexChi& chi, const PshExpr& f, const BallSpec& certify,
                       std::uint64_t samples = 4096, std::uint64_t seed = 17);
// Unchecked variant for callers that certify the bound themselves.
PshExpr compose_convex_unchecked(const ConvexChi& chi, const PshExpr& f);

// Central finite differences with fixed relative step h = 1e-6 * max(1, |z|).
GradResult finite_difference_grad(const PshExpr& f, const Point& p);

}  // namespace pshlab
