#include "pshlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pshlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryTol = 1e-10;  // absolute; all boundaries are closed-form

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
    constexpr double inv_phi = 0.6180339887498948482;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// Distance from (px, py) to the upper cusp arc y = (1-s)^alpha, s in [0,1]:
// coarse scan for a bracket, then golden-section to absolute tolerance 1e-12.
double cusp_arc_distance(double px, double py, double alpha) {
    auto h = [&](double s) {
        double dy = py - std::pow(1.0 - s, alpha);
        double dx = px - s;
        return dx * dx + dy * dy;
    };
    constexpr int kScan = 256;
    double best_s = 0.0, best = kInf;
    for (int i = 0; i <= kScan; ++i) {
        double s = static_cast<double>(i) / kScan;
        double v = h(s);
        if (v < best) {
            best = v;
            best_s = s;
        }
    }
    double lo = std::max(0.0, best_s - 1.5 / kScan);
    double hi = std::min(1.0, best_s + 1.5 / kScan);
    double s = golden_min(h, lo, hi, 1e-12);
    return std::sqrt(std::min({h(s), h(lo), h(hi)}));
}
}  // namespace

Domain Domain::ball(Point center, double radius) {
    Domain d;
    d.kind_ = Kind::Ball;
    d.n_ = center.n;
    d.center_ = center;
    d.radius_ = radius;
    d.ball_spec_ = BallSpec(center, radius);
    return d;
}

Domain Domain::polydisk(Point center, std::vector<double> radii) {
    if (static_cast<int>(radii.size()) != center.n)
        throw DimensionError("polydisk: one radius per complex coordinate");
    for (double r : radii)
        if (!(r > 0)) throw Error("polydisk: radii must be positive");
    Domain d;
    d.kind_ = Kind::Polydisk;
    d.n_ = center.n;
    d.center_ = center;
    d.radii_ = std::move(radii);
    return d;
}

Domain Domain::cusp(double alpha) {
    if (!(alpha > 1)) throw Error("cusp domain requires alpha > 1");
    Domain d;
    d.kind_ = Kind::Cusp;
    d.n_ = 1;
    d.alpha_ = alpha;
    d.center_ = Point::make(1, {0.3, 0.0});
    return d;
}

Domain Domain::shrunk(Domain inner, double margin) {
    if (!(margin > 0)) throw Error("shrunk: margin must be positive");
    if (!(margin < inner.inradius_estimate()))
        throw Error("shrunk: margin must be smaller than the inner inradius");
    Domain d;
    d.kind_ = Kind::Shrunk;
    d.n_ = inner.dim();
    d.margin_ = margin;
    d.center_ = inner.anchor();
    d.inner_ = std::make_shared<Domain>(std::move(inner));
    return d;
}

bool Domain::contains(const Point& z) const {
    if (z.n != n_) throw DimensionError("domain membership: dimension mismatch");
    switch (kind_) {
        case Kind::Ball: return z.dist(center_) < radius_;
        case Kind::Polydisk:
            for (int j = 0; j < n_; ++j)
                if (!(std::abs(z.z(j) - center_.z(j)) < radii_[j])) return false;
            return true;
        case Kind::Cusp: {
            double x = z.x[0], y = z.x[1];
            return x > 0 && x < 1 && std::abs(y) < std::pow(1.0 - x, alpha_);
        }
        case Kind::Shrunk:
            return inner_->contains(z) && inner_->boundary_distance(z) > margin_;
    }
    return false;
}

double Domain::boundary_distance(const Point& z) const {
    if (z.n != n_) throw DimensionError("boundary_distance: dimension mismatch");
    switch (kind_) {
        case Kind::Ball: return std::abs(radius_ - z.dist(center_));
        case Kind::Polydisk: {
            if (contains(z)) {
                double m = kInf;
                for (int j = 0; j < n_; ++j)
                    m = std::min(m, radii_[j] - std::abs(z.z(j) - center_.z(j)));
                return m;
            }
            double s = 0.0;
            bool outside_somewhere = false;
            double closest_face = kInf;
            for (int j = 0; j < n_; ++j) {
                double excess = std::abs(z.z(j) - center_.z(j)) - radii_[j];
                if (excess > 0) {
                    s += excess * excess;
                    outside_somewhere = true;
                } else {
                    closest_face = std::min(closest_face, -excess);
                }
            }
            return outside_somewhere ? std::sqrt(s) : closest_face;
        }
        case Kind::Cusp: {
            double x = z.x[0], y = std::abs(z.x[1]);
            double seg;  // distance to the segment {0} x [-1, 1]
            if (y <= 1.0)
                seg = std::abs(x);
            else
                seg = std::hypot(x, y - 1.0);
            double arc = cusp_arc_distance(x, y, alpha_);  // by symmetry covers both arcs
            return std::min(seg, arc);
        }
        case Kind::Shrunk: {
            double bd = inner_->boundary_distance(z);
            double signed_dist = inner_->contains(z) ? bd : -bd;
            return std::abs(signed_dist - margin_);
        }
    }
    return 0.0;
}

double Domain::dist_to_boundary(const Point& z) const {
    if (!contains(z)) {
        if (boundary_distance(z) <= kBoundaryTol)
            throw OnBoundaryError("point lies on the domain boundary");
        throw OutsideDomainError("point lies outside the domain");
    }
    return boundary_distance(z);
}

Point Domain::anchor() const {
    switch (kind_) {
        case Kind::Ball:
        case Kind::Polydisk: return center_;
        case Kind::Cusp: return Point::make(1, {0.3, 0.0});
        case Kind::Shrunk: return inner_->anchor();
    }
    return center_;
}

void Domain::bounding_box(Point& lo, Point& hi) const {
    lo = Point::zero(n_);
    hi = Point::zero(n_);
    switch (kind_) {
        case Kind::Ball:
            for (int i = 0; i < 2 * n_; ++i) {
                lo.x[i] = center_.x[i] - radius_;
                hi.x[i] = center_.x[i] + radius_;
            }
            break;
        case Kind::Polydisk:
            for (int j = 0; j < n_; ++j) {
                lo.x[2 * j] = center_.x[2 * j] - radii_[j];
                hi.x[2 * j] = center_.x[2 * j] + radii_[j];
                lo.x[2 * j + 1] = center_.x[2 * j + 1] - radii_[j];
                hi.x[2 * j + 1] = center_.x[2 * j + 1] + radii_[j];
            }
            break;
        case Kind::Cusp:
            lo.x[0] = 0.0;
            hi.x[0] = 1.0;
            lo.x[1] = -1.0;
            hi.x[1] = 1.0;
            break;
        case Kind::Shrunk: inner_->bounding_box(lo, hi); break;
    }
}

double Domain::inradius_estimate() const {
    switch (kind_) {
        case Kind::Ball: return radius_;
        case Kind::Polydisk: return *std::min_element(radii_.begin(), radii_.end());
        case Kind::Cusp: {
            // Coarse scan of the real axis; the cusp is symmetric in y and the
            // deepest point sits on y = 0.
            double best = 0.0;
            for (int i = 1; i < 200; ++i) {
                Point p = Point::make(1, {i / 200.0, 0.0});
                if (contains(p)) best = std::max(best, boundary_distance(p));
            }
            return best;
        }
        case Kind::Shrunk: return inner_->inradius_estimate() - margin_;
    }
    return 0.0;
}

Point Domain::sample_interior(Rng& rng) const {
    Point lo, hi;
    bounding_box(lo, hi);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Point p = Point::zero(n_);
        for (int i = 0; i < 2 * n_; ++i) p.x[i] = rng.uniform(lo.x[i], hi.x[i]);
        if (contains(p)) return p;
    }
    throw EstimationError("interior rejection sampling failed (degenerate domain?)");
}

Point Domain::sample_boundary(Rng& rng) const {
    switch (kind_) {
        case Kind::Ball: return draw_sphere(rng, BallSpec(center_, radius_));
        case Kind::Polydisk: {
            int face = static_cast<int>(rng.next_u64() % n_);
            Point p = center_;
            for (int j = 0; j < n_; ++j) {
                double a = rng.uniform(0.0, 6.283185307179586476925286766559);
                double r = (j == face) ? radii_[j] : radii_[j] * std::sqrt(rng.uniform01());
                p.x[2 * j] += r * std::cos(a);
                p.x[2 * j + 1] += r * std::sin(a);
            }
            return p;
        }
        case Kind::Cusp: {
            // Arcs weighted by rough length: the segment has length 2, each
            // cusp curve roughly 1 + alpha/4.
            double curve_len = 1.0 + alpha_ / 4.0;
            double total = 2.0 + 2.0 * curve_len;
            double u = rng.uniform(0.0, total);
            if (u < 2.0) return Point::make(1, {0.0, u - 1.0});
            double s = rng.uniform01();
            double y = std::pow(1.0 - s, alpha_);
            return Point::make(1, {s, u < 2.0 + curve_len ? y : -y});
        }
        case Kind::Shrunk: {
            if (inner_->kind() == Kind::Ball)
                return draw_sphere(rng, BallSpec(inner_->center(), inner_->radius_ - margin_));
            if (inner_->kind() == Kind::Polydisk) {
                std::vector<double> shrunk_radii = inner_->radii_;
                for (double& r : shrunk_radii) r -= margin_;
                return Domain::polydisk(inner_->center(), shrunk_radii).sample_boundary(rng);
            }
            throw Error("sample_boundary: unsupported shrunk inner domain");
        }
    }
    throw Error("sample_boundary: unreachable");
}

std::string Domain::print() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Ball:
            os << "ball(";
            for (int i = 0; i < 2 * n_; ++i) os << format_double(center_.x[i]) << " ";
            os << format_double(radius_) << ")";
            break;
        case Kind::Polydisk:
            os << "polydisk(";
            for (int i = 0; i < 2 * n_; ++i) os << format_double(center_.x[i]) << " ";
            for (int j = 0; j < n_; ++j) os << format_double(radii_[j]) << (j + 1 < n_ ? " " : "");
            os << ")";
            break;
        case Kind::Cusp: os << "cusp(" << format_double(alpha_) << ")"; break;
        case Kind::Shrunk:
            os << "shrunk(" << inner_->print() << " " << format_double(margin_) << ")";
            break;
    }
    return os.str();
}

const BallSpec& Domain::as_ball() const {
    if (kind_ != Kind::Ball) throw Error("domain is not a ball");
    return ball_spec_;
}

double Domain::cusp_alpha() const {
    if (kind_ != Kind::Cusp) throw Error("domain is not a cusp");
    return alpha_;
}

const Domain& Domain::shrunk_inner() const {
    if (kind_ != Kind::Shrunk) throw Error("domain is not shrunk");
    return *inner_;
}

double Domain::shrunk_margin() const {
    if (kind_ != Kind::Shrunk) throw Error("domain is not shrunk");
    return margin_;
}

const std::vector<double>& Domain::polydisk_radii() const {
    if (kind_ != Kind::Polydisk) throw Error("domain is not a polydisk");
    return radii_;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

Point draw_sphere(Rng& rng, const BallSpec& b) {
    const int d = 2 * b.dim();
    for (;;) {
        double dir[kMaxReal];
        double nrm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            dir[i] = rng.normal();
            nrm2 += dir[i] * dir[i];
        }
        if (nrm2 < 1e-300) continue;
        double inv = b.radius / std::sqrt(nrm2);
        Point p = b.center;
        for (int i = 0; i < d; ++i) p.x[i] += dir[i] * inv;
        return p;
    }
}

Point draw_ball(Rng& rng, const BallSpec& b) {
    const int d = 2 * b.dim();
    Point p = draw_sphere(rng, BallSpec(b.center, 1.0));
    double r = b.radius * std::pow(rng.uniform01(), 1.0 / d);
    for (int i = 0; i < d; ++i) p.x[i] = b.center.x[i] + (p.x[i] - b.center.x[i]) * r;
    return p;
}

std::vector<Point> sample_ball(const BallSpec& b, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw Error("sample_ball: count must be >= 1");
    Rng rng(substream_key(seed, StreamTag::BallMean));
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(draw_ball(rng, b));
    return out;
}

std::vector<Point> sample_sphere(const BallSpec& b, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw Error("sample_sphere: count must be >= 1");
    Rng rng(substream_key(seed, StreamTag::SphereMean));
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(draw_sphere(rng, b));
    return out;
}

// ---------------------------------------------------------------------------
// Interior sphere condition
// ---------------------------------------------------------------------------

namespace {

double signed_boundary_dist(const Domain& d, const Point& p) {
    double bd = d.boundary_distance(p);
    return d.contains(p) ? bd : -bd;
}

// Uniform direction in R^{2n}.
void draw_direction(Rng& rng, int reals, double* dir) {
    for (;;) {
        double nrm2 = 0.0;
        for (int i = 0; i < reals; ++i) {
            dir[i] = rng.normal();
            nrm2 += dir[i] * dir[i];
        }
        if (nrm2 < 1e-300) continue;
        double inv = 1.0 / std::sqrt(nrm2);
        for (int i = 0; i < reals; ++i) dir[i] *= inv;
        return;
    }
}

}  // namespace

InteriorSphereVerdict interior_sphere_check(const Domain& d, const Point& boundary_point,
                                            const std::vector<double>& radius_grid,
                                            std::uint64_t seed) {
    if (d.boundary_distance(boundary_point) > kBoundaryTol)
        throw DomainError("interior_sphere_check: point is not on the boundary (distance " +
                          format_double(d.boundary_distance(boundary_point)) + ")");
    if (radius_grid.empty()) throw Error("interior_sphere_check: empty radius grid");

    const int reals = 2 * d.dim();
    Rng rng(substream_key(seed, StreamTag::Probes));

    // Rough inward direction from shallow probes.
    double inward[kMaxReal] = {0};
    {
        double best = -kInf;
        for (double eps : {1e-4, 1e-6, 1e-8}) {
            for (int k = 0; k < 128; ++k) {
                double dir[kMaxReal];
                draw_direction(rng, reals, dir);
                Point p = boundary_point;
                for (int i = 0; i < reals; ++i) p.x[i] += eps * dir[i];
                double s = signed_boundary_dist(d, p);
                if (s > best) {
                    best = s;
                    std::copy(dir, dir + reals, inward);
                }
            }
            if (best > 0) break;
        }
    }

    InteriorSphereVerdict verdict;
    verdict.best_score = -kInf;

    auto center_at = [&](const double* dir, double r) {
        Point c = boundary_point;
        for (int i = 0; i < reals; ++i) c.x[i] += r * dir[i];
        return c;
    };

    for (double r : radius_grid) {
        verdict.tested_radius = r;
        double best_dir[kMaxReal];
        std::copy(inward, inward + reals, best_dir);
        double best = signed_boundary_dist(d, center_at(best_dir, r)) - r;

        // Coarse pass over the inward half-sphere, then shrinking cones.
        for (int k = 0; k < 1000; ++k) {
            double dir[kMaxReal];
            draw_direction(rng, reals, dir);
            double dot = 0.0;
            for (int i = 0; i < reals; ++i) dot += dir[i] * inward[i];
            if (dot < 0)
                for (int i = 0; i < reals; ++i) dir[i] = -dir[i];
            double s = signed_boundary_dist(d, center_at(dir, r)) - r;
            if (s > best) {
                best = s;
                std::copy(dir, dir + reals, best_dir);
            }
        }
        double cone = 0.4;
        for (int round = 0; round < 4; ++round, cone *= 0.25) {
            for (int k = 0; k < 200; ++k) {
                double dir[kMaxReal];
                draw_direction(rng, reals, dir);
                double cand[kMaxReal], nrm2 = 0.0;
                for (int i = 0; i < reals; ++i) {
                    cand[i] = best_dir[i] + cone * dir[i];
                    nrm2 += cand[i] * cand[i];
                }
                double inv = 1.0 / std::sqrt(nrm2);
                for (int i = 0; i < reals; ++i) cand[i] *= inv;
                double s = signed_boundary_dist(d, center_at(cand, r)) - r;
                if (s > best) {
                    best = s;
                    std::copy(cand, cand + reals, best_dir);
                }
            }
        }
        verdict.best_score = std::max(verdict.best_score, best);

        if (best >= -1e-6 * r) {
            // Candidate witness: shrink to the achieved clearance and certify
            // by dense sampling of the witness sphere.
            Point c = center_at(best_dir, r);
            double wr = std::min(r, signed_boundary_dist(d, c));
            if (wr <= 0) continue;
            BallSpec witness(c, wr);
            Rng wrng(substream_key(seed, StreamTag::Witness));
            bool certified = true;
            for (int k = 0; k < 10000 && certified; ++k) {
                Point p = draw_sphere(wrng, witness);
                if (d.contains(p)) continue;
                bool near_tangency = p.dist(boundary_point) <= 1e-6 * std::max(1.0, r);
                if (!near_tangency && d.boundary_distance(p) > 1e-9) certified = false;
            }
            if (certified) {
                verdict.holds = true;
                verdict.witness = witness;
                return verdict;
            }
        }
    }
    verdict.holds = false;
    verdict.fails_up_to = radius_grid.back();
    return verdict;
}

}  // namespace pshlab
