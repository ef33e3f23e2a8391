#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pshlab/rng.hpp"
#include "pshlab/types.hpp"

namespace pshlab {

struct OutsideDomainError : DomainError {
    explicit OutsideDomainError(const std::string& m) : DomainError(m) {}
};
struct OnBoundaryError : DomainError {
    explicit OnBoundaryError(const std::string& m) : DomainError(m) {}
};

// Geometric regions: balls, polydisks, the Holder cusp domain of the
// one-variable counterexample, and inward-parallel (shrunk) sets.
class Domain {
  public:
    enum class Kind { Ball, Polydisk, Cusp, Shrunk };

    static Domain ball(Point center, double radius);
    static Domain polydisk(Point center, std::vector<double> radii);
    // { x + iy : 0 < x < 1, |y| < (1-x)^alpha }, alpha > 1, in C^1.
    static Domain cusp(double alpha);
    static Domain shrunk(Domain inner, double margin);

    Kind kind() const { return kind_; }
    int dim() const { return n_; }
    bool contains(const Point& z) const;  // open interior
    // Unsigned distance to the boundary, valid for any point of the ambient
    // space (used by boundary-membership tests).
    double boundary_distance(const Point& z) const;
    // Distance from an interior point to the boundary; throws
    // OnBoundaryError / OutsideDomainError otherwise. Exact for balls and
    // polydisks; the cusp minimizes over the three boundary arcs to 1e-12.
    double dist_to_boundary(const Point& z) const;

    Point anchor() const;  // a representative deep interior point
    void bounding_box(Point& lo, Point& hi) const;
    double inradius_estimate() const;

    Point sample_interior(Rng& rng) const;  // rejection from the bounding box
    Point sample_boundary(Rng& rng) const;

    std::string print() const;

    // kind-specific accessors
    const BallSpec& as_ball() const;
    double cusp_alpha() const;
    const Domain& shrunk_inner() const;
    double shrunk_margin() const;
    const std::vector<double>& polydisk_radii() const;
    const Point& center() const { return center_; }

  private:
    Kind kind_ = Kind::Ball;
    int n_ = 1;
    Point center_;                   // ball / polydisk center
    double radius_ = 1.0;            // ball
    std::vector<double> radii_;      // polydisk
    double alpha_ = 2.0;             // cusp
    double margin_ = 0.0;            // shrunk
    std::shared_ptr<const Domain> inner_;
    BallSpec ball_spec_;
};

struct InteriorSphereVerdict {
    bool holds = false;
    // When holds: a verified witness ball tangent to the boundary point.
    BallSpec witness{Point::zero(1), 1.0};
    double tested_radius = 0.0;
    // When !holds: no witness found at any tested radius down to this value.
    double fails_up_to = 0.0;
    double best_score = 0.0;  // max over candidates of dist(center) - r, for diagnostics
};

// Sampled search for a ball of radius r (from the decreasing grid) inside d
// whose closure contains boundary_point. A Holds verdict is certified by
// densely sampling the witness sphere; FailsUpTo is evidence, not proof.
InteriorSphereVerdict interior_sphere_check(const Domain& d, const Point& boundary_point,
                                            const std::vector<double>& radius_grid,
                                            std::uint64_t seed = 2027);

// I.i.d. uniform samples; pure functions of (spec, count, seed).
std::vector<Point> sample_ball(const BallSpec& b, std::size_t count, std::uint64_t seed);
std::vector<Point> sample_sphere(const BallSpec& b, std::size_t count, std::uint64_t seed);

// Single-draw primitives used by the estimators.
Point draw_ball(Rng& rng, const BallSpec& b);
Point draw_sphere(Rng& rng, const BallSpec& b);

}  // namespace pshlab
