#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include "pshlab/errors.hpp"

namespace pshlab {

// Complex dimension is 1, 2 or 3 throughout; C^n is identified with R^{2n}.
constexpr int kMaxDim = 3;
constexpr int kMaxReal = 2 * kMaxDim;

struct Point {
    int n = 1;
    std::array<double, kMaxReal> x{};

    static Point zero(int n_) {
        check_dim(n_);
        Point p;
        p.n = n_;
        return p;
    }

    // coords = (Re z1, Im z1, Re z2, ...), length 2n.
    static Point make(int n_, std::initializer_list<double> coords) {
        check_dim(n_);
        if (static_cast<int>(coords.size()) != 2 * n_)
            throw DimensionError("point needs 2n coordinates");
        Point p;
        p.n = n_;
        int i = 0;
        for (double c : coords) p.x[i++] = c;
        return p;
    }

    static void check_dim(int n_) {
        if (n_ < 1 || n_ > kMaxDim) throw DimensionError("dimension must be 1, 2 or 3");
    }

    int reals() const { return 2 * n; }

    std::complex<double> z(int j) const { return {x[2 * j], x[2 * j + 1]}; }

    void set_z(int j, std::complex<double> w) {
        x[2 * j] = w.real();
        x[2 * j + 1] = w.imag();
    }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < 2 * n; ++i) s += x[i] * x[i];
        return s;
    }

    double norm() const { return std::sqrt(norm2()); }

    double dist(const Point& o) const {
        double s = 0;
        for (int i = 0; i < 2 * n; ++i) {
            double d = x[i] - o.x[i];
            s += d * d;
        }
        return std::sqrt(s);
    }
};

// Value of a psh function: a real or -infinity, never +infinity or NaN.
struct ExtReal {
    double v = 0.0;

    static ExtReal minus_inf() { return {-std::numeric_limits<double>::infinity()}; }

    static ExtReal finite(double d) {
        if (!std::isfinite(d)) throw Error("ExtReal: value must be finite or -inf");
        return {d};
    }

    static ExtReal of(double d) {
        if (std::isnan(d) || d == std::numeric_limits<double>::infinity())
            throw Error("ExtReal: +inf/NaN is not a psh value");
        return {d};
    }

    bool is_minus_inf() const { return v == -std::numeric_limits<double>::infinity(); }
    bool finite_value() const { return std::isfinite(v); }
};

struct BallSpec {
    Point center;
    double radius = 1.0;

    BallSpec() = default;
    BallSpec(Point c, double r) : center(c), radius(r) {
        if (!(r > 0)) throw Error("BallSpec: radius must be positive");
    }

    int dim() const { return center.n; }
};

// Monte Carlo estimate with its statistical error.
struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::uint64_t budget = 0;
    std::uint64_t seed = 0;
    bool converged = true;
    // For sampled suprema: the gap between the last two refinement rounds.
    // A sampled sup is a lower bound of the true sup; downstream inequality
    // checks widen their slack by this amount.
    double sup_gap = 0.0;
};

inline double ball_volume(int real_dim, double radius) {
    // Unit-ball volumes in R^2, R^4, R^6: pi, pi^2/2, pi^3/6.
    constexpr double kPi = 3.14159265358979323846264338327950288;
    double unit = 0;
    switch (real_dim) {
        case 2: unit = kPi; break;
        case 4: unit = kPi * kPi / 2.0; break;
        case 6: unit = kPi * kPi * kPi / 6.0; break;
        default: throw DimensionError("ball_volume: real dimension must be 2, 4 or 6");
    }
    return unit * std::pow(radius, real_dim);
}

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

}  // namespace pshlab
