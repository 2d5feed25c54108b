#pragma once
// Points of the round n-sphere, stereographic charts, and seeded sampling.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "horoconv/errors.hpp"
#include "horoconv/lorentz.hpp"

namespace horoconv {

struct SpherePoint {
    Vec coords; // unit vector in R^{n+1}
    int n;

    SpherePoint(Vec c, int n_) : coords(std::move(c)), n(n_) {
        require_sphere_dim(n);
        if (coords.size() != n + 1)
            throw spec_error("SpherePoint needs n+1 coordinates");
        if (std::abs(coords.squaredNorm() - 1.0) > 1e-12)
            throw spec_error("SpherePoint must have unit norm");
    }

    static SpherePoint normalized(const Vec& v, int n) {
        const double len = v.norm();
        if (!(len > 0.0)) throw spec_error("SpherePoint: cannot normalize zero vector");
        return SpherePoint(v / len, n);
    }

    SpherePoint antipode() const { return SpherePoint(-coords, n); }
};

/// Lift x in S^n to the null-cone slice {x0 = 1}: (1, x).
inline LorentzVector null_lift(const SpherePoint& x) {
    Vec v(x.n + 2);
    v[0] = 1.0;
    v.tail(x.n + 1) = x.coords;
    return LorentzVector(std::move(v), x.n);
}

// Stereographic chart of S^n minus a pole onto R^n. The chart origin maps
// to the antipode of the pole and the pullback of the round metric is
// (2/(1+|y|^2))^2 |dy|^2.
class StereoChart {
public:
    StereoChart(SpherePoint pole) : pole_(std::move(pole)), frame_(pole_.n + 1, pole_.n) {
        // Complete pole to an orthonormal basis; Householder QR is deterministic.
        const int d = pole_.n + 1;
        Mat a(d, d);
        a.col(0) = pole_.coords;
        a.block(0, 1, d, d - 1) = Mat::Identity(d, d).block(0, 0, d, d - 1);
        Eigen::HouseholderQR<Mat> qr(a);
        Mat q = qr.householderQ();
        // Column 0 of q is +-pole; keep the remaining columns as the tangent frame.
        if (q.col(0).dot(pole_.coords) < 0.0) q = -q;
        frame_ = q.rightCols(d - 1);
    }

    int n() const { return pole_.n; }
    const SpherePoint& pole() const { return pole_; }
    const Mat& frame() const { return frame_; }

    Vec to_chart(const SpherePoint& x) const {
        const double denom = 1.0 - x.coords.dot(pole_.coords);
        if (denom < 1e-14)
            throw domain_violation("to_chart: point coincides with the chart pole");
        return (frame_.transpose() * x.coords) / denom;
    }

    SpherePoint from_chart(const Vec& y) const {
        const double s = y.squaredNorm();
        Vec x = (2.0 * (frame_ * y) + (s - 1.0) * pole_.coords) / (1.0 + s);
        return SpherePoint::normalized(x, pole_.n);
    }

    /// Round-metric conformal factor 2/(1+|y|^2) at chart coordinate y.
    double conformal_factor(const Vec& y) const { return 2.0 / (1.0 + y.squaredNorm()); }

    /// Columns dF/dy_i of the chart inverse at y; each is tangent to S^n at F(y).
    Mat differential(const Vec& y) const {
        const int nn = pole_.n;
        const double w = 1.0 + y.squaredNorm();
        const Vec f = from_chart(y).coords;
        Mat d(nn + 1, nn);
        for (int i = 0; i < nn; ++i)
            d.col(i) = (2.0 / w) * (frame_.col(i) + y[i] * (pole_.coords - f));
        return d;
    }

    /// Second derivatives d2F/dy_i dy_j at y, from differentiating
    /// dF/dy_i = (2/w)(frame_i + y_i (pole - F)), w = 1 + |y|^2.
    Vec second_derivative(const Vec& y, int i, int j) const {
        const double w = 1.0 + y.squaredNorm();
        const Vec f = from_chart(y).coords;
        const Mat d = differential(y);
        Vec out = (-4.0 * y[j] / (w * w)) * (frame_.col(i) + y[i] * (pole_.coords - f));
        if (i == j) out += (2.0 / w) * (pole_.coords - f);
        out -= (2.0 / w) * y[i] * d.col(j);
        return out;
    }

private:
    SpherePoint pole_;
    Mat frame_;
};

/// Deterministic sampler of uniform points on S^n.
class SphereSampler {
public:
    explicit SphereSampler(uint64_t seed) : rng_(seed) {}

    SpherePoint next(int n) {
        Vec v(n + 1);
        for (int i = 0; i <= n; ++i) v[i] = normal_(rng_);
        return SpherePoint::normalized(v, n);
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * unit_(rng_);
    }

    /// Uniform point in the open ball of given radius in R^d.
    Vec ball(int d, double radius) {
        Vec v(d);
        for (;;) {
            for (int i = 0; i < d; ++i) v[i] = 2.0 * unit_(rng_) - 1.0;
            if (v.squaredNorm() < 1.0) return radius * v;
        }
    }

    Vec gaussian(int d, double scale) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = scale * normal_(rng_);
        return v;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

} // namespace horoconv
