#pragma once
// Linear algebra of the (n+2)-dimensional Lorentz-Minkowski space with
// signature (-,+,...,+), its hyperquadrics (hyperbolic space, de Sitter
// space, positive null cone) and the time-orientation preserving isometry
// group O+(1,n+1).

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "horoconv/errors.hpp"

namespace horoconv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline void require_sphere_dim(int n) {
    if (n < 3) throw spec_error("ambient sphere dimension must satisfy n >= 3, got n=" + std::to_string(n));
}

/// Point of L^{n+2}; coords = (x0, x1, ..., x_{n+1}) with x0 timelike.
struct LorentzVector {
    Vec coords;
    int n; // sphere dimension; coords.size() == n + 2

    LorentzVector(Vec c, int n_) : coords(std::move(c)), n(n_) {
        require_sphere_dim(n);
        if (coords.size() != n + 2)
            throw spec_error("LorentzVector needs n+2 coordinates");
        if (!coords.allFinite())
            throw spec_error("LorentzVector coordinates must be finite");
    }
};

/// <a,b> = -a0*b0 + sum_i ai*bi.
inline double minkowski_inner(const LorentzVector& a, const LorentzVector& b) {
    if (a.n != b.n) throw spec_error("minkowski_inner: dimension mismatch");
    return -a.coords[0] * b.coords[0] + a.coords.tail(a.n + 1).dot(b.coords.tail(b.n + 1));
}

/// Raw variant on plain coordinate vectors of size n+2.
inline double minkowski_inner(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw spec_error("minkowski_inner: dimension mismatch");
    return -a[0] * b[0] + a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
}

inline Mat minkowski_metric(int n) {
    Vec d = Vec::Ones(n + 2);
    d[0] = -1.0;
    return d.asDiagonal();
}

enum class HyperquadricTag { Hyperbolic, DeSitter, NullConePlus, None };

struct HyperquadricClass {
    HyperquadricTag tag;
    double tolerance;
};

inline const char* to_string(HyperquadricTag t) {
    switch (t) {
        case HyperquadricTag::Hyperbolic: return "Hyperbolic";
        case HyperquadricTag::DeSitter: return "DeSitter";
        case HyperquadricTag::NullConePlus: return "NullConePlus";
        default: return "None";
    }
}

/// Tags v by the hyperquadric it lies on, within absolute tolerance tol.
inline HyperquadricClass classify(const LorentzVector& v, double tol = 1e-9) {
    if (tol <= 0.0) throw spec_error("classify: tolerance must be positive");
    const double q = minkowski_inner(v, v);
    HyperquadricTag tag = HyperquadricTag::None;
    if (std::abs(q + 1.0) <= tol && v.coords[0] > 0.0)
        tag = HyperquadricTag::Hyperbolic;
    else if (std::abs(q - 1.0) <= tol)
        tag = HyperquadricTag::DeSitter;
    else if (std::abs(q) <= tol && v.coords[0] > 0.0)
        tag = HyperquadricTag::NullConePlus;
    return {tag, tol};
}

/// Matrix M with M^T J M = J and M00 > 0 (future null cone preserved).
struct LorentzIsometry {
    Mat matrix;
    int n;

    static constexpr double kGroupTol = 1e-12;

    LorentzIsometry(Mat m, int n_) : matrix(std::move(m)), n(n_) {
        require_sphere_dim(n);
        if (matrix.rows() != n + 2 || matrix.cols() != n + 2)
            throw spec_error("LorentzIsometry matrix must be (n+2)x(n+2)");
    }

    static LorentzIsometry identity(int n) {
        return LorentzIsometry(Mat::Identity(n + 2, n + 2), n);
    }

    /// Rotation by `angle` in the spatial plane of ambient axes i,j (1-based, in 1..n+1).
    static LorentzIsometry rotation(int axis_i, int axis_j, double angle, int n) {
        require_sphere_dim(n);
        if (axis_i < 1 || axis_i > n + 1 || axis_j < 1 || axis_j > n + 1 || axis_i == axis_j)
            throw spec_error("rotation: invalid spatial axis pair");
        Mat m = Mat::Identity(n + 2, n + 2);
        const double c = std::cos(angle), s = std::sin(angle);
        m(axis_i, axis_i) = c;
        m(axis_j, axis_j) = c;
        m(axis_i, axis_j) = -s;
        m(axis_j, axis_i) = s;
        return LorentzIsometry(std::move(m), n);
    }

    /// Boost of given rapidity in the (x0, x_axis) plane; axis in 1..n+1.
    static LorentzIsometry boost(int axis, double rapidity, int n) {
        require_sphere_dim(n);
        if (axis < 1 || axis > n + 1)
            throw spec_error("boost: invalid spatial axis");
        Mat m = Mat::Identity(n + 2, n + 2);
        const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
        m(0, 0) = ch;
        m(axis, axis) = ch;
        m(0, axis) = sh;
        m(axis, 0) = sh;
        return LorentzIsometry(std::move(m), n);
    }

    LorentzIsometry operator*(const LorentzIsometry& other) const {
        if (n != other.n) throw spec_error("isometry composition: dimension mismatch");
        return LorentzIsometry(matrix * other.matrix, n);
    }

    // J M^T J inverts any element of O(1,n+1).
    LorentzIsometry inverse() const {
        const Mat j = minkowski_metric(n);
        return LorentzIsometry(j * matrix.transpose() * j, n);
    }

    double group_residual() const {
        const Mat j = minkowski_metric(n);
        return (matrix.transpose() * j * matrix - j).cwiseAbs().maxCoeff();
    }

    bool time_orientation_preserving() const { return matrix(0, 0) > 0.0; }

    bool valid(double tol = kGroupTol) const {
        return group_residual() <= tol && time_orientation_preserving();
    }
};

inline LorentzVector apply_isometry(const LorentzIsometry& t, const LorentzVector& v) {
    if (t.n != v.n) throw spec_error("apply_isometry: dimension mismatch");
    return LorentzVector(t.matrix * v.coords, v.n);
}

/// Chart of H^{n+1} onto the open unit ball: p -> (x1,...,x_{n+1})/(1+x0).
inline Vec poincare_projection(const LorentzVector& p, double tol = 1e-9) {
    if (classify(p, tol).tag != HyperquadricTag::Hyperbolic)
        throw domain_violation("poincare_projection: input is not on the hyperbolic hyperquadric");
    return p.coords.tail(p.n + 1) / (1.0 + p.coords[0]);
}

} // namespace horoconv
