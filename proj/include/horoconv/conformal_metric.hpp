#pragma once
// Conformal metrics g = e^{2 rho} g0 on domains of S^n: evaluation of rho
// and its derivatives, the Schouten endomorphism and its eigenvalues,
// elementary symmetric curvature functionals, and metric dilation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "horoconv/errors.hpp"
#include "horoconv/sphere.hpp"

namespace horoconv {

namespace fd {

inline double grad_step(double scale = 0.0) {
    static const double h = std::cbrt(std::numeric_limits<double>::epsilon());
    return h * (1.0 + std::abs(scale));
}

inline double hess_step(double scale = 0.0) {
    static const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    return h * (1.0 + std::abs(scale));
}

/// Fourth-order central difference of a vector map along direction i.
template <class MapFn>
Vec directional4(const MapFn& map, const Vec& y0, int i, double h) {
    Vec e = Vec::Zero(y0.size());
    e[i] = h;
    return (map(y0 - 2.0 * e) - 8.0 * map(y0 - e) + 8.0 * map(y0 + e) - map(y0 + 2.0 * e)) / (12.0 * h);
}

} // namespace fd

/// Analytic derivatives of any smooth ambient extension of rho near S^n.
/// Only values on the sphere are ever used; the chart chain rule combines
/// gradient and Hessian so that the result is extension independent.
struct AmbientDerivatives {
    std::function<Vec(const Vec&)> gradient;  // R^{n+1} -> R^{n+1}
    std::function<Mat(const Vec&)> hessian;   // R^{n+1} -> (n+1)x(n+1)
};

class ConformalMetricField {
public:
    using RhoFn = std::function<double(const SpherePoint&)>;
    using DomainFn = std::function<bool(const SpherePoint&)>;

    ConformalMetricField(int n, RhoFn rho, DomainFn domain = nullptr,
                         std::optional<AmbientDerivatives> analytic = std::nullopt)
        : n_(n), rho_(std::move(rho)), domain_(std::move(domain)), analytic_(std::move(analytic)) {
        require_sphere_dim(n_);
    }

    int n() const { return n_; }
    bool analytic() const { return analytic_.has_value(); }
    const std::optional<AmbientDerivatives>& ambient() const { return analytic_; }

    bool in_domain(const SpherePoint& x) const { return !domain_ || domain_(x); }

    double rho(const SpherePoint& x) const {
        if (!in_domain(x)) throw domain_violation("rho: point outside the metric domain");
        const double v = rho_(x);
        if (!std::isfinite(v)) throw domain_violation("rho: non-finite value inside domain");
        return v;
    }

    /// e^t g has exponent rho + t/2.
    ConformalMetricField dilate(double t) const {
        RhoFn base = rho_;
        ConformalMetricField out(n_, [base, t](const SpherePoint& x) { return base(x) + 0.5 * t; }, domain_,
                                 analytic_);
        return out;
    }

    /// Same field restricted to finite-difference derivatives.
    ConformalMetricField without_analytic() const { return ConformalMetricField(n_, rho_, domain_); }

private:
    int n_;
    RhoFn rho_;
    DomainFn domain_;
    std::optional<AmbientDerivatives> analytic_;
};

/// g0-gradient of rho at x, returned as a tangent vector in R^{n+1}.
inline Vec sphere_gradient(const ConformalMetricField& f, const SpherePoint& x) {
    if (!f.in_domain(x)) throw domain_violation("sphere_gradient: point outside domain");
    if (f.analytic()) {
        Vec g = f.ambient()->gradient(x.coords);
        return g - g.dot(x.coords) * x.coords;
    }
    // Central differences along great circles through x.
    StereoChart chart(x.antipode());
    const Mat& frame = chart.frame();
    const double h = fd::grad_step();
    Vec grad = Vec::Zero(x.n + 1);
    for (int i = 0; i < x.n; ++i) {
        const Vec e = frame.col(i);
        const SpherePoint xp = SpherePoint::normalized(std::cos(h) * x.coords + std::sin(h) * e, x.n);
        const SpherePoint xm = SpherePoint::normalized(std::cos(h) * x.coords - std::sin(h) * e, x.n);
        grad += ((f.rho(xp) - f.rho(xm)) / (2.0 * h)) * e;
    }
    return grad;
}

struct SchoutenAtPoint {
    Mat matrix;      // endomorphism g^{-1} Sch_g in the chart frame (symmetric)
    Vec eigenvalues; // ascending
};

namespace detail {

// Chart exponent u(y) = rho(F(y)) + log(2/(1+|y|^2)); in the chart the
// metric reads e^{2u} |dy|^2 against the flat background.
inline double chart_exponent(const ConformalMetricField& f, const StereoChart& chart, const Vec& y) {
    const SpherePoint x = chart.from_chart(y);
    return f.rho(x) + std::log(chart.conformal_factor(y));
}

inline void chart_derivatives(const ConformalMetricField& f, const StereoChart& chart, const Vec& y0,
                              double& u, Vec& grad, Mat& hess) {
    const int n = f.n();
    u = chart_exponent(f, chart, y0);
    grad.resize(n);
    hess.resize(n, n);
    const double w = 1.0 + y0.squaredNorm();
    if (f.analytic()) {
        const SpherePoint x0 = chart.from_chart(y0);
        const Vec g_amb = f.ambient()->gradient(x0.coords);
        const Mat h_amb = f.ambient()->hessian(x0.coords);
        const Mat df = chart.differential(y0);
        for (int i = 0; i < n; ++i)
            grad[i] = g_amb.dot(df.col(i)) - 2.0 * y0[i] / w;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                double v = df.col(i).dot(h_amb * df.col(j)) + g_amb.dot(chart.second_derivative(y0, i, j));
                v -= (i == j ? 2.0 / w : 0.0) - 4.0 * y0[i] * y0[j] / (w * w);
                hess(i, j) = hess(j, i) = v;
            }
        return;
    }
    const double h = fd::hess_step(y0.cwiseAbs().maxCoeff());
    auto uat = [&](const Vec& y) { return chart_exponent(f, chart, y); };
    const double u0 = u;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = h;
        const double up = uat(y0 + e), um = uat(y0 - e);
        grad[i] = (up - um) / (2.0 * h);
        hess(i, i) = (up - 2.0 * u0 + um) / (h * h);
        for (int j = 0; j < i; ++j) {
            Vec ej = Vec::Zero(n);
            ej[j] = h;
            const double v = (uat(y0 + e + ej) - uat(y0 + e - ej) - uat(y0 - e + ej) + uat(y0 - e - ej)) /
                             (4.0 * h * h);
            hess(i, j) = hess(j, i) = v;
        }
    }
}

} // namespace detail

/// Schouten endomorphism at x computed in the given chart against the flat
/// background: e^{-2u}(-Hess u + du du^T - |du|^2/2 Id).
inline SchoutenAtPoint schouten_in_chart(const ConformalMetricField& f, const StereoChart& chart,
                                         const SpherePoint& x) {
    if (!f.in_domain(x)) throw domain_violation("schouten: point outside domain");
    const Vec y0 = chart.to_chart(x);
    double u;
    Vec grad;
    Mat hess;
    detail::chart_derivatives(f, chart, y0, u, grad, hess);
    Mat sch = -hess + grad * grad.transpose() - 0.5 * grad.squaredNorm() * Mat::Identity(f.n(), f.n());
    sch *= std::exp(-2.0 * u);
    sch = 0.5 * (sch + sch.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(sch);
    if (es.info() != Eigen::Success) throw spec_error("schouten: eigensolver failed");
    return {sch, es.eigenvalues()};
}

/// Default chart pole: the point farthest from x, i.e. its antipode.
inline SchoutenAtPoint schouten(const ConformalMetricField& f, const SpherePoint& x) {
    return schouten_in_chart(f, StereoChart(x.antipode()), x);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * double(n - i) / double(i + 1);
    return r;
}

/// k-th elementary symmetric polynomial of the entries; `normalized`
/// divides by binomial(n,k).
inline double sigma_k(const Vec& eigs, int k, bool normalized = false) {
    const int n = static_cast<int>(eigs.size());
    if (k < 1 || k > n) throw spec_error("sigma_k: k out of range 1..n");
    // Running coefficients of prod (1 + s*lambda_i).
    std::vector<double> e(static_cast<size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(k, i + 1); j >= 1; --j)
            e[j] += eigs[i] * e[j - 1];
    return normalized ? e[k] / binomial(n, k) : e[k];
}

/// Dilation g_t = e^t g; eigenvalues scale by e^{-t}.
inline ConformalMetricField dilate(const ConformalMetricField& f, double t) { return f.dilate(t); }

/// Dilates just enough that all sampled eigenvalues drop below 1/2 minus a
/// fixed margin; returns the new field and the dilation parameter t (0 when
/// no dilation is needed).
inline std::pair<ConformalMetricField, double> normalize_below_half(const ConformalMetricField& f,
                                                                    const std::vector<SpherePoint>& samples) {
    if (samples.empty()) throw spec_error("normalize_below_half: empty sample set");
    constexpr double margin = 1e-3;
    double lam_max = -std::numeric_limits<double>::infinity();
    for (const auto& x : samples) {
        const SchoutenAtPoint s = schouten(f, x);
        lam_max = std::max(lam_max, s.eigenvalues[s.eigenvalues.size() - 1]);
    }
    if (!std::isfinite(lam_max)) throw spec_error("normalize_below_half: eigenvalues not finite");
    const double target = 0.5 - 1.05 * margin;
    if (lam_max < 0.5 - margin) return {f, 0.0};
    const double t = std::log(lam_max / target);
    return {f.dilate(t), t};
}

} // namespace horoconv
