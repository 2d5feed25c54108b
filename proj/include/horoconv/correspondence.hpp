#pragma once
// Two-way bridge between conformal metrics on S^n and horospherically
// convex hypersurfaces in H^{n+1}: the support-function representation of
// the immersion, its unit normal and light cone map, shape-operator
// eigenvalues, and the curvature/eigenvalue dictionary.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "horoconv/conformal_metric.hpp"
#include "horoconv/errors.hpp"
#include "horoconv/lorentz.hpp"
#include "horoconv/sphere.hpp"

namespace horoconv {

/// Light cone map psi = e^{rho}(1, x); null with positive x0.
inline LorentzVector light_cone_map(const ConformalMetricField& f, const SpherePoint& x) {
    const double er = std::exp(f.rho(x));
    Vec v(x.n + 2);
    v[0] = er;
    v.tail(x.n + 1) = er * x.coords;
    return LorentzVector(std::move(v), x.n);
}

/// Support-function representation of the immersion:
/// phi = e^{rho}/2 (1 + e^{-2 rho}(1 + |grad rho|^2)) (1,x) + e^{-rho}(0, -x + grad rho).
/// Always evaluable; lands on H^{n+1}. For rho constant 0 it collapses to
/// the base point O = (1,0,...,0).
inline LorentzVector representation(const ConformalMetricField& f, const SpherePoint& x) {
    const double rho = f.rho(x);
    const Vec grad = sphere_gradient(f, x);
    const double a = 0.5 * std::exp(rho) * (1.0 + std::exp(-2.0 * rho) * (1.0 + grad.squaredNorm()));
    Vec v(x.n + 2);
    v[0] = a;
    v.tail(x.n + 1) = a * x.coords + std::exp(-rho) * (-x.coords + grad);
    return LorentzVector(std::move(v), x.n);
}

/// Unit normal eta = psi - phi.
inline LorentzVector normal(const ConformalMetricField& f, const SpherePoint& x) {
    const LorentzVector psi = light_cone_map(f, x);
    const LorentzVector phi = representation(f, x);
    return LorentzVector(psi.coords - phi.coords, x.n);
}

/// lambda = 1/2 - 1/(1 - kappa).
inline double lambda_from_kappa(double kappa) {
    if (std::abs(1.0 - kappa) < 1e-14) throw domain_violation("lambda_from_kappa: kappa = 1 pole");
    return 0.5 - 1.0 / (1.0 - kappa);
}

/// Inverse map kappa = 1 - 1/(1/2 - lambda).
inline double kappa_from_lambda(double lambda) {
    if (std::abs(0.5 - lambda) < 1e-14) throw domain_violation("kappa_from_lambda: lambda = 1/2 pole");
    return 1.0 - 1.0 / (0.5 - lambda);
}

/// All principal curvatures simultaneously below 1 or above 1.
inline bool is_horospherically_convex(const Vec& kappas) {
    if (kappas.size() == 0) return false;
    return kappas.maxCoeff() < 1.0 || kappas.minCoeff() > 1.0;
}

/// sigma_k of the transformed curvatures (1+kappa)/(2(1-kappa)); this
/// equals (-1)^k sigma_k of the dictionary eigenvalues.
inline double weingarten_sigma(const Vec& kappas, int k, bool normalized = false) {
    Vec t(kappas.size());
    for (Eigen::Index i = 0; i < kappas.size(); ++i) {
        if (std::abs(1.0 - kappas[i]) < 1e-14)
            throw domain_violation("weingarten_sigma: kappa = 1 pole");
        t[i] = (1.0 + kappas[i]) / (2.0 * (1.0 - kappas[i]));
    }
    return sigma_k(t, k, normalized);
}

namespace detail {

// Shape operator S = -(dphi)^{-1} dEta in a chart frame. Under this sign
// convention the geodesic sphere rho == t has kappa = -coth t and the
// dictionary reproduces the dilation law.
struct ShapeOperatorResult {
    Vec kappas;       // ascending
    double rank_gap;  // smallest eigenvalue of the first fundamental form
};

inline ShapeOperatorResult shape_operator_from_maps(
    const std::function<Vec(const Vec&)>& phi_of_y, const std::function<Vec(const Vec&)>& eta_of_y,
    const Vec& y0, int n, double step = 0.0) {
    const double h = step > 0.0 ? step : fd::grad_step(y0.cwiseAbs().maxCoeff());
    Mat dphi(n + 2, n), deta(n + 2, n);
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = h;
        dphi.col(i) = (phi_of_y(y0 + e) - phi_of_y(y0 - e)) / (2.0 * h);
        deta.col(i) = (eta_of_y(y0 + e) - eta_of_y(y0 - e)) / (2.0 * h);
    }
    const Mat j = minkowski_metric(n);
    Mat m1 = dphi.transpose() * j * dphi;           // first fundamental form
    Mat m2 = dphi.transpose() * j * deta;           // mixed form, symmetric up to FD error
    m1 = 0.5 * (m1 + m1.transpose()).eval();
    m2 = 0.5 * (m2 + m2.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> gauge(m1);
    const double gap = gauge.eigenvalues()[0];
    const double scale = std::max(1.0, m1.cwiseAbs().maxCoeff());
    if (!(gap > 1e-10 * scale))
        throw domain_violation("shape operator: dphi is rank deficient (degenerate point)");
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Mat(-m2), m1);
    if (es.info() != Eigen::Success) throw spec_error("shape operator: eigensolver failed");
    return {es.eigenvalues(), gap};
}

} // namespace detail

/// Principal curvatures of the representation immersion at x, ascending.
inline Vec principal_curvatures(const ConformalMetricField& f, const SpherePoint& x) {
    if (!f.in_domain(x)) throw domain_violation("principal_curvatures: point outside domain");
    StereoChart chart(x.antipode());
    const Vec y0 = chart.to_chart(x);
    auto phi_of_y = [&](const Vec& y) { return representation(f, chart.from_chart(y)).coords; };
    auto eta_of_y = [&](const Vec& y) { return normal(f, chart.from_chart(y)).coords; };
    // With finite-difference gradients inside phi the Jacobian step must
    // absorb that noise; analytic fields take the first-derivative step.
    const double step = f.analytic() ? fd::grad_step(y0.cwiseAbs().maxCoeff())
                                     : fd::hess_step(y0.cwiseAbs().maxCoeff());
    return detail::shape_operator_from_maps(phi_of_y, eta_of_y, y0, f.n(), step).kappas;
}

/// Per-point bundle tying both sides of the correspondence together.
struct HypersurfaceJet {
    SpherePoint x;      // Gauss map image
    double rho;
    LorentzVector phi;
    LorentzVector eta;
    LorentzVector psi;
    Vec kappas;         // ascending; empty when degenerate
    Vec lambdas;        // ascending Schouten eigenvalues
    bool degenerate = false;

    double quadric_residual() const {
        double r = std::abs(minkowski_inner(phi, phi) + 1.0);
        r = std::max(r, std::abs(minkowski_inner(eta, eta) - 1.0));
        r = std::max(r, std::abs(minkowski_inner(phi, eta)));
        return r;
    }

    /// Residual normalized by the squared coordinate scale, for points far
    /// from the base point where absolute rounding grows with |phi|^2.
    double quadric_residual_relative() const {
        const double scale = 1.0 + std::pow(phi.coords.cwiseAbs().maxCoeff(), 2);
        return quadric_residual() / scale;
    }
};

struct JetOptions {
    double dict_tol = 1e-5;        // FD default; use 1e-8 with analytic fields
    double invariant_tol = 1e-9;
    bool check_bound = true;
};

inline JetOptions default_jet_options(const ConformalMetricField& f) {
    JetOptions o;
    o.dict_tol = f.analytic() ? 1e-8 : 1e-5;
    return o;
}

/// Builds the full jet at x, enforcing the hyperquadric invariants and the
/// eigenvalue dictionary. Throws eigenvalue_bound_error when sup lambda
/// exceeds 1/2; at the exact boundary the jet is flagged degenerate.
inline HypersurfaceJet jet(const ConformalMetricField& f, const SpherePoint& x, JetOptions opt) {
    const SchoutenAtPoint sch = schouten(f, x);
    const double lam_max = sch.eigenvalues[sch.eigenvalues.size() - 1];
    const double boundary_slack = 100.0 * opt.dict_tol;
    if (opt.check_bound && lam_max > 0.5 + boundary_slack) {
        std::ostringstream os;
        os << "jet: eigenvalue bound violated (max lambda = " << lam_max
           << " >= 1/2); dilate the metric first";
        throw eigenvalue_bound_error(os.str());
    }

    HypersurfaceJet out{x,
                        f.rho(x),
                        representation(f, x),
                        normal(f, x),
                        light_cone_map(f, x),
                        Vec(),
                        sch.eigenvalues,
                        false};

    if (out.quadric_residual_relative() > opt.invariant_tol)
        throw spec_error("jet: hyperquadric invariants violated beyond tolerance");

    if (lam_max > 0.5 - boundary_slack) {
        out.degenerate = true; // at the lambda = 1/2 boundary the immersion collapses
        return out;
    }

    out.kappas = principal_curvatures(f, x);

    Vec lam_of_kappa(out.kappas.size());
    for (Eigen::Index i = 0; i < out.kappas.size(); ++i) lam_of_kappa[i] = lambda_from_kappa(out.kappas[i]);
    std::sort(lam_of_kappa.data(), lam_of_kappa.data() + lam_of_kappa.size());
    const double mismatch = (lam_of_kappa - out.lambdas).cwiseAbs().maxCoeff();
    if (mismatch > opt.dict_tol) {
        std::ostringstream os;
        os << "jet: eigenvalue dictionary mismatch " << mismatch << " > " << opt.dict_tol
           << "; schouten = [";
        for (Eigen::Index i = 0; i < out.lambdas.size(); ++i) os << out.lambdas[i] << (i + 1 < out.lambdas.size() ? ", " : "");
        os << "], from kappas = [";
        for (Eigen::Index i = 0; i < lam_of_kappa.size(); ++i) os << lam_of_kappa[i] << (i + 1 < lam_of_kappa.size() ? ", " : "");
        os << "]";
        throw spec_error(os.str());
    }
    return out;
}

inline HypersurfaceJet jet(const ConformalMetricField& f, const SpherePoint& x) {
    return jet(f, x, default_jet_options(f));
}

} // namespace horoconv
