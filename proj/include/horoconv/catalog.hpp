#pragma once
// Closed-form catalog of conformal metrics with constant Schouten
// eigenvalues and their hypersurface parametrizations: totally geodesic
// hyperplanes, equidistant hypersurfaces, H^k x S^{n-k} products, geodesic
// spheres, and the degenerate horosphere family. Each entry carries the
// parametric immersion and unit normal over a parameter domain Omega, the
// induced metric field on the sphere with analytic derivatives, and the
// expected constant curvatures and eigenvalues.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "horoconv/conformal_metric.hpp"
#include "horoconv/correspondence.hpp"
#include "horoconv/errors.hpp"
#include "horoconv/lorentz.hpp"
#include "horoconv/report.hpp"
#include "horoconv/sphere.hpp"

namespace horoconv {

struct CatalogEntry {
    std::string name;
    int n = 0;
    std::vector<std::pair<std::string, double>> params;
    bool degenerate = false;

    // Parametric side: maps from the parameter domain Omega in R^n.
    std::function<Vec(const Vec&)> immersion;    // phi, values in R^{n+2}
    std::function<Vec(const Vec&)> unit_normal;  // eta
    std::function<Vec(SphereSampler&)> sample_omega;

    // Metric side (absent for the degenerate horosphere family).
    std::optional<ConformalMetricField> metric;

    std::vector<double> expected_kappas;   // ascending, with multiplicity
    std::vector<double> expected_lambdas;  // ascending
    // Sign candidates recorded for numeric adjudication: (kappa, dictionary lambda).
    std::vector<std::pair<double, double>> kappa_sign_candidates;
    std::string paper_stated_note;

    Vec light_cone(const Vec& w) const { return immersion(w) + unit_normal(w); }

    double support_exponent(const Vec& w) const {
        const Vec psi = light_cone(w);
        if (!(psi[0] > 0.0)) throw domain_violation(name + ": light cone map left the future cone");
        return std::log(psi[0]);
    }

    SpherePoint gauss(const Vec& w) const {
        const Vec psi = light_cone(w);
        return SpherePoint::normalized(psi.tail(psi.size() - 1) / psi[0], n);
    }

    std::string spec_echo() const {
        std::ostringstream os;
        os << "entry=" << name << " n=" << n;
        for (const auto& [k, v] : params) os << " " << k << "=" << fmt_double_short(v);
        return os.str();
    }
};

namespace catalog_detail {

constexpr double kDomainInset = 1e-3; // relative inset from Omega boundaries when sampling

// rho(y) = log(c) - log(a*y_last + b): shared form for the totally geodesic
// and equidistant families (support function of {<p, w> = const} planes).
inline ConformalMetricField affine_support_metric(int n, double a, double b, double c) {
    auto rho = [a, b, c, n](const SpherePoint& x) {
        const double d = a * x.coords[n] + b;
        return std::log(c) - std::log(d);
    };
    auto domain = [a, b, n](const SpherePoint& x) { return a * x.coords[n] + b > 1e-12; };
    AmbientDerivatives der;
    der.gradient = [a, b, n](const Vec& x) {
        Vec g = Vec::Zero(n + 1);
        g[n] = -a / (a * x[n] + b);
        return g;
    };
    der.hessian = [a, b, n](const Vec& x) {
        Mat h = Mat::Zero(n + 1, n + 1);
        const double d = a * x[n] + b;
        h(n, n) = a * a / (d * d);
        return h;
    };
    return ConformalMetricField(n, rho, domain, der);
}

} // namespace catalog_detail

/// Totally geodesic hyperplane family; kappa = 0, lambda = -1/2.
inline CatalogEntry totally_geodesic(double r, int n) {
    require_sphere_dim(n);
    if (!(r > 0.0)) throw spec_error("totally_geodesic: r must be positive");
    CatalogEntry e;
    e.name = "totally-geodesic";
    e.n = n;
    e.params = {{"r", r}};
    e.immersion = [r, n](const Vec& x) {
        const double q2 = r * r - x.squaredNorm();
        if (!(q2 > 0.0)) throw domain_violation("totally-geodesic: |x| >= r");
        const double q = std::sqrt(q2);
        Vec phi(n + 2);
        phi[0] = (1.0 + r * r) / (2.0 * q);
        phi.segment(1, n) = x / q;
        phi[n + 1] = (1.0 - r * r) / (2.0 * q);
        return phi;
    };
    e.unit_normal = [r, n](const Vec&) {
        Vec eta = Vec::Zero(n + 2);
        eta[0] = (1.0 - r * r) / (2.0 * r);
        eta[n + 1] = (1.0 + r * r) / (2.0 * r);
        return eta;
    };
    e.sample_omega = [r, n](SphereSampler& s) { return s.ball(n, r * (1.0 - catalog_detail::kDomainInset)); };
    const double a = (1.0 + r * r) / (2.0 * r);
    const double b = (r * r - 1.0) / (2.0 * r);
    e.metric = catalog_detail::affine_support_metric(n, a, b, 1.0);
    e.expected_kappas.assign(n, 0.0);
    e.expected_lambdas.assign(n, -0.5);
    return e;
}

/// Equidistant hypersurface family at distance d from a totally geodesic
/// plane, sinh d = t/r. The shape operator gives kappa = -t/R with
/// R^2 = r^2 + t^2; both sign candidates are recorded for adjudication.
inline CatalogEntry equidistant(double r, double t, int n) {
    require_sphere_dim(n);
    if (!(r > 0.0) || !(t > 0.0)) throw spec_error("equidistant: r and t must be positive");
    CatalogEntry e;
    e.name = "equidistant";
    e.n = n;
    e.params = {{"r", r}, {"t", t}};
    const double R = std::hypot(r, t);
    e.immersion = [R, t, n](const Vec& x) {
        const double s = x.squaredNorm();
        const double nu = std::sqrt(R * R - s);
        const double beta = -t + nu;
        if (!(beta > 0.0)) throw domain_violation("equidistant: parameter outside Omega");
        Vec phi(n + 2);
        phi[0] = (1.0 + s + beta * beta) / (2.0 * beta);
        phi.segment(1, n) = x / beta;
        phi[n + 1] = (1.0 - s - beta * beta) / (2.0 * beta);
        return phi;
    };
    e.unit_normal = [R, t, n](const Vec& x) {
        const double s = x.squaredNorm();
        const double nu = std::sqrt(R * R - s);
        const double beta = -t + nu;
        Vec eta(n + 2);
        eta[0] = ((1.0 - t * t - R * R) * nu + 2.0 * t * R * R) / (2.0 * R * beta);
        eta.segment(1, n) = t * x / (R * beta);
        eta[n + 1] = ((1.0 + t * t + R * R) * nu - 2.0 * t * R * R) / (2.0 * R * beta);
        return eta;
    };
    e.sample_omega = [r, n](SphereSampler& s) { return s.ball(n, r * (1.0 - catalog_detail::kDomainInset)); };
    const double a = (1.0 + r * r) / (2.0 * r);
    const double b = (r * r - 1.0) / (2.0 * r);
    e.metric = catalog_detail::affine_support_metric(n, a, b, (R + t) / r);
    const double kappa = -t / R;
    e.expected_kappas.assign(n, kappa);
    e.expected_lambdas.assign(n, lambda_from_kappa(kappa)); // = -(R-t)/(2(R+t))
    e.kappa_sign_candidates = {{-t / R, lambda_from_kappa(-t / R)}, {t / R, lambda_from_kappa(t / R)}};
    std::ostringstream note;
    note << "stated pair kappa=-t/R with lambda=-(R+t)/(2(R-t)) = " << fmt_double_short(-(R + t) / (2.0 * (R - t)))
         << " is internally inconsistent; the dictionary sends kappa=-t/R to "
         << fmt_double_short(lambda_from_kappa(-t / R));
    e.paper_stated_note = note.str();
    return e;
}

/// H^k(-1/(1+r^2)) x S^{n-k}(1/r) family (one half of the hypersurface);
/// two curvatures -r/sqrt(1+r^2) (multiplicity k) and -sqrt(1+r^2)/r
/// (multiplicity n-k).
inline CatalogEntry product_hk_snk(int k, double r, int n) {
    require_sphere_dim(n);
    if (k < 1 || k > n - 1) throw spec_error("product_hk_snk: need 1 <= k <= n-1");
    if (!(r > 0.0)) throw spec_error("product_hk_snk: r must be positive");
    CatalogEntry e;
    e.name = "product";
    e.n = n;
    e.params = {{"k", double(k)}, {"r", r}};
    const double sq = std::sqrt(1.0 + r * r);
    e.immersion = [k, r, n](const Vec& xz) {
        const Vec x = xz.head(k);
        const Vec z = xz.tail(n - k);
        const double zz = z.squaredNorm();
        if (!(zz < r * r)) throw domain_violation("product: |z| >= r");
        Vec phi(n + 2);
        phi[0] = std::sqrt(x.squaredNorm() + 1.0 + r * r);
        phi.segment(1, k) = x;
        phi.segment(1 + k, n - k) = z;
        phi[n + 1] = std::sqrt(r * r - zz);
        return phi;
    };
    e.unit_normal = [k, r, n, sq](const Vec& xz) {
        const Vec x = xz.head(k);
        const Vec z = xz.tail(n - k);
        const double zz = z.squaredNorm();
        Vec eta(n + 2);
        eta[0] = r * std::sqrt(x.squaredNorm() + 1.0 + r * r) / sq;
        eta.segment(1, k) = r * x / sq;
        eta.segment(1 + k, n - k) = sq * z / r;
        eta[n + 1] = sq * std::sqrt(r * r - zz) / r;
        return eta;
    };
    e.sample_omega = [k, r, n](SphereSampler& s) {
        Vec w(n);
        w.head(k) = s.gaussian(k, 0.7);
        w.tail(n - k) = s.ball(n - k, r * (1.0 - catalog_detail::kDomainInset));
        return w;
    };
    // rho(y) = log(r + sqrt(1+r^2)) - log(1 - |y_I|^2)/2, y_I the first k
    // spatial coordinates of the Gauss image.
    const double c0 = std::log(r + sq);
    auto rho = [c0, k, n](const SpherePoint& x) {
        const double s = x.coords.head(k).squaredNorm();
        return c0 - 0.5 * std::log(1.0 - s);
    };
    auto domain = [k, n](const SpherePoint& x) {
        return x.coords.head(k).squaredNorm() < 1.0 - 1e-12 && x.coords[n] > 0.0;
    };
    AmbientDerivatives der;
    der.gradient = [k, n](const Vec& x) {
        const double s = x.head(k).squaredNorm();
        Vec g = Vec::Zero(n + 1);
        g.head(k) = x.head(k) / (1.0 - s);
        return g;
    };
    der.hessian = [k, n](const Vec& x) {
        const double s = x.head(k).squaredNorm();
        Mat h = Mat::Zero(n + 1, n + 1);
        h.topLeftCorner(k, k) = Mat::Identity(k, k) / (1.0 - s) +
                                2.0 * x.head(k) * x.head(k).transpose() / ((1.0 - s) * (1.0 - s));
        return h;
    };
    e.metric = ConformalMetricField(n, rho, domain, der);
    const double kap_h = -r / sq;      // multiplicity k
    const double kap_s = -sq / r;      // multiplicity n-k
    std::vector<double> kappas(n);
    std::fill(kappas.begin(), kappas.begin() + (n - k), kap_s); // kap_s < kap_h
    std::fill(kappas.begin() + (n - k), kappas.end(), kap_h);
    e.expected_kappas = kappas;
    const double lam_h = -0.5 - r * r + r * sq; // multiplicity k, negative
    const double lam_s = 0.5 + r * r - r * sq;  // multiplicity n-k, positive
    std::vector<double> lambdas(n);
    std::fill(lambdas.begin(), lambdas.begin() + k, lam_h);
    std::fill(lambdas.begin() + k, lambdas.end(), lam_s);
    e.expected_lambdas = lambdas;
    return e;
}

/// Geodesic sphere of radius t about the base point O; rho == t on all of
/// S^n, phi = (cosh t, sinh t x), kappa = -coth t, lambda = e^{-2t}/2.
inline CatalogEntry geodesic_sphere(double t, int n) {
    require_sphere_dim(n);
    if (!(t > 0.0)) throw spec_error("geodesic_sphere: t must be positive");
    CatalogEntry e;
    e.name = "geodesic-sphere";
    e.n = n;
    e.params = {{"t", t}};
    Vec pole = Vec::Zero(n + 1);
    pole[n] = 1.0;
    auto chart = std::make_shared<StereoChart>(SpherePoint(pole, n));
    e.immersion = [t, n, chart](const Vec& y) {
        const SpherePoint x = chart->from_chart(y);
        Vec phi(n + 2);
        phi[0] = std::cosh(t);
        phi.tail(n + 1) = std::sinh(t) * x.coords;
        return phi;
    };
    e.unit_normal = [t, n, chart](const Vec& y) {
        const SpherePoint x = chart->from_chart(y);
        Vec eta(n + 2);
        eta[0] = std::sinh(t);
        eta.tail(n + 1) = std::cosh(t) * x.coords;
        return eta;
    };
    e.sample_omega = [n, chart](SphereSampler& s) {
        for (;;) {
            const SpherePoint x = s.next(n);
            const double denom = 1.0 - x.coords.dot(chart->pole().coords);
            if (denom > 0.1) return chart->to_chart(x);
        }
    };
    AmbientDerivatives der;
    der.gradient = [n](const Vec&) { return Vec(Vec::Zero(n + 1)); };
    der.hessian = [n](const Vec&) { return Mat(Mat::Zero(n + 1, n + 1)); };
    e.metric = ConformalMetricField(n, [t](const SpherePoint&) { return t; }, nullptr, der);
    e.expected_kappas.assign(n, -1.0 / std::tanh(t));
    e.expected_lambdas.assign(n, 0.5 * std::exp(-2.0 * t));
    return e;
}

/// Degenerate horosphere family: the light cone map is the constant null
/// vector v = e^{rho0}(1, x0); excluded from jet construction.
inline CatalogEntry horosphere_entry(double rho0, const SpherePoint& x0, int n) {
    require_sphere_dim(n);
    if (x0.n != n) throw spec_error("horosphere_entry: dimension mismatch");
    CatalogEntry e;
    e.name = "horosphere";
    e.n = n;
    e.params = {{"rho0", rho0}};
    e.degenerate = true;
    Vec v(n + 2);
    v[0] = std::exp(rho0);
    v.tail(n + 1) = std::exp(rho0) * x0.coords;
    // Null frame: vt with <v, vt> = -1, plus spatial directions orthogonal
    // to both; the horosphere is phi(xi) = (1+|xi|^2)/2 v + vt + xi_i w_i.
    Vec vt(n + 2);
    vt[0] = 0.5 * std::exp(-rho0);
    vt.tail(n + 1) = -0.5 * std::exp(-rho0) * x0.coords;
    StereoChart frame_src(x0);
    Mat w(n + 2, n);
    w.row(0).setZero();
    w.bottomRows(n + 1) = frame_src.frame();
    e.immersion = [v, vt, w, n](const Vec& xi) {
        Vec phi = 0.5 * (1.0 + xi.squaredNorm()) * v + vt;
        phi += w * xi;
        return phi;
    };
    e.unit_normal = [v, vt, w, n](const Vec& xi) {
        Vec phi = 0.5 * (1.0 + xi.squaredNorm()) * v + vt;
        phi += w * xi;
        return Vec(v - phi);
    };
    e.sample_omega = [n](SphereSampler& s) { return s.gaussian(n, 1.0); };
    return e;
}

/// Builds an entry by CLI name; throws spec_error for unknown names.
inline CatalogEntry make_entry(const std::string& name, int n, double r, double t, int k, double rho0 = 0.0) {
    if (name == "totally-geodesic") return totally_geodesic(r, n);
    if (name == "equidistant") return equidistant(r, t, n);
    if (name == "product") return product_hk_snk(k, r, n);
    if (name == "geodesic-sphere") return geodesic_sphere(t, n);
    if (name == "horosphere") {
        Vec pole = Vec::Zero(n + 1);
        pole[n] = 1.0;
        return horosphere_entry(rho0, SpherePoint(pole, n), n);
    }
    throw spec_error("unknown catalog entry name: " + name);
}

// ---------------------------------------------------------------------------
// Entry verification

namespace catalog_detail {

inline Vec kappas_in_params(const CatalogEntry& e, const Vec& w) {
    auto phi = [&](const Vec& p) { return e.immersion(p); };
    auto eta = [&](const Vec& p) { return e.unit_normal(p); };
    return detail::shape_operator_from_maps(phi, eta, w, e.n).kappas;
}

// Pullback of the Minkowski metric under psi against e^{2 rho} times the
// pullback of the round metric under the Gauss map, in Omega coordinates.
inline double metric_pullback_residual(const CatalogEntry& e, const Vec& w) {
    const int n = e.n;
    const double h = fd::grad_step(w.cwiseAbs().maxCoeff());
    Mat dpsi(n + 2, n), dg(n + 1, n);
    auto psi_map = [&](const Vec& p) { return e.light_cone(p); };
    auto g_map = [&](const Vec& p) { return Vec(e.gauss(p).coords); };
    for (int i = 0; i < n; ++i) {
        dpsi.col(i) = fd::directional4(psi_map, w, i, h);
        dg.col(i) = fd::directional4(g_map, w, i, h);
    }
    const Mat j = minkowski_metric(n);
    const Mat lhs = dpsi.transpose() * j * dpsi;
    const Mat rhs = std::exp(2.0 * e.support_exponent(w)) * (dg.transpose() * dg);
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

} // namespace catalog_detail

/// Runs all entry invariants plus the dictionary check on deterministic
/// pseudo-random samples; failures are report content, not exceptions.
inline VerificationReport verify_entry(const CatalogEntry& e, int sample_count, uint64_t seed) {
    if (sample_count < 1) throw spec_error("verify_entry: sample_count must be >= 1");
    VerificationReport rep;
    rep.spec_echo = e.spec_echo();
    rep.seed = seed;
    SphereSampler sampler(seed);

    std::vector<Vec> ws;
    ws.reserve(sample_count);
    for (int i = 0; i < sample_count; ++i) ws.push_back(e.sample_omega(sampler));

    double r_phi = 0.0, r_eta = 0.0, r_orth = 0.0, r_null = 0.0, r_support = 0.0;
    for (const auto& w : ws) {
        const Vec phi = e.immersion(w);
        const Vec eta = e.unit_normal(w);
        const Vec psi = phi + eta;
        r_phi = std::max(r_phi, std::abs(minkowski_inner(phi, phi) + 1.0));
        r_eta = std::max(r_eta, std::abs(minkowski_inner(eta, eta) - 1.0));
        r_orth = std::max(r_orth, std::abs(minkowski_inner(phi, eta)));
        r_null = std::max(r_null, std::abs(minkowski_inner(psi, psi)));
        Vec lifted(e.n + 2);
        const double er = std::exp(e.support_exponent(w));
        lifted[0] = er;
        lifted.tail(e.n + 1) = er * e.gauss(w).coords;
        r_support = std::max(r_support, (psi - lifted).cwiseAbs().maxCoeff());
    }
    rep.add("hyperquadric-immersion", r_phi, 1e-9, sample_count);
    rep.add("hyperquadric-normal", r_eta, 1e-9, sample_count);
    rep.add("orthogonality-phi-eta", r_orth, 1e-9, sample_count);
    rep.add("null-psi", r_null, 1e-9, sample_count);
    rep.add("support-identity", r_support, 1e-9, sample_count);

    if (e.degenerate) {
        // Constancy of the light cone map and its null-cone class.
        const Vec psi0 = e.light_cone(ws.front());
        double r_const = 0.0;
        for (const auto& w : ws) r_const = std::max(r_const, (e.light_cone(w) - psi0).cwiseAbs().maxCoeff());
        rep.add("light-cone-constancy", r_const, 1e-9, sample_count);
        const bool null_plus =
            classify(LorentzVector(psi0, e.n)).tag == HyperquadricTag::NullConePlus;
        rep.add_flag("null-cone-class", null_plus, 1);
        return rep;
    }

    // Injectivity of the Gauss map on the sample set.
    double min_dist = std::numeric_limits<double>::infinity();
    std::vector<Vec> gs;
    gs.reserve(ws.size());
    for (const auto& w : ws) gs.push_back(e.gauss(w).coords);
    for (size_t i = 0; i < gs.size(); ++i)
        for (size_t j = i + 1; j < gs.size(); ++j) min_dist = std::min(min_dist, (gs[i] - gs[j]).norm());
    rep.add_flag("gauss-injectivity", min_dist > 1e-12, sample_count,
                 "min pairwise distance " + fmt_double(min_dist));

    // Horospherical metric identity along psi.
    double r_pull = 0.0;
    for (const auto& w : ws) r_pull = std::max(r_pull, catalog_detail::metric_pullback_residual(e, w));
    rep.add("metric-pullback", r_pull, 1e-6, sample_count);

    // Principal curvature constancy and expected values (FD path).
    Vec kap_ref = catalog_detail::kappas_in_params(e, ws.front());
    double kap_spread = 0.0, kap_err = 0.0, hconv_all = 1.0;
    Vec expected = Eigen::Map<const Vec>(e.expected_kappas.data(), e.n);
    for (const auto& w : ws) {
        const Vec k = catalog_detail::kappas_in_params(e, w);
        kap_spread = std::max(kap_spread, (k - kap_ref).cwiseAbs().maxCoeff());
        kap_err = std::max(kap_err, (k - expected).cwiseAbs().maxCoeff());
        if (!is_horospherically_convex(k)) hconv_all = 0.0;
    }
    rep.add("kappa-constancy", kap_spread, 1e-6, sample_count);
    rep.add("kappa-expected", kap_err, 1e-6, sample_count);
    rep.add_flag("horospherical-convexity", hconv_all > 0.5, sample_count);

    // Schouten eigenvalues through the metric pipeline (analytic path).
    const ConformalMetricField& f = *e.metric;
    Vec lam_expected = Eigen::Map<const Vec>(e.expected_lambdas.data(), e.n);
    Vec lam_ref;
    double lam_spread = 0.0, lam_err = 0.0, dict_err = 0.0;
    for (const auto& w : ws) {
        const SpherePoint x = e.gauss(w);
        const Vec lam = schouten(f, x).eigenvalues;
        if (lam_ref.size() == 0) lam_ref = lam;
        lam_spread = std::max(lam_spread, (lam - lam_ref).cwiseAbs().maxCoeff());
        lam_err = std::max(lam_err, (lam - lam_expected).cwiseAbs().maxCoeff());
        Vec lam_dict(e.n);
        const Vec k = catalog_detail::kappas_in_params(e, w);
        for (int i = 0; i < e.n; ++i) lam_dict[i] = lambda_from_kappa(k[i]);
        std::sort(lam_dict.data(), lam_dict.data() + e.n);
        dict_err = std::max(dict_err, (lam_dict - lam).cwiseAbs().maxCoeff());
    }
    rep.add("lambda-constancy", lam_spread, 1e-9, sample_count);
    rep.add("lambda-expected", lam_err, 1e-6, sample_count);
    rep.add("eigenvalue-dictionary", dict_err, 1e-5, sample_count);

    // Sign adjudication for entries carrying two candidates.
    if (!e.kappa_sign_candidates.empty()) {
        int matched = -1;
        double best = std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < e.kappa_sign_candidates.size(); ++c) {
            const auto& [kc, lc] = e.kappa_sign_candidates[c];
            double err = 0.0;
            for (const auto& w : ws) {
                const Vec k = catalog_detail::kappas_in_params(e, w);
                err = std::max(err, (k.array() - kc).abs().maxCoeff());
            }
            if (err < best) {
                best = err;
                matched = static_cast<int>(c);
            }
            std::ostringstream os;
            os << "kappa-candidate " << fmt_double_short(kc) << " -> dictionary lambda "
               << fmt_double_short(lc) << ", max |kappa - candidate| = " << fmt_double(err);
            rep.adjudications.push_back(os.str());
        }
        const auto& [kc, lc] = e.kappa_sign_candidates[static_cast<size_t>(matched)];
        std::ostringstream os;
        os << "adjudicated kappa sign: " << fmt_double_short(kc) << " (dictionary lambda "
           << fmt_double_short(lc) << ")";
        rep.adjudications.push_back(os.str());
        if (!e.paper_stated_note.empty()) rep.adjudications.push_back(e.paper_stated_note);
        rep.add("kappa-sign-adjudication", best, 1e-6, sample_count);
    }
    return rep;
}

} // namespace horoconv
