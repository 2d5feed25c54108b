#pragma once
// Dictionary between time-orientation preserving Lorentz isometries and
// conformal diffeomorphisms of S^n, invariance tests for conformal metrics
// and their associated hypersurfaces, and the eigenvalue-structure
// detector (multiplicity split, gap, functional dependence).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "horoconv/conformal_metric.hpp"
#include "horoconv/correspondence.hpp"
#include "horoconv/errors.hpp"
#include "horoconv/lorentz.hpp"
#include "horoconv/sphere.hpp"

namespace horoconv {

// Boundary action of an isometry on the sphere: T(1,x) = e^{-omega(x)}(1, Phi(x)).
class MobiusMap {
public:
    explicit MobiusMap(LorentzIsometry t) : t_(std::move(t)) {
        if (!t_.valid(1e-10))
            throw spec_error("MobiusMap: source matrix is not a time-orientation preserving isometry");
    }

    int n() const { return t_.n; }
    const LorentzIsometry& source() const { return t_; }

    SpherePoint apply(const SpherePoint& x) const {
        const Vec image = t_.matrix * null_lift(x).coords;
        if (!(image[0] > 0.0)) throw spec_error("MobiusMap: time orientation violated");
        return SpherePoint::normalized(image.tail(x.n + 1) / image[0], x.n);
    }

    /// Conformal exponent omega with Phi* g0 = e^{2 omega} g0.
    double omega(const SpherePoint& x) const {
        const Vec image = t_.matrix * null_lift(x).coords;
        if (!(image[0] > 0.0)) throw spec_error("MobiusMap: time orientation violated");
        return -std::log(image[0]);
    }

    MobiusMap inverse() const { return MobiusMap(t_.inverse()); }

private:
    LorentzIsometry t_;
};

inline MobiusMap mobius_from_isometry(const LorentzIsometry& t) { return MobiusMap(t); }

/// Default reconstruction sample set: a deterministic well-spread family
/// of sphere points (coordinate directions and mixed diagonals).
inline std::vector<SpherePoint> mobius_reconstruction_samples(int n, uint64_t seed = 2024) {
    std::vector<SpherePoint> pts;
    for (int i = 0; i <= n; ++i) {
        Vec v = Vec::Zero(n + 1);
        v[i] = 1.0;
        pts.emplace_back(v, n);
        pts.emplace_back(SpherePoint::normalized(Vec::Ones(n + 1) - 1.5 * v, n));
    }
    SphereSampler s(seed);
    for (int i = 0; i < n + 4; ++i) pts.push_back(s.next(n));
    return pts;
}

/// Rebuilds the Lorentz matrix from the null-cone action
/// (1,x) -> e^{-omega(x)}(1, Phi(x)) by least squares over the samples,
/// then validates the group relation. Throws spec_error when the pair
/// (Phi, omega) is not induced by an isometry.
inline LorentzIsometry isometry_from_mobius(
    const std::function<SpherePoint(const SpherePoint&)>& phi_map,
    const std::function<double(const SpherePoint&)>& omega, const std::vector<SpherePoint>& samples, int n,
    double group_tol = 1e-8) {
    if (static_cast<int>(samples.size()) < n + 2)
        throw spec_error("isometry_from_mobius: need at least n+2 sample directions");
    const int m = static_cast<int>(samples.size());
    Mat a(n + 2, m), b(n + 2, m);
    for (int j = 0; j < m; ++j) {
        a.col(j) = null_lift(samples[j]).coords;
        const double scale = std::exp(-omega(samples[j]));
        b.col(j) = scale * null_lift(phi_map(samples[j])).coords;
    }
    // Solve M A = B in the least-squares sense: A^T M^T = B^T.
    Eigen::ColPivHouseholderQR<Mat> qr(a.transpose());
    if (qr.rank() < n + 2)
        throw spec_error("isometry_from_mobius: sample directions do not span the ambient space");
    const Mat mt = qr.solve(b.transpose());
    LorentzIsometry t(mt.transpose(), n);
    if (t.group_residual() > group_tol || !t.time_orientation_preserving())
        throw spec_error("isometry_from_mobius: reconstructed matrix is not a Lorentz isometry "
                         "(input was not a Mobius/conformal-factor pair)");
    return t;
}

/// Exponent of the pulled-back metric Phi* g: x -> rho(Phi(x)) + omega(x).
inline ConformalMetricField pullback_exponent(const MobiusMap& m, const ConformalMetricField& f) {
    auto rho = [m, &f](const SpherePoint& x) { return f.rho(m.apply(x)) + m.omega(x); };
    auto domain = [m, &f](const SpherePoint& x) { return f.in_domain(m.apply(x)); };
    return ConformalMetricField(f.n(), rho, domain);
}

struct InvarianceResult {
    bool invariant = false;
    double max_residual = 0.0;
    int admissible = 0; // samples with both x and Phi(x) in the domain
};

/// max over samples of |rho(x) - rho(Phi(x)) - omega(x)| against tol.
inline InvarianceResult is_metric_invariant(const ConformalMetricField& f, const MobiusMap& m,
                                            const std::vector<SpherePoint>& samples, double tol) {
    InvarianceResult out;
    for (const auto& x : samples) {
        if (!f.in_domain(x)) continue;
        const SpherePoint y = m.apply(x);
        if (!f.in_domain(y)) continue;
        ++out.admissible;
        out.max_residual = std::max(out.max_residual, std::abs(f.rho(x) - f.rho(y) - m.omega(x)));
    }
    if (out.admissible == 0)
        throw domain_violation("is_metric_invariant: no admissible samples (domain never meets its image)");
    out.invariant = out.max_residual <= tol;
    return out;
}

/// max over samples of |T phi(x) - phi(Phi(x))|_inf with Phi the Mobius map
/// induced by T (the reparametrization realized on the Gauss-map side).
inline InvarianceResult is_hypersurface_invariant(const ConformalMetricField& f, const LorentzIsometry& t,
                                                  const std::vector<SpherePoint>& samples, double tol) {
    const MobiusMap m(t);
    InvarianceResult out;
    for (const auto& x : samples) {
        if (!f.in_domain(x)) continue;
        const SpherePoint y = m.apply(x);
        if (!f.in_domain(y)) continue;
        ++out.admissible;
        const Vec lhs = t.matrix * representation(f, x).coords;
        const Vec rhs = representation(f, y).coords;
        out.max_residual = std::max(out.max_residual, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    if (out.admissible == 0)
        throw domain_violation("is_hypersurface_invariant: no admissible samples");
    out.invariant = out.max_residual <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// Eigenvalue structure detector

struct StructureThresholds {
    double gap_rel = 1e-5;          // relative multiplicity-gap threshold
    double dependence_min = 0.99;   // functional-dependence score threshold
};

struct StructureReport {
    bool two_eigenvalue = false;          // one value of multiplicity >= n-1 plus a distinct one
    bool multiplicity_n_minus_1 = false;
    double gap_statistic = 0.0;           // min over samples of |lambda - nu|
    double dependence_score = 0.0;        // 1 - normalized scatter of nu against lambda
    int samples_used = 0;
    std::vector<std::pair<double, double>> lambda_nu; // per-sample (repeated value, single value)
    std::string note = "dependence score is a scatter statistic, not a verdict on nu = nu(lambda)";
};

/// Detects, per sample, whether the sorted Schouten eigenvalues split into
/// one value with multiplicity n-1 plus a distinct second value, and scores
/// the functional dependence of the single value on the repeated one.
inline StructureReport detect_radial_structure(const ConformalMetricField& f,
                                               const std::vector<SpherePoint>& samples,
                                               StructureThresholds th = {}) {
    if (samples.size() < 2)
        throw spec_error("detect_radial_structure: need at least 2 samples for the dependence score");
    const int n = f.n();
    StructureReport rep;
    bool all_split = true;
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& x : samples) {
        const Vec lam = schouten(f, x).eigenvalues;
        const double spread = lam[n - 1] - lam[0];
        const double thresh = th.gap_rel * (1.0 + spread);
        // Candidate splits: single value at the top or at the bottom.
        const bool top = (lam[n - 1] - lam[n - 2] > thresh) && (lam[n - 2] - lam[0] <= thresh);
        const bool bottom = (lam[1] - lam[0] > thresh) && (lam[n - 1] - lam[1] <= thresh);
        if (!top && !bottom) {
            all_split = false;
            continue;
        }
        double repeated, single;
        if (top) {
            repeated = lam.head(n - 1).mean();
            single = lam[n - 1];
        } else {
            repeated = lam.tail(n - 1).mean();
            single = lam[0];
        }
        min_gap = std::min(min_gap, std::abs(repeated - single));
        rep.lambda_nu.emplace_back(repeated, single);
    }
    rep.samples_used = static_cast<int>(rep.lambda_nu.size());
    rep.two_eigenvalue = all_split && rep.samples_used == static_cast<int>(samples.size());
    rep.multiplicity_n_minus_1 = rep.two_eigenvalue;
    rep.gap_statistic = std::isfinite(min_gap) ? min_gap : 0.0;

    if (rep.lambda_nu.size() >= 2) {
        auto pairs = rep.lambda_nu;
        std::sort(pairs.begin(), pairs.end());
        // Nearest-neighbor regression residual of nu against lambda.
        double ss = 0.0;
        double nu_min = pairs.front().second, nu_max = pairs.front().second;
        const int m = static_cast<int>(pairs.size());
        for (int i = 0; i < m; ++i) {
            nu_min = std::min(nu_min, pairs[i].second);
            nu_max = std::max(nu_max, pairs[i].second);
            double pred;
            if (i == 0)
                pred = pairs[1].second;
            else if (i == m - 1)
                pred = pairs[m - 2].second;
            else {
                const double l0 = pairs[i - 1].first, l1 = pairs[i + 1].first;
                const double w = (l1 - l0) > 1e-300 ? (pairs[i].first - l0) / (l1 - l0) : 0.5;
                pred = (1.0 - w) * pairs[i - 1].second + w * pairs[i + 1].second;
            }
            ss += (pairs[i].second - pred) * (pairs[i].second - pred);
        }
        const double rms = std::sqrt(ss / m);
        const double nu_scale = nu_max - nu_min;
        if (rms <= 1e-9 * (1.0 + std::abs(nu_max)))
            rep.dependence_score = 1.0;
        else if (nu_scale > 0.0)
            rep.dependence_score = std::max(0.0, 1.0 - rms / nu_scale);
        else
            rep.dependence_score = 1.0;
    }
    return rep;
}

} // namespace horoconv
