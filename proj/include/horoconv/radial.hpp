#pragma once
// Radial constant-sigma_k solver on annuli of the flat chart: conformal
// metrics g = e^{2u(|x|)} |dx|^2 whose Schouten eigenvalues split into a
// tangential value of multiplicity n-1 and a radial value of multiplicity
// one. sigma_k is linear in the radial eigenvalue, so the constraint
// sigma_k = c yields a closed-form second-order ODE; integration runs in
// the log-radial variable s = log r where the translation symmetry of the
// problem acts on w = u + s, making (w, dw/ds) an autonomous phase plane.
// Periodic orbits of that plane are the Delaunay-type solutions.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "horoconv/conformal_metric.hpp"
#include "horoconv/correspondence.hpp"
#include "horoconv/errors.hpp"
#include "horoconv/mesh.hpp"
#include "horoconv/report.hpp"
#include "horoconv/sphere.hpp"

namespace horoconv {

struct RadialEigenvalues {
    double lambda_tan; // multiplicity n-1
    double lambda_rad; // multiplicity 1
};

/// Flat-background Schouten eigenvalues of e^{2u}|dx|^2 for radial u;
/// primes are d/dr.
inline RadialEigenvalues radial_eigenvalues(double u, double du_dr, double d2u_dr2, double r) {
    if (!(r > 0.0)) throw domain_violation("radial_eigenvalues: r must be positive");
    const double e = std::exp(-2.0 * u);
    return {e * (-du_dr / r - 0.5 * du_dr * du_dr), e * (-d2u_dr2 + 0.5 * du_dr * du_dr)};
}

/// sigma_k of (n-1 copies of lt, one lr) raw; normalized divides by C(n,k).
inline double radial_sigma(double lt, double lr, int n, int k, bool normalized) {
    const double raw = binomial(n - 1, k) * std::pow(lt, k) + binomial(n - 1, k - 1) * std::pow(lt, k - 1) * lr;
    return normalized ? raw / binomial(n, k) : raw;
}

/// Coefficient of the radial eigenvalue in sigma_k; its vanishing is the
/// singular set of the ODE (possible only for k >= 2, at lambda_tan = 0).
inline double radial_sigma_coefficient(double lt, int n, int k) {
    return binomial(n - 1, k - 1) * std::pow(lt, k - 1);
}

namespace radial_detail {

constexpr double kSingularCoef = 1e-12;

inline double solve_lambda_rad(double lt, int n, int k, double c_raw) {
    const double coef = radial_sigma_coefficient(lt, n, k);
    if (std::abs(coef) < kSingularCoef)
        throw solver_singularity("sigma_k coefficient of the radial eigenvalue vanishes (lambda_tan = 0)");
    return (c_raw - binomial(n - 1, k) * std::pow(lt, k)) / coef;
}

} // namespace radial_detail

/// u'' such that sigma_k of the radial eigenvalues equals c. The constant
/// is interpreted in the given convention.
inline double solve_second_derivative(double u, double du_dr, double r, int n, int k, double c,
                                      bool normalized = false) {
    if (!(r > 0.0)) throw domain_violation("solve_second_derivative: r must be positive");
    if (k < 1 || k > n) throw spec_error("solve_second_derivative: k out of range");
    const double c_raw = normalized ? c * binomial(n, k) : c;
    const double lt = std::exp(-2.0 * u) * (-du_dr / r - 0.5 * du_dr * du_dr);
    const double lr = radial_detail::solve_lambda_rad(lt, n, k, c_raw);
    return 0.5 * du_dr * du_dr - std::exp(2.0 * u) * lr;
}

enum class ShootDirection { Outward, Inward };
enum class ProfileEnd { SpanReached, SingularPoint, StepUnderflow };

struct RadialProfile {
    int n = 0, k = 0;
    double c = 0.0;
    bool normalized = false;
    enum class Provenance { Shot, ClosedForm } provenance = Provenance::Shot;
    // Grid data in s = log r; v = du/ds, a = d2u/ds2.
    std::vector<double> s, u, v, a;
    ProfileEnd end_state = ProfileEnd::SpanReached;
    std::string end_note;

    double s_min() const { return s.front(); }
    double s_max() const { return s.back(); }

    double du_dr(size_t i) const { return v[i] / std::exp(s[i]); }
    double d2u_dr2(size_t i) const {
        const double r = std::exp(s[i]);
        return (a[i] - v[i]) / (r * r);
    }

    RadialEigenvalues eigenvalues_at(size_t i) const {
        return radial_eigenvalues(u[i], du_dr(i), d2u_dr2(i), std::exp(s[i]));
    }

    double sigma_residual_at(size_t i) const {
        const RadialEigenvalues e = eigenvalues_at(i);
        return std::abs(radial_sigma(e.lambda_tan, e.lambda_rad, n, k, normalized) - c);
    }

    // Quintic Hermite interpolation of u using (u, v, a) at the bracketing
    // nodes; v and a evaluate the derivatives of the same polynomial.
    size_t interval_of(double sq) const {
        if (s.size() < 2) throw spec_error("RadialProfile: not enough grid points");
        if (sq < s.front() - 1e-12 || sq > s.back() + 1e-12)
            throw domain_violation("RadialProfile: query outside the stored span");
        const auto it = std::upper_bound(s.begin(), s.end(), sq);
        size_t i = static_cast<size_t>(std::distance(s.begin(), it));
        if (i == 0) i = 1;
        if (i >= s.size()) i = s.size() - 1;
        return i - 1;
    }

    void hermite(double sq, double& uu, double& vv, double& aa) const {
        const size_t i = interval_of(sq);
        const double h = s[i + 1] - s[i];
        const double t = (sq - s[i]) / h;
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        // Quintic Hermite basis (value, slope, curvature at both ends).
        const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
        const double h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
        const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
        const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
        const double h21 = 0.5 * (t3 - 2 * t4 + t5);
        const double d00 = (-30 * t2 + 60 * t3 - 30 * t4) / h;
        const double d10 = (1 - 18 * t2 + 32 * t3 - 15 * t4) / h;
        const double d20 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4) / h;
        const double d01 = (30 * t2 - 60 * t3 + 30 * t4) / h;
        const double d11 = (-12 * t2 + 28 * t3 - 15 * t4) / h;
        const double d21 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4) / h;
        const double e00 = (-60 * t + 180 * t2 - 120 * t3) / (h * h);
        const double e10 = (-36 * t + 96 * t2 - 60 * t3) / (h * h);
        const double e20 = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3) / (h * h);
        const double e01 = (60 * t - 180 * t2 + 120 * t3) / (h * h);
        const double e11 = (-24 * t + 84 * t2 - 60 * t3) / (h * h);
        const double e21 = 0.5 * (6 * t - 24 * t2 + 20 * t3) / (h * h);
        const double c0 = u[i], c1 = v[i] * h, c2 = a[i] * h * h;
        const double c3 = u[i + 1], c4 = v[i + 1] * h, c5 = a[i + 1] * h * h;
        uu = c0 * h00 + c1 * h10 + c2 * h20 + c3 * h01 + c4 * h11 + c5 * h21;
        vv = c0 * d00 + c1 * d10 + c2 * d20 + c3 * d01 + c4 * d11 + c5 * d21;
        aa = c0 * e00 + c1 * e10 + c2 * e20 + c3 * e01 + c4 * e11 + c5 * e21;
    }

    double u_at(double sq) const {
        double uu, vv, aa;
        hermite(sq, uu, vv, aa);
        return uu;
    }
    double du_ds_at(double sq) const {
        double uu, vv, aa;
        hermite(sq, uu, vv, aa);
        return vv;
    }
};

struct ShootConfig {
    double ode_tol = 1e-10;   // embedded-error tolerance (absolute + relative)
    double max_span = 40.0;   // |s - s0| budget
    double span = 8.0;        // requested span in s
    double h_init = 1e-3;
    double h_min = 1e-12;
    double h_max = 0.1;
};

namespace radial_detail {

struct State {
    double u, v;
};

// dU/ds = V, dV/ds = V + V^2/2 - e^{2(U+s)} lambda_rad(U, V, s).
inline State rhs(double s, const State& y, int n, int k, double c_raw) {
    const double lt = std::exp(-2.0 * (y.u + s)) * (-y.v - 0.5 * y.v * y.v);
    const double lr = solve_lambda_rad(lt, n, k, c_raw);
    return {y.v, y.v + 0.5 * y.v * y.v - std::exp(2.0 * (y.u + s)) * lr};
}

} // namespace radial_detail

/// Adaptive Dormand-Prince 5(4) shooting from (u0, du_dr0) at radius r0.
/// Terminates at the requested span, at singular points of the equation, or
/// on step underflow; the end state is recorded on the profile.
inline RadialProfile shoot(double u0, double du_dr0, double r0, ShootDirection direction, int n, int k,
                           double c, bool normalized = false, ShootConfig cfg = {}) {
    require_sphere_dim(n);
    if (k < 1 || k > n) throw spec_error("shoot: k out of range");
    if (!(r0 > 0.0)) throw domain_violation("shoot: r0 must be positive");
    const double c_raw = normalized ? c * binomial(n, k) : c;

    RadialProfile p;
    p.n = n;
    p.k = k;
    p.c = c;
    p.normalized = normalized;

    using radial_detail::State;
    const double s0 = std::log(r0);
    State y{u0, du_dr0 * r0};
    double s = s0;

    // An immediately singular starting point is an error, not a result.
    radial_detail::State f0{0, 0};
    try {
        f0 = radial_detail::rhs(s, y, n, k, c_raw);
    } catch (const solver_singularity&) {
        throw solver_singularity("shoot: singular starting point (sigma_k cannot be solved for u'')");
    }

    const double dir = direction == ShootDirection::Outward ? 1.0 : -1.0;
    const double span = std::min(cfg.span, cfg.max_span);

    auto push = [&](double si, const State& yi, const State& fi) {
        p.s.push_back(si);
        p.u.push_back(yi.u);
        p.v.push_back(yi.v);
        p.a.push_back(fi.v);
    };
    push(s, y, f0);

    // Dormand-Prince 5(4) tableau.
    static const double A[7][6] = {
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double B5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
    static const double B4[7] = {5179.0 / 57600, 0,           7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    double h = cfg.h_init;
    State f_first = f0;
    bool have_first = true;
    while (std::abs(s - s0) < span - 1e-9) {
        h = std::min(h, cfg.h_max);
        h = std::min(h, span - std::abs(s - s0));
        bool singular_hit = false;
        State k_[7], y5{}, y4{};
        bool rejected = true;
        while (rejected) {
            singular_hit = false;
            try {
                k_[0] = have_first ? f_first : radial_detail::rhs(s, y, n, k, c_raw);
                for (int stage = 1; stage < 7; ++stage) {
                    State yi = y;
                    for (int j = 0; j < stage; ++j) {
                        yi.u += dir * h * A[stage][j] * k_[j].u;
                        yi.v += dir * h * A[stage][j] * k_[j].v;
                    }
                    k_[stage] = radial_detail::rhs(s + dir * h * C[stage], yi, n, k, c_raw);
                }
            } catch (const solver_singularity&) {
                singular_hit = true;
            }
            if (singular_hit) {
                h *= 0.5;
                if (h < cfg.h_min) break;
                continue;
            }
            y5 = y;
            y4 = y;
            for (int j = 0; j < 7; ++j) {
                y5.u += dir * h * B5[j] * k_[j].u;
                y5.v += dir * h * B5[j] * k_[j].v;
                y4.u += dir * h * B4[j] * k_[j].u;
                y4.v += dir * h * B4[j] * k_[j].v;
            }
            const double sc_u = cfg.ode_tol * (1.0 + std::max(std::abs(y.u), std::abs(y5.u)));
            const double sc_v = cfg.ode_tol * (1.0 + std::max(std::abs(y.v), std::abs(y5.v)));
            const double eu = (y5.u - y4.u) / sc_u, ev = (y5.v - y4.v) / sc_v;
            const double err = std::sqrt(0.5 * (eu * eu + ev * ev));
            if (err <= 1.0) {
                rejected = false;
                s += dir * h;
                y = y5;
                f_first = k_[6]; // FSAL
                have_first = true;
                push(s, y, f_first);
                const double grow = err > 1e-12 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h *= std::clamp(grow, 0.2, 5.0);
            } else {
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                have_first = true; // k_[0] unchanged on rejection
                if (h < cfg.h_min) break;
            }
        }
        if (singular_hit || h < cfg.h_min) {
            std::ostringstream os;
            if (singular_hit) {
                p.end_state = ProfileEnd::SingularPoint;
                os << "singular point of the equation near s = " << fmt_double_short(s)
                   << " (r = " << fmt_double_short(std::exp(s)) << ")";
            } else {
                p.end_state = ProfileEnd::StepUnderflow;
                os << "step size underflow near s = " << fmt_double_short(s);
            }
            p.end_note = os.str();
            break;
        }
    }
    if (direction == ShootDirection::Inward) {
        std::reverse(p.s.begin(), p.s.end());
        std::reverse(p.u.begin(), p.u.end());
        std::reverse(p.v.begin(), p.v.end());
        std::reverse(p.a.begin(), p.a.end());
    }
    if (p.s.size() < 2) throw solver_singularity("shoot: no steps accepted before termination");
    return p;
}

// ---------------------------------------------------------------------------
// Period detection

struct PeriodResult {
    bool constant = false;            // constant-eigenvalue (sphere/flat) branch
    std::optional<double> period;     // in s
    double drift_per_period = 0.0;    // u(s+P) - u(s), = -P on Delaunay orbits
    double max_mismatch = 0.0;
};

/// Return-map period detection. u itself is never periodic on genuine
/// Delaunay orbits (u + s is), so periodicity is tested on du/ds together
/// with constancy of the per-period drift of u.
inline PeriodResult detect_period(const RadialProfile& p, double tol) {
    PeriodResult out;
    const size_t m = p.s.size();
    if (m < 4) return out;

    // Constant branch: both eigenvalues constant along the profile.
    double lt_min = 1e300, lt_max = -1e300, lr_min = 1e300, lr_max = -1e300;
    for (size_t i = 0; i < m; ++i) {
        const RadialEigenvalues e = p.eigenvalues_at(i);
        lt_min = std::min(lt_min, e.lambda_tan);
        lt_max = std::max(lt_max, e.lambda_tan);
        lr_min = std::min(lr_min, e.lambda_rad);
        lr_max = std::max(lr_max, e.lambda_rad);
    }
    const double scale = 1.0 + std::max(std::abs(lt_max), std::abs(lr_max));
    if (lt_max - lt_min <= 1e-6 * scale && lr_max - lr_min <= 1e-6 * scale) {
        out.constant = true;
        out.period = 0.0;
        return out;
    }

    // Upward crossings of du/ds through its midrange value.
    double v_min = *std::min_element(p.v.begin(), p.v.end());
    double v_max = *std::max_element(p.v.begin(), p.v.end());
    const double level = 0.5 * (v_min + v_max);
    std::vector<double> crossings;
    for (size_t i = 0; i + 1 < m; ++i) {
        if (p.v[i] < level && p.v[i + 1] >= level) {
            double lo = p.s[i], hi = p.s[i + 1];
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (p.du_ds_at(mid) < level ? lo : hi) = mid;
            }
            crossings.push_back(0.5 * (lo + hi));
        }
    }
    if (crossings.size() < 3) return out; // span shorter than two candidate periods

    double period_sum = 0.0;
    for (size_t i = 0; i + 1 < crossings.size(); ++i) period_sum += crossings[i + 1] - crossings[i];
    const double period = period_sum / (crossings.size() - 1);
    if (period > 0.5 * (p.s_max() - p.s_min())) return out;

    // Verify on the overlap: du/ds periodic and u-drift constant.
    const int probes = 200;
    double drift_sum = 0.0;
    std::vector<double> drifts(probes);
    const double s_lo = p.s_min(), s_hi = p.s_max() - period;
    for (int i = 0; i < probes; ++i) {
        const double sq = s_lo + (s_hi - s_lo) * i / (probes - 1);
        drifts[i] = p.u_at(sq + period) - p.u_at(sq);
        drift_sum += drifts[i];
    }
    const double drift = drift_sum / probes;
    double mismatch = 0.0;
    for (int i = 0; i < probes; ++i) {
        const double sq = s_lo + (s_hi - s_lo) * i / (probes - 1);
        mismatch = std::max(mismatch, std::abs(p.du_ds_at(sq + period) - p.du_ds_at(sq)));
        mismatch = std::max(mismatch, std::abs(drifts[i] - drift));
    }
    out.max_mismatch = mismatch;
    if (mismatch <= tol) {
        out.period = period;
        out.drift_per_period = drift;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lift to rotational hypersurfaces

/// Conformal metric field on the spherical band corresponding to the
/// profile's annulus, with analytic derivatives from the interpolant.
/// rho depends on the sphere point only through c = <x, pole>, the cosine
/// of the colatitude from the chart pole; r^2 = (1+c)/(1-c).
inline ConformalMetricField radial_field_from_profile(const RadialProfile& p, const StereoChart& chart,
                                                      double extra_exponent = 0.0) {
    const int n = p.n;
    const Vec pole = chart.pole().coords;
    const double s_lo = p.s_min() + 1e-9, s_hi = p.s_max() - 1e-9;
    auto rho_of_c = [&p, extra_exponent](double cth, double& h0, double& h1, double& h2) {
        // h(r) = u(log r) - log(2/(1+r^2)) + extra; returns value and two
        // derivatives with respect to cth.
        const double r2 = (1.0 + cth) / (1.0 - cth);
        const double r = std::sqrt(r2);
        double uu, vv, aa;
        p.hermite(std::log(r), uu, vv, aa);
        const double hr = uu - std::log(2.0 / (1.0 + r2)) + extra_exponent;
        const double dh_dr = vv / r + 2.0 * r / (1.0 + r2);
        const double d2h_dr2 = (aa - vv) / (r2) + 2.0 * (1.0 - r2) / ((1.0 + r2) * (1.0 + r2));
        const double om = 1.0 - cth;
        const double dr_dc = 1.0 / (r * om * om);
        const double d2r_dc2 = -1.0 / (r * r2 * om * om * om * om) + 2.0 / (r * om * om * om);
        h0 = hr;
        h1 = dh_dr * dr_dc;
        h2 = d2h_dr2 * dr_dc * dr_dc + dh_dr * d2r_dc2;
    };
    auto in_band = [pole, s_lo, s_hi](const Vec& x) {
        const double cth = x.dot(pole);
        if (!(std::abs(cth) < 1.0)) return false;
        const double s = 0.5 * std::log((1.0 + cth) / (1.0 - cth));
        return s >= s_lo && s <= s_hi;
    };
    auto rho = [rho_of_c, pole](const SpherePoint& x) {
        double h0, h1, h2;
        rho_of_c(x.coords.dot(pole), h0, h1, h2);
        return h0;
    };
    auto domain = [in_band](const SpherePoint& x) { return in_band(x.coords); };
    AmbientDerivatives der;
    der.gradient = [rho_of_c, pole](const Vec& x) {
        double h0, h1, h2;
        rho_of_c(x.dot(pole), h0, h1, h2);
        return Vec(h1 * pole);
    };
    der.hessian = [rho_of_c, pole](const Vec& x) {
        double h0, h1, h2;
        rho_of_c(x.dot(pole), h0, h1, h2);
        return Mat(h2 * pole * pole.transpose());
    };
    return ConformalMetricField(n, rho, domain, der);
}

struct LiftedProfile {
    std::vector<HypersurfaceJet> jets;
    std::vector<double> arc;        // hyperbolic arc length along the meridian
    std::vector<double> axis_dist;  // geodesic distance to the rotation axis
    MeshData mesh;
    double dilation_t = 0.0;
    bool horosphere_like = false;   // all kappa within tolerance of -1
    double weingarten_spread = 0.0;
    double s_window_lo = 0.0, s_window_hi = 0.0; // meridian window actually lifted
    bool window_clamped = false;
};

// Beyond |log r| of about 6 the hyperboloid coordinates grow past what the
// finite-difference shape operator can resolve in double precision; jets
// are emitted on the clamped window only (the CSV profile keeps full span).
inline constexpr double kMaxLiftLogRadius = 6.0;

/// Builds jets along a meridian of the lifted rotational hypersurface plus
/// a surface-of-revolution mesh of its Poincare-ball image. Applies the
/// eigenvalue-bound dilation when permitted and records it.
inline LiftedProfile profile_to_hypersurface(const RadialProfile& p, int samples, bool allow_dilation,
                                             int mesh_segments = 48) {
    if (samples < 2) throw spec_error("profile_to_hypersurface: need at least 2 samples");
    const int n = p.n;

    double lam_max = -1e300;
    for (size_t i = 0; i < p.s.size(); ++i) {
        const RadialEigenvalues e = p.eigenvalues_at(i);
        lam_max = std::max(lam_max, std::max(e.lambda_tan, e.lambda_rad));
    }
    double t_dil = 0.0;
    constexpr double margin = 1e-3;
    if (lam_max >= 0.5 - margin) {
        if (!allow_dilation)
            throw eigenvalue_bound_error(
                "profile eigenvalues reach 1/2; rerun with dilation permitted (max lambda = " +
                fmt_double_short(lam_max) + ")");
        t_dil = std::log(lam_max / (0.5 - 1.05 * margin));
    }

    LiftedProfile out;
    out.dilation_t = t_dil;

    Vec pole = Vec::Zero(n + 1);
    pole[n] = 1.0;
    StereoChart chart(SpherePoint(pole, n));
    // Dilation acts on the exponent as u -> u + t/2.
    const ConformalMetricField field = radial_field_from_profile(p, chart, 0.5 * t_dil);

    const double inset = std::max(1e-3 * (p.s_max() - p.s_min()), 2e-2);
    double s_lo = p.s_min() + inset, s_hi = p.s_max() - inset;
    if (s_lo < -kMaxLiftLogRadius || s_hi > kMaxLiftLogRadius) {
        s_lo = std::max(s_lo, -kMaxLiftLogRadius);
        s_hi = std::min(s_hi, kMaxLiftLogRadius);
        out.window_clamped = true;
    }
    if (!(s_lo < s_hi))
        throw domain_violation("profile_to_hypersurface: profile span has no representable window");
    out.s_window_lo = s_lo;
    out.s_window_hi = s_hi;
    const Vec e1 = chart.frame().col(0);

    JetOptions jopt;
    jopt.dict_tol = 1e-5;
    bool all_horo = true;
    std::vector<std::array<double, 2>> meridian;
    for (int i = 0; i < samples; ++i) {
        const double si = s_lo + (s_hi - s_lo) * i / (samples - 1);
        Vec y = Vec::Zero(n); // meridian along the first chart axis
        y[0] = std::exp(si);
        const SpherePoint x = chart.from_chart(y);
        HypersurfaceJet j = jet(field, x, jopt);
        const LorentzVector& phi = j.phi;
        // Distance to the rotation axis span{O, (0,pole)} inside H^{n+1}.
        const double p0 = phi.coords[0];
        const double pz = phi.coords[n + 1];
        out.axis_dist.push_back(std::acosh(std::max(1.0, std::sqrt(p0 * p0 - pz * pz))));
        if (out.jets.empty())
            out.arc.push_back(0.0);
        else {
            const double step = std::acosh(std::max(1.0, -minkowski_inner(out.jets.back().phi, phi)));
            out.arc.push_back(out.arc.back() + step);
        }
        if (j.kappas.size() > 0 && (j.kappas.array() + 1.0).abs().maxCoeff() > 1e-6) all_horo = false;
        const double class_tol = 1e-9 * (1.0 + std::pow(phi.coords.cwiseAbs().maxCoeff(), 2));
        const Vec poin = poincare_projection(phi, class_tol);
        meridian.push_back({poin.dot(e1), poin[n]});
        out.jets.push_back(std::move(j));
    }
    out.horosphere_like = all_horo;

    double wmin = 1e300, wmax = -1e300;
    for (const auto& j : out.jets) {
        if (j.kappas.size() == 0) continue;
        const double w = weingarten_sigma(j.kappas, p.k, p.normalized);
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
    }
    out.weingarten_spread = wmax >= wmin ? wmax - wmin : 0.0;

    out.mesh = build_revolution(meridian, mesh_segments);
    return out;
}

/// CSV export: s, r, u, du_dr, lambda_tan, lambda_rad, sigma_residual.
inline void write_profile_csv(const RadialProfile& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw spec_error("cannot open profile CSV for writing: " + path);
    out << "s,r,u,du_dr,lambda_tan,lambda_rad,sigma_residual\n";
    for (size_t i = 0; i < p.s.size(); ++i) {
        const RadialEigenvalues e = p.eigenvalues_at(i);
        out << fmt_double(p.s[i]) << "," << fmt_double(std::exp(p.s[i])) << "," << fmt_double(p.u[i]) << ","
            << fmt_double(p.du_dr(i)) << "," << fmt_double(e.lambda_tan) << "," << fmt_double(e.lambda_rad)
            << "," << fmt_double(p.sigma_residual_at(i)) << "\n";
    }
    if (!out) throw spec_error("write failure on profile CSV: " + path);
}

// Closed-form reference profiles.

/// Round-sphere solution in the chart: u = t + log(2/(1+r^2)); its
/// eigenvalues are e^{-2t}/2 and sigma_k = sigma_k(e^{-2t}/2, ...).
inline double round_solution_u(double s, double t = 0.0) {
    return t + std::log(2.0) - std::log1p(std::exp(2.0 * s));
}

inline double round_solution_du_ds(double s) {
    const double e2s = std::exp(2.0 * s);
    return -2.0 * e2s / (1.0 + e2s);
}

inline double round_sigma_level(int n, int k, double t = 0.0, bool normalized = false) {
    Vec eig = Vec::Constant(n, 0.5 * std::exp(-2.0 * t));
    return sigma_k(eig, k, normalized);
}

} // namespace horoconv
