#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "horoconv/radial.hpp"

using namespace horoconv;
using Catch::Approx;

namespace {

RadialProfile shoot_both_ways(double u0, double du_ds0, int n, int k, double c, double half_span,
                              double ode_tol = 1e-10) {
    ShootConfig cfg;
    cfg.span = half_span;
    cfg.ode_tol = ode_tol;
    RadialProfile fwd = shoot(u0, du_ds0, 1.0, ShootDirection::Outward, n, k, c, false, cfg);
    RadialProfile bwd = shoot(u0, du_ds0, 1.0, ShootDirection::Inward, n, k, c, false, cfg);
    RadialProfile p = bwd;
    p.s.insert(p.s.end(), fwd.s.begin() + 1, fwd.s.end());
    p.u.insert(p.u.end(), fwd.u.begin() + 1, fwd.u.end());
    p.v.insert(p.v.end(), fwd.v.begin() + 1, fwd.v.end());
    p.a.insert(p.a.end(), fwd.a.begin() + 1, fwd.a.end());
    return p;
}

} // namespace

TEST_CASE("radial eigenvalue formulas", "[radial]") {
    SECTION("flat metric: both eigenvalues vanish") {
        const auto e = radial_eigenvalues(0.0, 0.0, 0.0, 1.3);
        CHECK(e.lambda_tan == 0.0);
        CHECK(e.lambda_rad == 0.0);
    }

    SECTION("round metric in the chart: both 1/2 at every radius") {
        for (double r : {0.3, 1.0, 2.7}) {
            const double u = std::log(2.0 / (1.0 + r * r));
            const double du = -2.0 * r / (1.0 + r * r);
            const double d2u = -2.0 * (1.0 - r * r) / std::pow(1.0 + r * r, 2);
            const auto e = radial_eigenvalues(u, du, d2u, r);
            CHECK(e.lambda_tan == Approx(0.5).margin(1e-14));
            CHECK(e.lambda_rad == Approx(0.5).margin(1e-14));
        }
    }

    SECTION("dilated round metric: both e^{-2t}/2") {
        const double t = 0.8, r = 1.4;
        const double u = t + std::log(2.0 / (1.0 + r * r));
        const double du = -2.0 * r / (1.0 + r * r);
        const double d2u = -2.0 * (1.0 - r * r) / std::pow(1.0 + r * r, 2);
        const auto e = radial_eigenvalues(u, du, d2u, r);
        CHECK(e.lambda_tan == Approx(0.5 * std::exp(-2 * t)).margin(1e-14));
        CHECK(e.lambda_rad == Approx(0.5 * std::exp(-2 * t)).margin(1e-14));
    }

    CHECK_THROWS_AS(radial_eigenvalues(0, 0, 0, -1.0), domain_violation);
}

TEST_CASE("radial eigenvalues agree with the chart pipeline", "[radial]") {
    // Mandated independent oracle: the full finite-difference Schouten
    // pipeline on a radial field built without any radial-module helpers.
    const int n = 3;
    Vec pole_v = Vec::Zero(n + 1);
    pole_v[n] = 1.0;
    const SpherePoint pole(pole_v, n);
    auto chart = std::make_shared<StereoChart>(pole);

    auto u_fn = [](double r) { return 0.25 * std::sin(r) - 0.1 * r; };
    auto du_fn = [](double r) { return 0.25 * std::cos(r) - 0.1; };
    auto d2u_fn = [](double r) { return -0.25 * std::sin(r); };

    ConformalMetricField f(
        n,
        [chart, u_fn](const SpherePoint& x) {
            const double r = chart->to_chart(x).norm();
            return u_fn(r) - std::log(2.0 / (1.0 + r * r));
        },
        [chart](const SpherePoint& x) {
            const double denom = 1.0 - x.coords.dot(chart->pole().coords);
            if (denom < 0.2) return false;
            const double r = chart->to_chart(x).norm();
            return r > 0.3 && r < 2.5;
        });

    SphereSampler s(29);
    int checked = 0;
    double worst = 0.0;
    while (checked < 50) {
        const SpherePoint x = s.next(n);
        if (!f.in_domain(x)) continue;
        const double r = chart->to_chart(x).norm();
        const auto re = radial_eigenvalues(u_fn(r), du_fn(r), d2u_fn(r), r);
        Vec expected(n);
        expected << re.lambda_tan, re.lambda_tan, re.lambda_rad;
        std::sort(expected.data(), expected.data() + n);
        const Vec got = schouten(f, x).eigenvalues;
        worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff());
        ++checked;
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("solving sigma_k = c for the second derivative", "[radial]") {
    SECTION("flat data with c = 0") {
        CHECK(solve_second_derivative(0.0, 0.0, 1.0, 3, 1, 0.0) == Approx(0.0).margin(1e-15));
    }

    SECTION("substitute-back residual vanishes") {
        SphereSampler s(31);
        for (int trial = 0; trial < 40; ++trial) {
            const int n = 3 + trial % 3;
            const int k = 1 + trial % n;
            const double u = s.uniform(-0.5, 0.5), du = s.uniform(-1.0, -0.1), r = s.uniform(0.5, 2.0);
            const double c = s.uniform(0.2, 2.0);
            double d2u;
            try {
                d2u = solve_second_derivative(u, du, r, n, k, c);
            } catch (const solver_singularity&) {
                continue;
            }
            const auto e = radial_eigenvalues(u, du, d2u, r);
            CHECK(std::abs(radial_sigma(e.lambda_tan, e.lambda_rad, n, k, false) - c) < 1e-12 * (1 + c));
        }
    }

    SECTION("round metric data recovers the analytic second derivative") {
        const int n = 4, k = 2;
        const double c = round_sigma_level(n, k);
        for (double r : {0.5, 1.0, 2.0}) {
            const double u = std::log(2.0 / (1.0 + r * r));
            const double du = -2.0 * r / (1.0 + r * r);
            const double expected = -2.0 * (1.0 - r * r) / std::pow(1.0 + r * r, 2);
            CHECK(solve_second_derivative(u, du, r, n, k, c) == Approx(expected).margin(1e-12));
        }
    }

    SECTION("degenerate coefficient is a singular point") {
        // lambda_tan = 0 with k >= 2 kills the coefficient of lambda_rad.
        CHECK_THROWS_AS(solve_second_derivative(0.0, 0.0, 1.0, 3, 2, 1.0), solver_singularity);
    }

    SECTION("normalized convention rescales c") {
        const int n = 4, k = 2;
        const double raw = solve_second_derivative(0.1, -0.4, 1.2, n, k, 1.5, false);
        const double norm = solve_second_derivative(0.1, -0.4, 1.2, n, k, 1.5 / binomial(n, k), true);
        CHECK(raw == Approx(norm).margin(1e-13));
    }
}

TEST_CASE("shooting preserves exact solutions", "[radial]") {
    SECTION("round branch stays on the closed form over span 4") {
        for (auto [n, k] : {std::pair{4, 2}, std::pair{3, 1}}) {
            const double c = round_sigma_level(n, k);
            const double s0 = -2.0, r0 = std::exp(s0);
            ShootConfig cfg;
            cfg.span = 4.0;
            const auto p = shoot(round_solution_u(s0), round_solution_du_ds(s0) / r0, r0,
                                 ShootDirection::Outward, n, k, c, false, cfg);
            REQUIRE(p.end_state == ProfileEnd::SpanReached);
            double dev = 0.0, res = 0.0;
            for (size_t i = 0; i < p.s.size(); ++i) {
                dev = std::max(dev, std::abs(p.u[i] - round_solution_u(p.s[i])));
                res = std::max(res, p.sigma_residual_at(i));
            }
            CHECK(dev <= 1e-8);
            CHECK(res <= 1e-8);
        }
    }

    SECTION("flat start with c = 0 stays flat") {
        const auto p = shoot(0.0, 0.0, 1.0, ShootDirection::Outward, 3, 1, 0.0);
        for (double uu : p.u) CHECK(uu == Approx(0.0).margin(1e-12));
        const auto pr = detect_period(p, 1e-6);
        CHECK(pr.constant);
        CHECK(pr.period.value() == 0.0);
    }

    SECTION("singular start is an error") {
        CHECK_THROWS_AS(shoot(0.0, 0.0, 1.0, ShootDirection::Outward, 3, 2, 0.0), solver_singularity);
    }
}

TEST_CASE("period detection", "[radial]") {
    SECTION("synthetic sine profile has period 3") {
        RadialProfile p;
        p.n = 4;
        p.k = 1;
        p.c = 0.0;
        const double om = 2.0 * M_PI / 3.0;
        for (int i = 0; i <= 4000; ++i) {
            const double s = -6.0 + 12.0 * i / 4000.0;
            p.s.push_back(s);
            p.u.push_back(0.1 * std::sin(om * s));
            p.v.push_back(0.1 * om * std::cos(om * s));
            p.a.push_back(-0.1 * om * om * std::sin(om * s));
        }
        const auto pr = detect_period(p, 1e-6);
        REQUIRE(pr.period.has_value());
        CHECK(*pr.period == Approx(3.0).margin(1e-6));
        CHECK(pr.drift_per_period == Approx(0.0).margin(1e-9));
    }

    SECTION("Delaunay orbit at n=5, k=2: periodic with unit drift rate") {
        const int n = 5, k = 2;
        const double c = round_sigma_level(n, k);
        const auto p = shoot_both_ways(-0.15, -1.0, n, k, c, 15.0);
        const auto pr = detect_period(p, 1e-6);
        REQUIRE(pr.period.has_value());
        CHECK(*pr.period > 1.0);
        // u + s is the periodic quantity, so u drifts by exactly -P.
        CHECK(pr.drift_per_period == Approx(-*pr.period).margin(1e-6));
        double res = 0.0;
        for (size_t i = 0; i < p.s.size(); ++i) res = std::max(res, p.sigma_residual_at(i));
        CHECK(res <= 1e-8);
    }

    SECTION("period is reproducible from two starts on the same orbit") {
        const int n = 5, k = 2;
        const double c = round_sigma_level(n, k);
        const auto p1 = shoot_both_ways(-0.15, -1.0, n, k, c, 15.0);
        const auto r1 = detect_period(p1, 1e-6);
        REQUIRE(r1.period.has_value());
        // Second start: state sampled further along the same trajectory.
        const double s_mid = 2.0;
        double u_mid, v_mid, a_mid;
        p1.hermite(s_mid, u_mid, v_mid, a_mid);
        ShootConfig cfg;
        cfg.span = 15.0;
        RadialProfile fwd = shoot(u_mid, v_mid / std::exp(s_mid), std::exp(s_mid), ShootDirection::Outward,
                                  n, k, c, false, cfg);
        RadialProfile bwd = shoot(u_mid, v_mid / std::exp(s_mid), std::exp(s_mid), ShootDirection::Inward,
                                  n, k, c, false, cfg);
        RadialProfile p2 = bwd;
        p2.s.insert(p2.s.end(), fwd.s.begin() + 1, fwd.s.end());
        p2.u.insert(p2.u.end(), fwd.u.begin() + 1, fwd.u.end());
        p2.v.insert(p2.v.end(), fwd.v.begin() + 1, fwd.v.end());
        p2.a.insert(p2.a.end(), fwd.a.begin() + 1, fwd.a.end());
        const auto r2 = detect_period(p2, 1e-6);
        REQUIRE(r2.period.has_value());
        CHECK(std::abs(*r1.period - *r2.period) < 1e-4);
    }

    SECTION("period is stable under integrator tolerance halving") {
        const int n = 5, k = 2;
        const double c = round_sigma_level(n, k);
        const auto p1 = shoot_both_ways(-0.1, -1.0, n, k, c, 14.0, 1e-10);
        const auto p2 = shoot_both_ways(-0.1, -1.0, n, k, c, 14.0, 0.5e-10);
        const auto r1 = detect_period(p1, 1e-6), r2 = detect_period(p2, 1e-6);
        REQUIRE(r1.period.has_value());
        REQUIRE(r2.period.has_value());
        CHECK(std::abs(*r1.period - *r2.period) < 1e-4);
    }

    SECTION("no false period on the k = n/2 degenerate case") {
        // At n = 2k the phase-plane acceleration has a fixed sign, so
        // perturbed round starts cannot recur; the detector must not
        // fabricate a period.
        const int n = 4, k = 2;
        const double c = round_sigma_level(n, k);
        ShootConfig cfg;
        cfg.span = 20.0;
        const auto p = shoot(-0.05, -1.0, 1.0, ShootDirection::Outward, n, k, c, false, cfg);
        const auto pr = detect_period(p, 1e-6);
        CHECK_FALSE(pr.constant);
        CHECK_FALSE(pr.period.has_value());
        double res = 0.0;
        for (size_t i = 0; i < p.s.size(); ++i) res = std::max(res, p.sigma_residual_at(i));
        CHECK(res <= 1e-8);
    }
}

TEST_CASE("lifting profiles to rotational hypersurfaces", "[radial]") {
    SECTION("round branch lifts to a geodesic sphere") {
        const int n = 3, k = 1;
        const double t = 1.0;
        const double c = round_sigma_level(n, k, t);
        const double s0 = -1.5, r0 = std::exp(s0);
        ShootConfig cfg;
        cfg.span = 3.0;
        const auto p = shoot(round_solution_u(s0, t), round_solution_du_ds(s0) / r0, r0,
                             ShootDirection::Outward, n, k, c, false, cfg);
        const auto lift = profile_to_hypersurface(p, 20, true);
        CHECK(lift.dilation_t == 0.0);
        CHECK(lift.weingarten_spread < 1e-6);
        CHECK_FALSE(lift.horosphere_like);
        for (const auto& j : lift.jets) {
            CHECK(j.quadric_residual_relative() < 1e-9);
            for (int i = 0; i < n; ++i) CHECK(j.kappas[i] == Approx(-1.0 / std::tanh(t)).margin(1e-6));
        }
        CHECK(lift.mesh.vertices.size() == 20 * 48);
        for (const auto& v : lift.mesh.vertices)
            CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] < 1.0);
    }

    SECTION("flat branch lifts to horosphere-type jets") {
        const auto p = shoot(0.0, 0.0, 1.0, ShootDirection::Outward, 4, 1, 0.0);
        const auto lift = profile_to_hypersurface(p, 12, true);
        CHECK(lift.horosphere_like);
        for (const auto& j : lift.jets)
            for (int i = 0; i < 4; ++i) CHECK(j.kappas[i] == Approx(-1.0).margin(1e-6));
    }

    SECTION("round branch at lambda = 1/2 needs the dilation remedy") {
        const int n = 3, k = 1;
        const double c = round_sigma_level(n, k);
        const double s0 = -1.0, r0 = std::exp(s0);
        ShootConfig cfg;
        cfg.span = 2.0;
        const auto p = shoot(round_solution_u(s0), round_solution_du_ds(s0) / r0, r0,
                             ShootDirection::Outward, n, k, c, false, cfg);
        CHECK_THROWS_AS(profile_to_hypersurface(p, 10, false), eigenvalue_bound_error);
        const auto lift = profile_to_hypersurface(p, 10, true);
        CHECK(lift.dilation_t > 0.0);
        CHECK(lift.weingarten_spread < 1e-6);
    }

    SECTION("periodic branch: embedded meridian repeats with the detected period") {
        const int n = 5, k = 2;
        const double c = round_sigma_level(n, k);
        // Small orbit around the cylinder equilibrium keeps the period short
        // enough for the representable lift window.
        const double w0 = -std::log(2.0 * c) / 4.0;
        const auto p = shoot_both_ways(w0 + 0.05, -1.0, n, k, c, 8.0);
        const auto pr = detect_period(p, 1e-6);
        REQUIRE(pr.period.has_value());
        const double period = *pr.period;

        const auto lift = profile_to_hypersurface(p, 160, true);
        REQUIRE(lift.dilation_t > 0.0); // cylinder-side eigenvalues exceed 1/2
        CHECK(lift.weingarten_spread < 1e-6);

        // axis distance as a function of s must repeat with period P.
        const double s_lo = lift.s_window_lo, s_hi = lift.s_window_hi;
        REQUIRE(s_hi - s_lo > period);
        auto axis_at = [&](double sq) {
            const double f = (sq - s_lo) / (s_hi - s_lo) * (lift.jets.size() - 1);
            const int i = std::min<int>(static_cast<int>(f), static_cast<int>(lift.jets.size()) - 2);
            const double w = f - i;
            return (1.0 - w) * lift.axis_dist[i] + w * lift.axis_dist[i + 1];
        };
        double worst = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double sq = s_lo + (s_hi - period - s_lo) * i / 40.0;
            worst = std::max(worst, std::abs(axis_at(sq + period) - axis_at(sq)));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("profile CSV export carries the stated columns", "[radial]") {
    const auto p = shoot(0.0, 0.0, 1.0, ShootDirection::Outward, 3, 1, 0.0);
    const std::string path = "test_profile_out.csv";
    write_profile_csv(p, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "s,r,u,du_dr,lambda_tan,lambda_rad,sigma_residual");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<int>(p.s.size()));
    std::remove(path.c_str());
}
