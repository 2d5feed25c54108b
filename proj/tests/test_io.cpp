#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "horoconv/expression.hpp"
#include "horoconv/mesh.hpp"
#include "horoconv/metric_spec.hpp"
#include "horoconv/report.hpp"

using namespace horoconv;
using Catch::Approx;

TEST_CASE("expression parsing and evaluation", "[io]") {
    Vec y(3);
    y << 0.5, -1.0, 2.0;

    CHECK(Expression::parse("1 + 2*3", 3).eval(y) == Approx(7.0));
    CHECK(Expression::parse("2^3^2", 3).eval(y) == Approx(512.0)); // right associative
    CHECK(Expression::parse("-y1 + y2*y3", 3).eval(y) == Approx(-0.5 - 2.0));
    CHECK(Expression::parse("exp(log(2.5))", 3).eval(y) == Approx(2.5));
    CHECK(Expression::parse("sqrt(y3^2)", 3).eval(y) == Approx(2.0));
    CHECK(Expression::parse("sin(0)*cos(0) + pi/pi", 3).eval(y) == Approx(1.0));
    CHECK(Expression::parse("rr", 3).eval(y) == Approx(y.squaredNorm()));
    CHECK(Expression::parse("log(2/(1+rr))", 3).eval(y) == Approx(std::log(2.0 / (1.0 + y.squaredNorm()))));

    SECTION("position-annotated errors") {
        try {
            Expression::parse("1 + (2*", 3);
            FAIL("expected parse error");
        } catch (const spec_error& e) {
            CHECK(std::string(e.what()).find("position") != std::string::npos);
        }
        CHECK_THROWS_AS(Expression::parse("y4", 3), spec_error);
        CHECK_THROWS_AS(Expression::parse("bogus(1)", 3), spec_error);
        CHECK_THROWS_AS(Expression::parse("1 2", 3), spec_error);
        CHECK_THROWS_AS(Expression::parse("", 3), spec_error);
    }
}

TEST_CASE("pole specs", "[io]") {
    const auto north = parse_pole("last", 3);
    CHECK(north.coords[3] == 1.0);
    const auto p = parse_pole("1,0,0,0", 3);
    CHECK(p.coords[0] == 1.0);
    CHECK_THROWS_AS(parse_pole("1,0", 3), spec_error);
    CHECK_THROWS_AS(parse_pole("a,b,c,d", 3), spec_error);
}

TEST_CASE("report serialization is deterministic and versioned", "[io]") {
    VerificationReport rep;
    rep.spec_echo = "unit-test";
    rep.seed = 42;
    rep.add("alpha", 1.5e-12, 1e-9, 10);
    rep.add("beta", 2.0, 1e-9, 10, "deliberate failure");
    const std::string a = rep.to_string();
    const std::string b = rep.to_string();
    CHECK(a == b);
    CHECK(a.rfind(kReportHeader, 0) == 0);
    CHECK(a.find("overall: fail") != std::string::npos);
    CHECK(a.find("tolerance: 1e-09") != std::string::npos);
    CHECK_FALSE(rep.overall_pass());

    VerificationReport ok;
    ok.spec_echo = "x";
    ok.add("only", 0.0, 1.0, 1);
    CHECK(ok.overall_pass());
    CHECK(ok.to_string().find("timing_ms") == std::string::npos);
    ok.timing_ms = 12.5;
    CHECK(ok.to_string().find("timing_ms") != std::string::npos);
}

TEST_CASE("mesh export", "[io]") {
    SECTION("single triangle OBJ") {
        MeshData m;
        m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
        m.faces = {{0, 1, 2}};
        export_mesh(m, "tri.obj", MeshFormat::OBJ);
        std::ifstream in("tri.obj");
        std::string line;
        int v = 0, f = 0;
        std::string f_line;
        while (std::getline(in, line)) {
            if (line.rfind("v ", 0) == 0) ++v;
            if (line.rfind("f ", 0) == 0) {
                ++f;
                f_line = line;
            }
        }
        CHECK(v == 3);
        CHECK(f == 1);
        CHECK(f_line == "f 1 2 3");
        std::remove("tri.obj");
    }

    SECTION("empty mesh still writes a valid PLY header") {
        MeshData m;
        export_mesh(m, "empty.ply", MeshFormat::PlyAscii);
        std::ifstream in("empty.ply");
        std::string first;
        std::getline(in, first);
        CHECK(first == "ply");
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(all.find("element vertex 0") != std::string::npos);
        CHECK(all.find("element face 0") != std::string::npos);
        std::remove("empty.ply");
    }

    SECTION("bad face indices are rejected") {
        MeshData m;
        m.vertices = {{0, 0, 0}};
        m.faces = {{0, 0, 5}};
        CHECK_THROWS_AS(export_mesh(m, "bad.obj", MeshFormat::OBJ), spec_error);
    }

    SECTION("reparse preserves counts and coordinates") {
        MeshData m = build_revolution({{0.5, 0.0}, {0.7, 0.3}, {0.5, 0.6}}, 8);
        export_mesh(m, "rev.obj", MeshFormat::OBJ);
        const MeshData back = import_mesh("rev.obj");
        REQUIRE(back.vertices.size() == m.vertices.size());
        REQUIRE(back.faces.size() == m.faces.size());
        double worst = 0.0;
        for (size_t i = 0; i < m.vertices.size(); ++i)
            for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(m.vertices[i][c] - back.vertices[i][c]));
        CHECK(worst == 0.0); // %.17g round trips doubles exactly
        export_mesh(back, "rev.ply", MeshFormat::PlyAscii);
        const MeshData again = import_mesh("rev.ply");
        CHECK(again.vertices.size() == m.vertices.size());
        CHECK(again.faces.size() == m.faces.size());
        std::remove("rev.obj");
        std::remove("rev.ply");
    }

    SECTION("byte-identical re-export") {
        MeshData m = build_revolution({{0.4, -0.2}, {0.6, 0.2}}, 6);
        export_mesh(m, "det_a.obj", MeshFormat::OBJ);
        export_mesh(m, "det_b.obj", MeshFormat::OBJ);
        std::ifstream a("det_a.obj"), b("det_b.obj");
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
        std::remove("det_a.obj");
        std::remove("det_b.obj");
    }
}

TEST_CASE("metric specs build fields", "[io]") {
    SECTION("catalog spec") {
        MetricSpec spec;
        spec.kind = MetricSpec::Kind::Catalog;
        spec.entry_name = "geodesic-sphere";
        spec.t = 1.0;
        spec.n = 3;
        const auto built = build_metric(spec);
        REQUIRE(built.entry.has_value());
        SphereSampler s(3);
        CHECK(built.field.rho(s.next(3)) == Approx(1.0));
    }

    SECTION("expression spec reproduces the round metric exponent") {
        MetricSpec spec;
        spec.kind = MetricSpec::Kind::Expression;
        spec.expr_text = "0";
        spec.n = 3;
        const auto built = build_metric(spec);
        SphereSampler s(5);
        for (int i = 0; i < 5; ++i) {
            const SpherePoint x = s.next(3);
            if (!built.field.in_domain(x)) continue;
            CHECK(built.field.rho(x) == 0.0);
        }
    }

    SECTION("horosphere spec cannot build a field") {
        MetricSpec spec;
        spec.kind = MetricSpec::Kind::Catalog;
        spec.entry_name = "horosphere";
        spec.n = 3;
        CHECK_THROWS_AS(build_metric(spec), spec_error);
    }

    SECTION("profile CSV round trip") {
        const auto p = shoot(round_solution_u(-1.0), round_solution_du_ds(-1.0) / std::exp(-1.0),
                             std::exp(-1.0), ShootDirection::Outward, 3, 1, round_sigma_level(3, 1), false,
                             ShootConfig{.span = 2.0});
        write_profile_csv(p, "round_profile.csv");
        const auto q = read_profile_csv("round_profile.csv", 3, 1, round_sigma_level(3, 1), false);
        REQUIRE(q.s.size() == p.s.size());
        double worst = 0.0;
        for (size_t i = 0; i < p.s.size(); ++i) {
            worst = std::max(worst, std::abs(p.u[i] - q.u[i]));
            worst = std::max(worst, std::abs(p.v[i] - q.v[i]));
            worst = std::max(worst, std::abs(p.a[i] - q.a[i]));
        }
        CHECK(worst < 1e-12);

        MetricSpec spec;
        spec.kind = MetricSpec::Kind::RadialProfile;
        spec.profile_path = "round_profile.csv";
        spec.n = 3;
        spec.k = 1;
        const auto built = build_metric(spec);
        REQUIRE(built.profile.has_value());
        // The reconstructed field is the round metric: eigenvalues 1/2.
        const auto pts = sample_domain(built.field, 5, 7);
        for (const auto& x : pts) {
            const Vec lam = schouten(built.field, x).eigenvalues;
            CHECK((lam.array() - 0.5).abs().maxCoeff() < 1e-7);
        }
        std::remove("round_profile.csv");
    }
}

TEST_CASE("exit codes map the exception hierarchy", "[io]") {
    CHECK(exit_code_for(spec_error("x")) == 2);
    CHECK(exit_code_for(domain_violation("x")) == 3);
    CHECK(exit_code_for(eigenvalue_bound_error("x")) == 4);
    CHECK(exit_code_for(solver_singularity("x")) == 5);
    CHECK(exit_code_for(std::runtime_error("x")) == 2);
}
