#pragma once
// Metric specification consumed by the CLI: a named catalog entry with
// parameters, an expression-based exponent in stereographic chart
// coordinates, or a previously exported radial profile.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "horoconv/catalog.hpp"
#include "horoconv/conformal_metric.hpp"
#include "horoconv/errors.hpp"
#include "horoconv/expression.hpp"
#include "horoconv/radial.hpp"

namespace horoconv {

struct MetricSpec {
    enum class Kind { Catalog, Expression, RadialProfile };
    Kind kind = Kind::Catalog;
    int n = 3;
    bool normalized_sigma = false;

    // catalog
    std::string entry_name;
    double r = 1.0;
    double t = 1.0;
    int k = 1;
    double rho0 = 0.0;

    // expression (chart coordinates about the pole; pole defaults to the
    // last coordinate direction)
    std::string expr_text;
    std::string pole_spec = "last";

    // radial profile
    std::string profile_path;

    std::string echo() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::Catalog:
                os << "catalog " << entry_name << " n=" << n;
                if (entry_name == "totally-geodesic") os << " r=" << fmt_double_short(r);
                if (entry_name == "equidistant") os << " r=" << fmt_double_short(r) << " t=" << fmt_double_short(t);
                if (entry_name == "product") os << " k=" << k << " r=" << fmt_double_short(r);
                if (entry_name == "geodesic-sphere") os << " t=" << fmt_double_short(t);
                if (entry_name == "horosphere") os << " rho0=" << fmt_double_short(rho0);
                break;
            case Kind::Expression:
                os << "expression \"" << expr_text << "\" n=" << n << " pole=" << pole_spec;
                break;
            case Kind::RadialProfile:
                os << "radial-profile " << profile_path << " n=" << n;
                break;
        }
        os << " sigma-convention=" << (normalized_sigma ? "normalized" : "raw");
        return os.str();
    }
};

inline SpherePoint parse_pole(const std::string& spec, int n) {
    if (spec.empty() || spec == "last" || spec == "north") {
        Vec v = Vec::Zero(n + 1);
        v[n] = 1.0;
        return SpherePoint(v, n);
    }
    Vec v(n + 1);
    std::istringstream is(spec);
    std::string tok;
    int i = 0;
    while (std::getline(is, tok, ',')) {
        if (i > n) throw spec_error("pole spec has too many coordinates");
        try {
            v[i++] = std::stod(tok);
        } catch (...) {
            throw spec_error("pole spec: cannot parse coordinate '" + tok + "'");
        }
    }
    if (i != n + 1) throw spec_error("pole spec needs n+1 comma-separated coordinates");
    return SpherePoint::normalized(v, n);
}

/// Reconstructs a profile from the CSV written by write_profile_csv; the
/// second derivative is recovered from the stored radial eigenvalue.
inline RadialProfile read_profile_csv(const std::string& path, int n, int k, double c, bool normalized) {
    std::ifstream in(path);
    if (!in) throw spec_error("cannot open profile CSV: " + path);
    RadialProfile p;
    p.n = n;
    p.k = k;
    p.c = c;
    p.normalized = normalized;
    p.provenance = RadialProfile::Provenance::ClosedForm;
    std::string line;
    if (!std::getline(in, line)) throw spec_error("empty profile CSV: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        double col[7];
        for (int i = 0; i < 7; ++i) {
            if (!std::getline(ls, tok, ',')) throw spec_error("profile CSV: short row");
            col[i] = std::stod(tok);
        }
        const double s = col[0], rr = col[1], u = col[2], du_dr = col[3], lam_rad = col[5];
        const double d2u_dr2 = 0.5 * du_dr * du_dr - std::exp(2.0 * u) * lam_rad;
        p.s.push_back(s);
        p.u.push_back(u);
        p.v.push_back(du_dr * rr);
        p.a.push_back(d2u_dr2 * rr * rr + du_dr * rr);
    }
    if (p.s.size() < 2) throw spec_error("profile CSV has fewer than 2 rows");
    return p;
}

struct BuiltMetric {
    ConformalMetricField field;
    std::optional<CatalogEntry> entry; // present for catalog specs
    std::optional<RadialProfile> profile;
};

inline BuiltMetric build_metric(const MetricSpec& spec) {
    require_sphere_dim(spec.n);
    switch (spec.kind) {
        case MetricSpec::Kind::Catalog: {
            CatalogEntry e = make_entry(spec.entry_name, spec.n, spec.r, spec.t, spec.k, spec.rho0);
            if (e.degenerate)
                throw spec_error("the horosphere entry is degenerate (constant Gauss map) and does not "
                                 "induce a metric field");
            ConformalMetricField f = *e.metric;
            return {std::move(f), std::move(e), std::nullopt};
        }
        case MetricSpec::Kind::Expression: {
            const Expression ex = Expression::parse(spec.expr_text, spec.n);
            const SpherePoint pole = parse_pole(spec.pole_spec, spec.n);
            auto chart = std::make_shared<StereoChart>(pole);
            const int n = spec.n;
            auto rho = [ex, chart](const SpherePoint& x) { return ex.eval(chart->to_chart(x)); };
            auto domain = [chart](const SpherePoint& x) {
                return 1.0 - x.coords.dot(chart->pole().coords) > 0.05;
            };
            return {ConformalMetricField(n, rho, domain), std::nullopt, std::nullopt};
        }
        case MetricSpec::Kind::RadialProfile: {
            RadialProfile p = read_profile_csv(spec.profile_path, spec.n, spec.k, 0.0, spec.normalized_sigma);
            Vec pole = Vec::Zero(spec.n + 1);
            pole[spec.n] = 1.0;
            StereoChart chart(SpherePoint(pole, spec.n));
            ConformalMetricField f = radial_field_from_profile(p, chart);
            return {std::move(f), std::nullopt, std::move(p)};
        }
    }
    throw spec_error("unreachable metric spec kind");
}

/// Seeded sphere samples inside the field's domain; rejection sampling with
/// a cap so empty domains fail loudly.
inline std::vector<SpherePoint> sample_domain(const ConformalMetricField& f, int count, uint64_t seed) {
    SphereSampler sampler(seed);
    std::vector<SpherePoint> out;
    int attempts = 0;
    const int max_attempts = count * 2000;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > max_attempts)
            throw domain_violation("sample_domain: rejection sampling failed (domain too small?)");
        SpherePoint x = sampler.next(f.n());
        if (f.in_domain(x)) out.push_back(std::move(x));
    }
    return out;
}

} // namespace horoconv
