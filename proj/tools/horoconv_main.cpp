// Command-line surface: catalog verification, metric analysis, the
// metric-to-hypersurface correspondence with mesh export, invariance
// checking against isometry generators, and the radial sigma_k shooting
// solver.
//
// Exit codes: 0 pass, 2 spec error, 3 domain error, 4 eigenvalue-bound
// error, 5 solver singularity.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "horoconv/catalog.hpp"
#include "horoconv/errors.hpp"
#include "horoconv/invariance.hpp"
#include "horoconv/mesh.hpp"
#include "horoconv/metric_spec.hpp"
#include "horoconv/radial.hpp"
#include "horoconv/report.hpp"

namespace {

using namespace horoconv;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
};

void emit_report(const VerificationReport& rep, const std::string& out_path, bool append = false) {
    if (out_path.empty()) {
        std::cout << rep.to_string();
        return;
    }
    std::ofstream out(out_path, append ? std::ios::binary | std::ios::app : std::ios::binary);
    if (!out) throw spec_error("cannot open report file: " + out_path);
    out << rep.to_string();
    if (append) out << "\n";
}

std::vector<CatalogEntry> sweep_entries(const std::string& name, int n) {
    std::vector<CatalogEntry> out;
    auto family = [&](const std::string& fam) {
        if (fam == "totally-geodesic")
            for (double r : {0.5, 1.0, 2.0}) out.push_back(totally_geodesic(r, n));
        else if (fam == "equidistant")
            for (double t : {0.5, 1.0}) out.push_back(equidistant(1.0, t, n));
        else if (fam == "product")
            for (int k : {1, n - 1})
                for (double r : {0.5, 1.0}) out.push_back(product_hk_snk(k, r, n));
        else if (fam == "geodesic-sphere")
            for (double t : {0.5, 1.0, 2.0}) out.push_back(geodesic_sphere(t, n));
        else if (fam == "horosphere") {
            Vec pole = Vec::Zero(n + 1);
            pole[n] = 1.0;
            out.push_back(horosphere_entry(0.0, SpherePoint(pole, n), n));
            out.push_back(horosphere_entry(0.5, SpherePoint(pole, n), n));
        } else
            throw spec_error("unknown catalog entry name: " + fam);
    };
    if (name == "all")
        for (const char* fam : {"totally-geodesic", "equidistant", "product", "geodesic-sphere", "horosphere"})
            family(fam);
    else
        family(name);
    return out;
}

// ---------------------------------------------------------------------------

struct CommonSpecFlags {
    MetricSpec spec;
    bool have_r = false, have_t = false, have_k = false;

    void attach(CLI::App* cmd, bool allow_profile = true) {
        cmd->add_option("--entry", spec.entry_name, "catalog entry name");
        cmd->add_option("--n", spec.n, "sphere dimension (>= 3)")->capture_default_str();
        cmd->add_option("--r", spec.r, "catalog radius parameter")->each([this](const std::string&) { have_r = true; });
        cmd->add_option("--t", spec.t, "catalog distance parameter")->each([this](const std::string&) { have_t = true; });
        cmd->add_option("--k", spec.k, "catalog product split / sigma index")->each([this](const std::string&) { have_k = true; });
        cmd->add_option("--rho0", spec.rho0, "horosphere support exponent");
        cmd->add_option("--expr", spec.expr_text, "exponent expression in chart coordinates y1..yn");
        cmd->add_option("--pole", spec.pole_spec, "chart pole for --expr: 'last' or n+1 comma-separated coords")
            ->capture_default_str();
        if (allow_profile) cmd->add_option("--profile", spec.profile_path, "radial profile CSV path");
        cmd->add_option_function<std::string>(
               "--sigma-convention",
               [this](const std::string& v) {
                   if (v == "raw")
                       spec.normalized_sigma = false;
                   else if (v == "normalized")
                       spec.normalized_sigma = true;
                   else
                       throw CLI::ValidationError("--sigma-convention must be raw or normalized");
               },
               "sigma_k convention: raw | normalized");
    }

    MetricSpec resolve() {
        int kinds = 0;
        if (!spec.entry_name.empty()) kinds++;
        if (!spec.expr_text.empty()) kinds++;
        if (!spec.profile_path.empty()) kinds++;
        if (kinds != 1)
            throw spec_error("exactly one of --entry, --expr, --profile must be given");
        if (!spec.entry_name.empty())
            spec.kind = MetricSpec::Kind::Catalog;
        else if (!spec.expr_text.empty())
            spec.kind = MetricSpec::Kind::Expression;
        else
            spec.kind = MetricSpec::Kind::RadialProfile;
        return spec;
    }
};

// ---------------------------------------------------------------------------

int cmd_verify_catalog(const std::string& entry, int n, int samples, uint64_t seed, bool have_params,
                       double r, double t, int k, double rho0, const std::string& out, bool timing) {
    Timer timer;
    std::vector<CatalogEntry> entries;
    if (have_params)
        entries.push_back(make_entry(entry, n, r, t, k, rho0));
    else
        entries = sweep_entries(entry, n);

    if (!out.empty()) std::ofstream(out, std::ios::binary); // truncate
    bool all_pass = true;
    for (const auto& e : entries) {
        VerificationReport rep = verify_entry(e, samples, seed);
        if (timing) rep.timing_ms = timer.ms();
        emit_report(rep, out, /*append=*/true);
        if (out.empty()) std::cout << "\n";
        all_pass = all_pass && rep.overall_pass();
    }
    return all_pass ? 0 : 1;
}

int cmd_analyze(CommonSpecFlags& flags, int points, uint64_t seed, const std::string& out, bool timing) {
    Timer timer;
    const MetricSpec spec = flags.resolve();
    BuiltMetric built = build_metric(spec);
    const ConformalMetricField& f = built.field;
    const int n = f.n();
    const auto samples = sample_domain(f, points, seed);

    VerificationReport rep;
    rep.spec_echo = "analyze " + spec.echo();
    rep.seed = seed;

    double lam_lo = 1e300, lam_hi = -1e300;
    std::vector<double> sk_lo(n + 1, 1e300), sk_hi(n + 1, -1e300);
    for (const auto& x : samples) {
        const Vec lam = schouten(f, x).eigenvalues;
        lam_lo = std::min(lam_lo, lam[0]);
        lam_hi = std::max(lam_hi, lam[n - 1]);
        for (int kk = 1; kk <= n; ++kk) {
            const double sk = sigma_k(lam, kk, spec.normalized_sigma);
            sk_lo[kk] = std::min(sk_lo[kk], sk);
            sk_hi[kk] = std::max(sk_hi[kk], sk);
        }
    }
    rep.add_flag("eigenvalue-range", true, points,
                 "min " + fmt_double(lam_lo) + ", max " + fmt_double(lam_hi));
    for (int kk = 1; kk <= n; ++kk)
        rep.add("sigma-" + std::to_string(kk) + "-spread", sk_hi[kk] - sk_lo[kk], 1e300, points,
                "range [" + fmt_double(sk_lo[kk]) + ", " + fmt_double(sk_hi[kk]) + "] (" +
                    (spec.normalized_sigma ? "normalized" : "raw") + ")");

    constexpr double margin = 1e-3;
    if (lam_hi < 0.5 - margin) {
        rep.add_flag("eigenvalue-bound", true, points, "sup lambda < 1/2, no dilation needed");
    } else {
        const double t_needed = std::log(lam_hi / (0.5 - 1.05 * margin));
        rep.add_flag("eigenvalue-bound", false, points,
                     "sup lambda = " + fmt_double(lam_hi) + " >= 1/2; dilate by t = " + fmt_double(t_needed));
    }

    const StructureReport sr = detect_radial_structure(f, samples);
    rep.add_flag("two-eigenvalue-structure", sr.two_eigenvalue, points,
                 sr.two_eigenvalue ? "multiplicity split (n-1, 1)" : "no uniform (n-1,1) split");
    rep.add("structure-gap", -sr.gap_statistic, 0.0, points,
            "min |lambda - nu| = " + fmt_double(sr.gap_statistic));
    rep.add_flag("dependence-score", sr.dependence_score >= 0.99, points,
                 fmt_double(sr.dependence_score) + " (scatter statistic, not a verdict)");
    if (timing) rep.timing_ms = timer.ms();
    emit_report(rep, out);
    return 0;
}

int cmd_correspond(CommonSpecFlags& flags, int grid, uint64_t seed, bool dilate_flag,
                   const std::string& mesh_out, const std::string& jets_out, const std::string& report_out,
                   const std::string& fixed_coords, bool timing) {
    Timer timer;
    const MetricSpec spec = flags.resolve();
    BuiltMetric built = build_metric(spec);
    ConformalMetricField f = built.field;
    const int n = f.n();

    VerificationReport rep;
    rep.spec_echo = "correspond " + spec.echo();
    rep.seed = seed;

    // Eigenvalue bound, with the documented dilation remedy behind --dilate.
    const auto probe = sample_domain(f, 64, seed);
    double lam_hi = -1e300;
    for (const auto& x : probe) lam_hi = std::max(lam_hi, schouten(f, x).eigenvalues[n - 1]);
    constexpr double margin = 1e-3;
    double dil_t = 0.0;
    if (lam_hi >= 0.5 - margin) {
        if (!dilate_flag)
            throw eigenvalue_bound_error("sup lambda = " + fmt_double(lam_hi) +
                                         " >= 1/2; pass --dilate to apply the dilation remedy");
        dil_t = std::log(lam_hi / (0.5 - 1.05 * margin));
        f = f.dilate(dil_t);
        std::string note = "dilated by t = " + fmt_double(dil_t);
        if (std::abs(lam_hi - 0.5) <= 1e-6)
            note += "; input sits at the degenerate lambda = 1/2 boundary (round-metric point collapse)";
        rep.add_flag("dilation-applied", true, 64, note);
    }

    // Fixed coordinates for the 2-parameter slice (indices 2..n-1 of the
    // spatial part; the slice spans ambient axes 0, 1 and n).
    std::vector<double> fixed(std::max(0, n - 2), 0.0);
    if (!fixed_coords.empty()) {
        std::istringstream is(fixed_coords);
        std::string tok;
        size_t i = 0;
        while (std::getline(is, tok, ',') && i < fixed.size()) fixed[i++] = std::stod(tok);
    }
    double fix_norm2 = 0.0;
    for (double c : fixed) fix_norm2 += c * c;
    if (fix_norm2 >= 1.0) throw spec_error("--fix coordinates must have norm < 1");
    const double w = std::sqrt(1.0 - fix_norm2);

    std::ofstream jets;
    if (!jets_out.empty()) {
        jets.open(jets_out, std::ios::binary);
        if (!jets) throw spec_error("cannot open jets CSV: " + jets_out);
        jets << "theta,phi";
        for (int i = 0; i <= n; ++i) jets << ",x" << i;
        jets << ",rho";
        for (int i = 0; i <= n + 1; ++i) jets << ",phi" << i;
        for (int i = 0; i <= n + 1; ++i) jets << ",eta" << i;
        for (int i = 1; i <= n; ++i) jets << ",kappa" << i;
        for (int i = 1; i <= n; ++i) jets << ",lambda" << i;
        jets << "\n";
    }

    MeshData mesh;
    std::vector<std::vector<int>> index_grid(grid + 1, std::vector<int>(grid, -1));
    int jet_count = 0, degenerate_count = 0;
    double max_quadric = 0.0, max_ball_norm = 0.0;
    JetOptions jopt = default_jet_options(f);
    for (int i = 0; i <= grid; ++i) {
        const double th = M_PI * (i + 0.5) / (grid + 2);
        for (int j = 0; j < grid; ++j) {
            const double ph = 2.0 * M_PI * j / grid;
            Vec x = Vec::Zero(n + 1);
            x[0] = w * std::sin(th) * std::cos(ph);
            x[1] = w * std::sin(th) * std::sin(ph);
            for (size_t m = 0; m < fixed.size(); ++m) x[2 + m] = fixed[m];
            x[n] = w * std::cos(th);
            SpherePoint sp = SpherePoint::normalized(x, n);
            if (!f.in_domain(sp)) continue;
            HypersurfaceJet jt = jet(f, sp, jopt);
            ++jet_count;
            if (jt.degenerate) {
                ++degenerate_count;
                continue;
            }
            max_quadric = std::max(max_quadric, jt.quadric_residual_relative());
            const Vec ball = poincare_projection(
                jt.phi, 1e-9 * (1.0 + std::pow(jt.phi.coords.cwiseAbs().maxCoeff(), 2)));
            max_ball_norm = std::max(max_ball_norm, ball.norm());
            index_grid[i][j] = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back({ball[0], ball[1], ball[n]});
            if (jets.is_open()) {
                jets << fmt_double(th) << "," << fmt_double(ph);
                for (int m = 0; m <= n; ++m) jets << "," << fmt_double(sp.coords[m]);
                jets << "," << fmt_double(jt.rho);
                for (int m = 0; m <= n + 1; ++m) jets << "," << fmt_double(jt.phi.coords[m]);
                for (int m = 0; m <= n + 1; ++m) jets << "," << fmt_double(jt.eta.coords[m]);
                for (int m = 0; m < n; ++m) jets << "," << fmt_double(jt.kappas[m]);
                for (int m = 0; m < n; ++m) jets << "," << fmt_double(jt.lambdas[m]);
                jets << "\n";
            }
        }
    }
    mesh.faces = triangulate_grid(index_grid, true);
    if (!mesh_out.empty()) export_mesh(mesh, mesh_out, MeshFormat::OBJ);

    rep.add_flag("jets-built", jet_count > 0, jet_count,
                 std::to_string(jet_count) + " jets, " + std::to_string(degenerate_count) + " degenerate");
    if (degenerate_count > 0)
        rep.add_flag("degenerate-points", true, degenerate_count,
                     "warning: representation collapses at lambda = 1/2 points");
    rep.add("jet-quadric-residual", max_quadric, 1e-9, jet_count);
    rep.add("mesh-inside-unit-ball", max_ball_norm, 1.0, static_cast<int>(mesh.vertices.size()),
            "max Poincare norm");
    if (timing) rep.timing_ms = timer.ms();
    emit_report(rep, report_out);
    return rep.overall_pass() ? 0 : 1;
}

struct GeneratorSpec {
    std::string kind; // rot | boost
    int axis_i = 1, axis_j = 2;
    double value = 0.0;
};

std::vector<GeneratorSpec> parse_generators(const std::string& text) {
    std::vector<GeneratorSpec> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ';')) {
        if (item.empty()) continue;
        std::istringstream fs(item);
        std::string kind, axes, val;
        if (!std::getline(fs, kind, ':') || !std::getline(fs, axes, ':') || !std::getline(fs, val, ':'))
            throw spec_error("generator '" + item + "': expected kind:axes:value");
        GeneratorSpec g;
        g.kind = kind;
        try {
            if (kind == "rot") {
                const auto comma = axes.find(',');
                if (comma == std::string::npos) throw spec_error("");
                g.axis_i = std::stoi(axes.substr(0, comma));
                g.axis_j = std::stoi(axes.substr(comma + 1));
            } else if (kind == "boost") {
                g.axis_i = std::stoi(axes);
            } else
                throw spec_error("generator kind must be rot or boost, got '" + kind + "'");
            g.value = std::stod(val);
        } catch (const spec_error&) {
            throw;
        } catch (...) {
            throw spec_error("generator '" + item + "': cannot parse axes/value");
        }
        out.push_back(g);
    }
    if (out.empty()) throw spec_error("empty generator list");
    return out;
}

LorentzIsometry realize(const GeneratorSpec& g, double scale, int n) {
    if (g.kind == "rot") return LorentzIsometry::rotation(g.axis_i, g.axis_j, g.value * scale, n);
    return LorentzIsometry::boost(g.axis_i, g.value * scale, n);
}

int cmd_invariance(CommonSpecFlags& flags, const std::string& generators, int samples, uint64_t seed,
                   double tol, const std::string& out, bool timing) {
    Timer timer;
    const MetricSpec spec = flags.resolve();
    BuiltMetric built = build_metric(spec);
    const ConformalMetricField& f = built.field;
    const int n = f.n();
    const auto gens = parse_generators(generators);

    // Continuous-symmetry dimension bound: reject oversized generator sets
    // for metrics outside the constant-eigenvalue class.
    const int k_max = n * (n - 1) / 2;
    if (spec.kind != MetricSpec::Kind::Catalog && static_cast<int>(gens.size()) > k_max)
        throw spec_error("generator set claims a " + std::to_string(gens.size()) +
                         "-parameter symmetry, above the bound k_max = n(n-1)/2 = " + std::to_string(k_max) +
                         " for metrics with non-constant Schouten eigenvalues");

    const auto pts = sample_domain(f, samples, seed);
    VerificationReport rep;
    rep.spec_echo = "invariance " + spec.echo() + " generators=" + generators;
    rep.seed = seed;

    static const double kParams[] = {1.0, -1.0, 0.3, -0.3, 0.05, -0.05};
    bool all_agree = true;
    for (size_t gi = 0; gi < gens.size(); ++gi) {
        for (double scale : kParams) {
            const LorentzIsometry t = realize(gens[gi], scale, n);
            const MobiusMap m(t);
            InvarianceResult mr, hr;
            try {
                mr = is_metric_invariant(f, m, pts, tol);
                hr = is_hypersurface_invariant(f, t, pts, tol);
            } catch (const domain_violation&) {
                continue; // image leaves the domain at this parameter
            }
            const bool agree = mr.invariant == hr.invariant;
            all_agree = all_agree && agree;
            std::ostringstream name;
            name << "generator-" << gi << "-scale-" << fmt_double_short(scale);
            std::ostringstream note;
            note << "metric " << (mr.invariant ? "invariant" : "non-invariant") << " (residual "
                 << fmt_double(mr.max_residual) << "), hypersurface "
                 << (hr.invariant ? "invariant" : "non-invariant") << " (residual "
                 << fmt_double(hr.max_residual) << ")";
            rep.add_flag(name.str(), agree, mr.admissible, note.str());
        }
    }
    rep.add_flag("metric-hypersurface-agreement", all_agree, samples);
    if (timing) rep.timing_ms = timer.ms();
    emit_report(rep, out);
    return rep.overall_pass() ? 0 : 1;
}

int cmd_radial(int n, int k, std::optional<double> c_opt, const std::string& branch, double perturb,
               double span, double r0, double ode_tol, bool normalized, bool dilate_flag,
               const std::string& out, const std::string& mesh_out, const std::string& report_out,
               uint64_t seed, bool timing) {
    Timer timer;
    require_sphere_dim(n);
    if (k < 1 || k > n) throw spec_error("radial: need 1 <= k <= n");

    ShootConfig cfg;
    cfg.ode_tol = ode_tol;
    cfg.span = span / 2.0;

    RadialProfile profile;
    double c = 0.0;
    if (branch == "constant") {
        c = c_opt.value_or(round_sigma_level(n, k, 0.0, normalized));
        const double s0 = -span / 2.0;
        const double rr0 = std::exp(s0);
        cfg.span = span;
        profile = shoot(round_solution_u(s0), round_solution_du_ds(s0) / rr0, rr0, ShootDirection::Outward,
                        n, k, c, normalized, cfg);
    } else if (branch == "flat") {
        c = c_opt.value_or(0.0);
        cfg.span = span;
        profile = shoot(0.0, 0.0, r0, ShootDirection::Outward, n, k, c, normalized, cfg);
    } else if (branch == "delaunay") {
        c = c_opt.value_or(round_sigma_level(n, k, 0.0, normalized));
        // Perturb inward off the round solution at its apex s = 0 and shoot
        // both ways so the span brackets the periodic orbit.
        const double u0 = -std::abs(perturb);
        RadialProfile fwd = shoot(u0, -1.0, 1.0, ShootDirection::Outward, n, k, c, normalized, cfg);
        RadialProfile bwd = shoot(u0, -1.0, 1.0, ShootDirection::Inward, n, k, c, normalized, cfg);
        profile = bwd;
        profile.s.insert(profile.s.end(), fwd.s.begin() + 1, fwd.s.end());
        profile.u.insert(profile.u.end(), fwd.u.begin() + 1, fwd.u.end());
        profile.v.insert(profile.v.end(), fwd.v.begin() + 1, fwd.v.end());
        profile.a.insert(profile.a.end(), fwd.a.begin() + 1, fwd.a.end());
        profile.end_state = fwd.end_state;
        profile.end_note = fwd.end_note;
    } else {
        throw spec_error("radial: --branch must be constant, delaunay, or flat");
    }

    if (!out.empty()) write_profile_csv(profile, out);

    VerificationReport rep;
    rep.spec_echo = "radial n=" + std::to_string(n) + " k=" + std::to_string(k) + " c=" + fmt_double_short(c) +
                    " branch=" + branch + (normalized ? " normalized" : " raw");
    rep.seed = seed;

    double max_res = 0.0;
    for (size_t i = 0; i < profile.s.size(); ++i) max_res = std::max(max_res, profile.sigma_residual_at(i));
    rep.add("sigma-residual", max_res, 1e-8, static_cast<int>(profile.s.size()));
    rep.add_flag("profile-end", true, 1,
                 profile.end_state == ProfileEnd::SpanReached
                     ? "span reached"
                     : profile.end_note);

    const PeriodResult pr = detect_period(profile, 1e-6);
    if (pr.constant)
        rep.add_flag("period", true, 1, "degenerate (constant eigenvalues along the profile); period 0");
    else if (pr.period)
        rep.add_flag("period", true, 1,
                     "period " + fmt_double(*pr.period) + " in s, drift per period " +
                         fmt_double(pr.drift_per_period) + ", mismatch " + fmt_double(pr.max_mismatch));
    else
        rep.add_flag("period", branch != "delaunay", 1,
                     "no periodic orbit detected" +
                         std::string(branch == "delaunay" ? " (Delaunay search failed on this branch)" : ""));

    if (!mesh_out.empty()) {
        LiftedProfile lift = profile_to_hypersurface(profile, 64, dilate_flag);
        export_mesh(lift.mesh, mesh_out, MeshFormat::OBJ);
        rep.add("weingarten-spread", lift.weingarten_spread, 1e-6, static_cast<int>(lift.jets.size()),
                "sigma_k((1+kappa)/(2(1-kappa))) spread along the meridian");
        if (lift.dilation_t > 0.0)
            rep.add_flag("dilation-applied", true, 1, "t = " + fmt_double(lift.dilation_t));
        if (lift.horosphere_like)
            rep.add_flag("horosphere-type", true, static_cast<int>(lift.jets.size()),
                         "all principal curvatures at -1 (degenerate Gauss-map limit)");
    }
    if (timing) rep.timing_ms = timer.ms();
    emit_report(rep, report_out);
    return rep.overall_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal metrics on S^n and horospherically convex hypersurfaces in H^{n+1}"};
    app.require_subcommand(1);

    // verify-catalog ---------------------------------------------------------
    auto* vc = app.add_subcommand("verify-catalog", "run the closed-form catalog invariant suite");
    std::string vc_entry = "all";
    int vc_n = 3, vc_samples = 200, vc_k = 1;
    uint64_t vc_seed = 7;
    double vc_r = 1.0, vc_t = 1.0, vc_rho0 = 0.0;
    std::string vc_out;
    bool vc_timing = false;
    vc->add_option("--entry", vc_entry, "entry family or 'all'")->capture_default_str();
    vc->add_option("--n", vc_n)->capture_default_str();
    auto* vc_ro = vc->add_option("--r", vc_r);
    auto* vc_to = vc->add_option("--t", vc_t);
    auto* vc_ko = vc->add_option("--k", vc_k);
    auto* vc_po = vc->add_option("--rho0", vc_rho0);
    vc->add_option("--samples", vc_samples)->capture_default_str();
    vc->add_option("--seed", vc_seed)->capture_default_str();
    vc->add_option("--out", vc_out, "report file (default stdout)");
    vc->add_flag("--timing", vc_timing, "include timing_ms in reports (breaks byte determinism)");

    // analyze ----------------------------------------------------------------
    auto* an = app.add_subcommand("analyze", "eigenvalue statistics, sigma_k values, structure report");
    CommonSpecFlags an_flags;
    an_flags.attach(an);
    int an_points = 100;
    uint64_t an_seed = 7;
    std::string an_out;
    bool an_timing = false;
    an->add_option("--points", an_points)->capture_default_str();
    an->add_option("--seed", an_seed)->capture_default_str();
    an->add_option("--out", an_out);
    an->add_flag("--timing", an_timing);

    // correspond ---------------------------------------------------------------
    auto* co = app.add_subcommand("correspond", "build jets and a Poincare-ball mesh slice");
    CommonSpecFlags co_flags;
    co_flags.attach(co);
    int co_grid = 24;
    uint64_t co_seed = 7;
    bool co_dilate = false, co_timing = false;
    std::string co_mesh, co_jets, co_report, co_fix;
    co->add_option("--grid", co_grid, "angular grid resolution")->capture_default_str();
    co->add_option("--seed", co_seed)->capture_default_str();
    co->add_flag("--dilate", co_dilate, "apply the dilation remedy when sup lambda >= 1/2");
    co->add_option("--mesh-out", co_mesh, "OBJ mesh output path");
    co->add_option("--jets-out", co_jets, "jets CSV output path");
    co->add_option("--report-out", co_report, "report output path");
    co->add_option("--fix", co_fix, "fixed slice coordinates c3,...,c_n (defaults 0)");
    co->add_flag("--timing", co_timing);

    // invariance ---------------------------------------------------------------
    auto* in = app.add_subcommand("invariance", "metric and hypersurface invariance under generators");
    CommonSpecFlags in_flags;
    in_flags.attach(in);
    std::string in_gens;
    int in_samples = 50;
    uint64_t in_seed = 7;
    double in_tol = 1e-7;
    std::string in_out;
    bool in_timing = false;
    in->add_option("--generators", in_gens,
                   "semicolon list: rot:i,j:angle or boost:axis:rapidity (spatial axes 1..n+1)")
        ->required();
    in->add_option("--samples", in_samples)->capture_default_str();
    in->add_option("--seed", in_seed)->capture_default_str();
    in->add_option("--tol", in_tol)->capture_default_str();
    in->add_option("--out", in_out);
    in->add_flag("--timing", in_timing);

    // radial ---------------------------------------------------------------
    auto* ra = app.add_subcommand("radial", "radial sigma_k = c shooting solver");
    int ra_n = 4, ra_k = 2;
    double ra_c = 0.0, ra_perturb = 0.05, ra_span = 16.0, ra_r0 = 1.0, ra_tol = 1e-10;
    bool ra_norm = false, ra_dilate = true, ra_timing = false;
    std::string ra_branch = "constant", ra_out, ra_mesh, ra_report;
    uint64_t ra_seed = 7;
    ra->add_option("--n", ra_n)->capture_default_str();
    ra->add_option("--k", ra_k)->capture_default_str();
    auto* ra_c_opt = ra->add_option("--c", ra_c, "sigma_k level (default: round-metric level)");
    ra->add_option("--branch", ra_branch, "constant | delaunay | flat")->capture_default_str();
    ra->add_option("--perturb", ra_perturb)->capture_default_str();
    ra->add_option("--span", ra_span, "total log-radial span")->capture_default_str();
    ra->add_option("--r0", ra_r0)->capture_default_str();
    ra->add_option("--tol", ra_tol, "integrator tolerance")->capture_default_str();
    ra->add_option_function<std::string>(
          "--sigma-convention",
          [&ra_norm](const std::string& v) {
              if (v == "raw")
                  ra_norm = false;
              else if (v == "normalized")
                  ra_norm = true;
              else
                  throw CLI::ValidationError("--sigma-convention must be raw or normalized");
          },
          "sigma_k convention");
    ra->add_flag("--dilate,!--no-dilate", ra_dilate, "allow the eigenvalue-bound dilation when lifting");
    ra->add_option("--out", ra_out, "profile CSV output");
    ra->add_option("--mesh-out", ra_mesh, "lifted rotational mesh (OBJ)");
    ra->add_option("--report-out", ra_report);
    ra->add_option("--seed", ra_seed)->capture_default_str();
    ra->add_flag("--timing", ra_timing);

    // export-mesh ---------------------------------------------------------------
    auto* em = app.add_subcommand("export-mesh", "convert between OBJ and ascii PLY");
    std::string em_in, em_out, em_format = "obj";
    em->add_option("--in", em_in)->required();
    em->add_option("--out", em_out)->required();
    em->add_option("--format", em_format, "obj | ply")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (vc->parsed()) {
            const bool have_params = vc_ro->count() || vc_to->count() || vc_ko->count() || vc_po->count();
            return cmd_verify_catalog(vc_entry, vc_n, vc_samples, vc_seed, have_params, vc_r, vc_t, vc_k,
                                      vc_rho0, vc_out, vc_timing);
        }
        if (an->parsed()) return cmd_analyze(an_flags, an_points, an_seed, an_out, an_timing);
        if (co->parsed())
            return cmd_correspond(co_flags, co_grid, co_seed, co_dilate, co_mesh, co_jets, co_report, co_fix,
                                  co_timing);
        if (in->parsed())
            return cmd_invariance(in_flags, in_gens, in_samples, in_seed, in_tol, in_out, in_timing);
        if (ra->parsed())
            return cmd_radial(ra_n, ra_k, ra_c_opt->count() ? std::optional<double>(ra_c) : std::nullopt,
                              ra_branch, ra_perturb, ra_span, ra_r0, ra_tol, ra_norm, ra_dilate, ra_out,
                              ra_mesh, ra_report, ra_seed, ra_timing);
        if (em->parsed()) {
            export_mesh(import_mesh(em_in), em_out, mesh_format_from_string(em_format));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 2;
}
