#include "wild_euler/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <ostream>

#include "wild_euler/admissibility.hpp"
#include "wild_euler/coords.hpp"
#include "wild_euler/rng.hpp"
#include "wild_euler/svg.hpp"

namespace we {

using ojson = nlohmann::ordered_json;

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + g17(row[i]);
        out += "\n";
    }
    return out;
}

DensityPressure<double> density(const Scenario& s) { return DensityPressure<double>{s.gamma}; }

SubsolutionState explicit_sub(const Scenario& s, const Grid& grid) {
    return build_explicit_subsolution(grid, density(s), s.chi_tilde);
}

double constant_chi(const Scenario& s, const SubsolutionState& sub) {
    if (s.chi) return *s.chi;
    return s.chi_factor * chi_threshold(sub).sup();
}

void add_error(VerificationReport& rep, const Error& e) {
    rep.data["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"verify-subsolution", "chi-window", "symmetry-breaking",
                                                "ci-demo",            "check-identity", "all"};
    return names;
}

Outcome run_check_identity(const Scenario& s) {
    Stopwatch sw;
    Outcome o;
    o.report.name = "identity";
    const auto res = identity_suite(s.identity_samples, s.seed, s.domain.delta, s.domain.R);
    o.report.add("advection_identity", res.max_error < 1e-12, res.max_error, 1e-12, "cylindrical form of <v (x) v, grad phi>");
    o.report.add("roundtrip", res.max_roundtrip <= 1e-14, res.max_roundtrip, 1e-14, "cyl -> cart -> cyl");
    o.report.data["samples"] = res.samples;
    o.report.data["seed"] = s.seed;
    o.seconds = sw.seconds();
    return o;
}

Outcome run_verify_subsolution(const Scenario& s) {
    Stopwatch sw;
    Outcome o;
    VerificationReport& rep = o.report;
    rep.name = "subsolution";
    SubsolutionState sub = explicit_sub(s, s.grid);
    const ThresholdCurve th = chi_threshold(sub);
    const double chi = constant_chi(s, sub);
    const ChiProfile prof = ChiProfile::constant(chi, s.domain.T);
    attach_chi(sub, prof);

    // Closed-form strong residual at random space-time points.
    Rng rng(s.seed);
    double strong = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const double r = rng.uniform(s.domain.delta, s.domain.R), z = rng.uniform(0.0, s.domain.z_period),
                     t = rng.uniform(0.0, s.domain.T);
        strong = std::max(strong, explicit_strong_residual(r, z, t, sub.dp, s.chi_tilde).cwiseAbs().maxCoeff());
    }
    rep.add("strong_residual", strong < 1e-12, strong, 1e-12, "explicit triple solves the linear system");

    ValidateOptions vo;
    vo.n_tests = s.validate.n_tests;
    vo.seed = s.seed;
    vo.residual_tol = s.validate.residual_tol;
    const VerificationReport val = validate_subsolution(sub, prof, vo);
    for (const auto& c : val.checks) rep.checks.push_back(c);

    BumpOptions bo;
    bo.vector_valued = true;
    const auto bumps = random_bumps(s.domain, s.equivalence.n_tests, s.seed + 2, bo);
    EquivalenceOptions eo;
    eo.agreement_tol = s.equivalence.agreement_tol;
    eo.residual_tol = s.equivalence.residual_tol;
    const VerificationReport eq = equivalence_check(sub, bumps, eo);
    for (auto c : eq.checks) {
        c.name = "equivalence." + c.name;
        rep.checks.push_back(c);
    }

    rep.data["chi"] = chi;
    rep.data["threshold_sup"] = th.sup();
    rep.data["validate"] = val.data;
    rep.data["equivalence"] = eq.data;

    // t = 0 slice dump plus sidecar.
    const GridField m0 = sub.m.slice(0), U0 = sub.U.slice(0), q0 = sub.q.slice(0);
    o.files.push_back({"subsolution_m.csv", to_csv(m0, {"m_r", "m_z"})});
    o.files.push_back({"subsolution_U.csv", to_csv(U0, {"U_rr", "U_rz"})});
    o.files.push_back({"subsolution_q.csv", to_csv(q0, {"q"})});
    ojson side;
    side["gamma"] = s.gamma;
    side["chi_tilde"] = to_json(s)["chi_tilde"];
    side["chi"] = chi;
    side["domain"] = to_json(s)["domain"];
    o.files.push_back({"subsolution_sidecar.json", side.dump(2) + "\n"});
    o.seconds = sw.seconds();
    return o;
}

Outcome run_chi_window(const Scenario& s) {
    Stopwatch sw;
    Outcome o;
    VerificationReport& rep = o.report;
    rep.name = "chi_window";
    const DensityPressure<double> dp = density(s);
    const SubsolutionState sub = explicit_sub(s, s.grid);
    const ThresholdCurve th = chi_threshold(sub);

    const ChiProfile prof = integrate_chi(s.chi0, s.domain, dp, s.ode_dt);
    bool mono = true;
    for (std::size_t k = 1; k < prof.chi.size(); ++k)
        if (prof.chi[k] > prof.chi[k - 1] || (prof.chi[k - 1] > 0.0 && !(prof.chi[k] < prof.chi[k - 1]))) mono = false;
    rep.add("monotone_decrease", mono, prof.chi.back(), 0.0, "chi' < 0 while chi > 0");
    rep.data["error_estimate"] = prof.error_estimate;
    if (prof.extinction) rep.data["extinction"] = *prof.extinction;

    // Order against the closed form of u = sqrt(chi): u' = -(A + B u^2).
    {
        const double A = std::sqrt(s.domain.R) * s.gamma *
                         std::max(std::pow(s.domain.R, s.gamma - 2.0), std::pow(s.domain.delta, s.gamma - 2.0));
        const double B = std::sqrt(s.domain.R) / (2.0 * s.domain.delta * s.domain.delta);
        const double k = std::sqrt(A * B), u0 = std::sqrt(s.chi0);
        const double phase = std::atan(u0 * std::sqrt(B / A));
        const double t_ext = phase / k;
        auto exact = [&](double t) {
            const double u = std::sqrt(A / B) * std::tan(phase - k * t);
            return u * u;
        };
        const double t_stop = std::min(s.domain.T, 0.8 * t_ext);
        std::vector<double> errs;
        // the coarsest steps are pre-asymptotic near the tan pole; start the triple at t_stop/64
        const double dts[] = {t_stop / 64.0, t_stop / 128.0, t_stop / 256.0};
        for (double dt : dts) {
            Domain d = s.domain;
            d.T = t_stop;
            const ChiProfile p = integrate_chi(s.chi0, d, dp, dt);
            double e = 0.0;
            for (std::size_t i = 0; i < p.t.size(); ++i) e = std::max(e, std::abs(p.chi[i] - exact(p.t[i])));
            errs.push_back(e);
        }
        const double p1 = std::log2(errs[0] / errs[1]), p2 = std::log2(errs[1] / errs[2]);
        rep.add("rk4_order", std::min(p1, p2) >= 3.7, std::min(p1, p2), 3.7, "fourth-order integrator");
        rep.data["order_errors"] = errs;
        rep.data["closed_form_extinction"] = t_ext;
        if (prof.extinction) {
            const double rel = std::abs(*prof.extinction - t_ext) / t_ext;
            rep.add("extinction_closed_form", rel <= 1e-3, rel, 1e-3, "u = sqrt(A/B) tan(...) vanishes");
        }
    }

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < prof.t.size(); ++k)
        rows.push_back({prof.t[k], prof.chi[k], th.at(prof.t[k]), prof.chi[k] - th.at(prof.t[k])});
    o.files.push_back({"chi_window.csv", csv({"t", "chi", "threshold", "margin"}, rows)});

    Plot plot;
    plot.title = "chi(t) against 2 sup e";
    plot.xlabel = "t";
    plot.ylabel = "chi";
    Series sc{"chi", {}, {}}, st{"threshold", {}, {}};
    for (std::size_t k = 0; k < prof.t.size(); ++k) {
        sc.x.push_back(prof.t[k]);
        sc.y.push_back(prof.chi[k]);
        st.x.push_back(prof.t[k]);
        st.y.push_back(th.at(prof.t[k]));
    }
    plot.series = {sc, st};

    try {
        const FeasibilityWindow w = feasibility_window(prof, th.at);
        const ChiProfile ref = integrate_chi(s.chi0, s.domain, dp, s.ode_dt / 10.0);
        const FeasibilityWindow wr = feasibility_window(ref, th.at);
        const double rel = std::abs(w.T_max - wr.T_max) / wr.T_max;
        rep.add("window_exists", w.T_max > 0.0, w.T_max, 0.0, "chi > 2 sup e near t = 0");
        rep.add("T_max_reference", rel <= 1e-8, rel, 1e-8, "dt/10 reference");
        rep.data["T_max"] = w.T_max;
        rep.data["T_max_reference"] = wr.T_max;
        rep.data["limiting"] = to_string(w.limiting);
        rep.data["margin_min"] = w.margin_min;
        plot.vlines.push_back(w.T_max);

        // Local energy condition for the ODE profile on [0, T_max].
        Domain d = s.domain;
        d.T = w.T_max;
        const ChiProfile short_prof = integrate_chi(s.chi0, d, dp, s.ode_dt);
        const SubsolutionState short_sub = explicit_sub(s, Grid{d, s.grid.nr, s.grid.nz, s.grid.nt});
        const VerificationReport pe = pointwise_energy_condition(short_sub, short_prof);
        for (auto c : pe.checks) {
            c.name = "pointwise." + c.name;
            rep.checks.push_back(c);
        }
        rep.data["pointwise"] = pe.data;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoWindow) throw;
        rep.add("window_exists", false, 0.0, 0.0, "chi > 2 sup e near t = 0");
        add_error(rep, e);
    }
    o.files.push_back({"chi_window.svg", render_svg(plot)});
    o.seconds = sw.seconds();
    return o;
}

std::vector<double> breaking_times(const Scenario& s) {
    const double h = (s.domain.R - s.domain.delta) / s.breaking.nr;
    double d0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= s.breaking.nr; ++i) d0 = std::min(d0, std::abs(s.domain.delta + i * h - s.fan.r0));
    // a node at r0 itself is inside the fan for every t > 0
    const double t_min = std::min(s.domain.T, std::max(2.0 * d0 / s.fan.lambda, s.domain.T / 1000.0));
    std::vector<double> ts{0.0};
    const int n = s.breaking.n_times - 1;
    for (int k = 0; k < n; ++k) ts.push_back(n == 1 ? s.domain.T : t_min + (s.domain.T - t_min) * k / (n - 1));
    return ts;
}

Outcome run_symmetry_breaking(const Scenario& s) {
    Stopwatch sw;
    Outcome o;
    FanParams fp = s.fan;
    fp.T = s.domain.T;
    const BreakingSubsolution bs(s.domain, fp);
    BreakingGrid bg;
    bg.nr = s.breaking.nr;
    bg.n_theta = s.breaking.n_theta;
    bg.times = breaking_times(s);
    o.report = verify_breaking(bs, bg);
    {
        const BurgersStudy st = burgers_weak_study(bs, s.seed + 3);
        double bound = 0.0;
        for (std::size_t i = 0; i < st.n.size(); ++i) bound = std::max(bound, st.errors[i] * st.n[i] * st.n[i]);
        o.report.add("burgers_weak_order", st.fitted_order >= 1.7, st.fitted_order, 1.7, "weak burgers residual O(h^2)");
        o.report.data["burgers_weak"] = {{"n", st.n}, {"errors", st.errors}, {"orders", st.orders}, {"max_err_n2", bound}};
    }

    const double h = (s.domain.R - s.domain.delta) / bg.nr;
    std::vector<std::vector<double>> rows;
    for (double t : bg.times)
        for (int i = 0; i <= bg.nr; ++i) {
            const double r = s.domain.delta + i * h;
            rows.push_back({r, t, bs.f(r, t), bs.energy_closed(r, t), bs.ebar(r, 0.0, t),
                            bs.ebar(r, 0.5 * std::numbers::pi, t)});
        }
    o.files.push_back({"symmetry_breaking.csv", csv({"r", "t", "f", "e", "ebar_0", "ebar_pi2"}, rows)});

    Plot pf;
    pf.title = "rarefaction profile f(r, t)";
    pf.xlabel = "r";
    pf.ylabel = "f";
    const std::size_t stride = std::max<std::size_t>(1, bg.times.size() / 4);
    for (std::size_t k = 0; k < bg.times.size(); k += stride) {
        Series se;
        se.label = "t=" + std::to_string(bg.times[k]).substr(0, 6);
        for (int i = 0; i <= bg.nr; ++i) {
            const double r = s.domain.delta + i * h;
            se.x.push_back(r);
            se.y.push_back(bs.f(r, bg.times[k]));
        }
        pf.series.push_back(se);
    }
    o.files.push_back({"breaking_profiles.svg", render_svg(pf)});

    Plot pd, pv;
    pd.title = "energy deficit";
    pd.xlabel = pv.xlabel = "t";
    pd.ylabel = "deficit";
    pv.title = "theta variance of ebar";
    pv.ylabel = "max variance in fan";
    Series sd{"deficit", {}, {}}, sv{"variance", {}, {}};
    for (const auto& c : o.report.data["curve"]) {
        sd.x.push_back(c["t"].get<double>());
        sd.y.push_back(c["deficit"].get<double>());
        sv.x.push_back(c["t"].get<double>());
        sv.y.push_back(c["theta_variance"].get<double>());
    }
    pd.series = {sd};
    pd.hlines = {0.0};
    pv.series = {sv};
    o.files.push_back({"breaking_deficit.svg", render_svg(pd)});
    o.files.push_back({"breaking_variance.svg", render_svg(pv)});
    o.seconds = sw.seconds();
    return o;
}

Outcome run_ci_demo(const Scenario& s) {
    Stopwatch sw;
    Outcome o;
    VerificationReport& rep = o.report;
    rep.name = "ci_demo";
    // Only the t = 0 slice enters; a short time axis keeps the build cheap.
    const Grid grid{s.domain, s.grid.nr, s.grid.nz, 4};
    const SubsolutionState sub = explicit_sub(s, grid);
    const double chi = s.chi ? *s.chi : s.chi_factor * chi_threshold(explicit_sub(s, s.grid)).sup();
    const LaminateState st = make_laminate_state(sub, chi);
    const IterationTrace tr = run_iteration(st, s.laminate_steps, s.laminate);

    bool strict = true;
    double prev = tr.gap0, min_margin = tr.margin0, max_div = 0.0, max_res = tr.residual0;
    for (const auto& r : tr.steps) {
        if (!(r.gap < prev)) strict = false;
        prev = r.gap;
        min_margin = std::min(min_margin, r.min_margin);
        max_div = std::max(max_div, r.max_div);
        max_res = std::max(max_res, r.residual);
    }
    const int done = static_cast<int>(tr.steps.size());
    rep.add("steps_accepted", done == s.laminate_steps, done, s.laminate_steps, "iteration runs to K steps");
    rep.add("gap_strictly_decreasing", strict, tr.steps.empty() ? 0.0 : tr.gap0 - tr.steps.back().gap, 0.0,
            "each step increases int |m|^2");
    rep.add("divergence_free", max_div <= 1e-13, max_div, 1e-13, "stream-function perturbation");
    rep.add("hull_margin_positive", min_margin > 0.0, min_margin, 0.0, "states stay in the hull interior");
    rep.add("boundary_m_r", boundary_mr_zero(tr.final_state), 0.0, 0.0, "cutoffs vanish at r = delta, R");
    rep.add("weak_residual", max_res <= s.laminate.residual_tol, max_res, s.laminate.residual_tol,
            "H^-1 residual of the linear system");
    rep.add("fitted_c_positive", tr.fitted_c > 0.0, tr.fitted_c, 0.0, "G_{k+1} <= G_k - c G_k^2");

    // Same steps with twice the frequency.
    const ResidualNorm norm(st.grid());
    const double r1 = norm(tr.final_state), r2 = norm(replay_steps(st, tr.steps, 2 * s.laminate.N));
    const double ratio = r2 > 0.0 ? r1 / r2 : std::numeric_limits<double>::infinity();
    rep.add("residual_halves_under_N_doubling", ratio >= 1.5 && ratio <= 2.6, ratio, 1.5, "residual O(1/N)");

    rep.data["chi"] = chi;
    rep.data["N"] = s.laminate.N;
    rep.data["gap0"] = tr.gap0;
    rep.data["residual0"] = tr.residual0;
    rep.data["saturated"] = tr.saturated;
    rep.data["fitted_c"] = tr.fitted_c;
    rep.data["exponent"] = tr.exponent_identifiable ? ojson(tr.exponent) : ojson(nullptr);
    rep.data["residual_constant"] = tr.residual_constant;
    rep.data["replay_residual_2N"] = r2;
    ojson trace = ojson::array();
    std::vector<std::vector<double>> rows;
    rows.push_back({0.0, tr.gap0, tr.residual0, tr.margin0, 0.0, 0.0});
    for (const auto& r : tr.steps) {
        trace.push_back({{"k", r.k},
                         {"gap", r.gap},
                         {"gain", r.gain},
                         {"residual", r.residual},
                         {"min_margin", r.min_margin},
                         {"max_div", r.max_div},
                         {"centre", {r.step.rc, r.step.zc}},
                         {"angle", r.step.angle},
                         {"xi", {r.step.xi(0), r.step.xi(1), r.step.xi(2)}},
                         {"amplitude", r.step.amplitude},
                         {"halvings", r.step.halvings},
                         {"rejected_centres", r.centre_rank}});
        rows.push_back({static_cast<double>(r.k), r.gap, r.residual, r.min_margin, r.max_div, r.step.amplitude});
    }
    rep.data["trace"] = trace;
    o.files.push_back({"ci_demo.csv", csv({"k", "gap", "residual", "min_margin", "max_div", "amplitude"}, rows)});

    Plot p;
    p.title = "energy gap per step";
    p.xlabel = "step";
    p.ylabel = "gap";
    Series sg{"gap", {}, {}};
    for (const auto& row : rows) {
        sg.x.push_back(row[0]);
        sg.y.push_back(row[1]);
    }
    p.series = {sg};
    o.files.push_back({"ci_demo.svg", render_svg(p)});
    o.seconds = sw.seconds();
    return o;
}

namespace {

void print_report(const VerificationReport& rep, std::ostream& out) {
    for (const auto& c : rep.checks)
        out << (c.pass ? "[PASS] " : (c.asserted ? "[FAIL] " : "[INFO] ")) << rep.name << "." << c.name
            << " value=" << g17(c.value) << " tol=" << g17(c.tolerance) << "\n";
}

}  // namespace

int run(const std::string& cmd, const Scenario& s, const RunOptions& opt, std::ostream& out, std::ostream& err) {
    using Fn = Outcome (*)(const Scenario&);
    std::vector<std::pair<std::string, Fn>> plan;
    if (cmd == "check-identity" || cmd == "all") plan.emplace_back("identity", run_check_identity);
    if (cmd == "verify-subsolution" || cmd == "all") plan.emplace_back("subsolution", run_verify_subsolution);
    if (cmd == "chi-window" || cmd == "all") plan.emplace_back("chi_window", run_chi_window);
    if (cmd == "symmetry-breaking" || cmd == "all") plan.emplace_back("symmetry_breaking", run_symmetry_breaking);
    if (cmd == "ci-demo" || cmd == "all") plan.emplace_back("ci_demo", run_ci_demo);
    if (plan.empty()) {
        err << "unknown subcommand: " << cmd << "\n";
        return 2;
    }

    try {
        std::filesystem::create_directories(opt.out_dir);
    } catch (const std::exception& e) {
        err << ojson{{"code", "IoError"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    const std::filesystem::path dir(opt.out_dir);

    bool ok = true;
    ojson timings = ojson::object(), summary_reports = ojson::array();
    std::vector<VerificationReport> reports;
    try {
        for (const auto& [name, fn] : plan) {
            Outcome o;
            try {
                o = fn(s);
            } catch (const Error& e) {
                o.report.name = name;
                o.report.add("completed", false, 0.0, 0.0, "module run");
                add_error(o.report, e);
            }
            o.report.data["scenario"] = to_json(s);
            write_atomic((dir / (name + ".json")).string(), o.report.to_json().dump(2) + "\n");
            for (const auto& f : o.files) write_atomic((dir / f.file).string(), f.content);
            timings[name] = o.seconds;
            ok = ok && o.report.passed();
            summary_reports.push_back({{"name", name}, {"passed", o.report.passed()}});
            if (!opt.json) print_report(o.report, out);
            reports.push_back(std::move(o.report));
        }
        if (cmd == "all") {
            VerificationReport sum;
            sum.name = "summary";
            for (const auto& r : reports) sum.add(r.name, r.passed(), r.passed() ? 1.0 : 0.0, 1.0, "report " + r.name);
            sum.data["reports"] = summary_reports;
            sum.data["scenario"] = to_json(s);
            write_atomic((dir / "summary.json").string(), sum.to_json().dump(2) + "\n");
            reports.push_back(sum);
        }
        write_atomic((dir / "timings.json").string(), timings.dump(2) + "\n");
    } catch (const Error& e) {
        err << ojson{{"code", to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    if (opt.json) out << reports.back().to_json().dump(2) << "\n";
    else out << "overall: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

}  // namespace we
