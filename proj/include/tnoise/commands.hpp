#pragma once

// Subcommand bodies shared by the CLI and the acceptance suite.

#include "tnoise/config.hpp"
#include "tnoise/experiments.hpp"
#include "tnoise/io.hpp"
#include "tnoise/serialize.hpp"

#include <functional>
#include <map>

namespace tnoise {

struct RunOutcome
{
    std::filesystem::path dir;
    std::vector<Check> checks;
    bool pass() const
    {
        for (const auto& c : checks)
            if (!c.pass)
                return false;
        return true;
    }
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

struct TrendResult
{
    bool strictly_decreasing = true;
    double worst_ratio = 0;   // max y(2N)/y(N) over N >= 8 with 2N on the ladder
    bool ratio_ok = true;
    double slope = 0;
};

inline TrendResult trend(const std::vector<int>& N, const std::vector<double>& y, double ratio_limit)
{
    TrendResult t;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] < y[i - 1]))
            t.strictly_decreasing = false;
    for (std::size_t i = 0; i < N.size(); ++i)
        for (std::size_t j = 0; j < N.size(); ++j)
            if (N[i] >= 8 && N[j] == 2 * N[i]) {
                t.worst_ratio = std::max(t.worst_ratio, y[j] / y[i]);
                if (y[j] > ratio_limit * y[i])
                    t.ratio_ok = false;
            }
    std::vector<double> xs(N.begin(), N.end());
    t.slope = N.size() >= 2 ? loglog_slope(xs, y) : std::numeric_limits<double>::quiet_NaN();
    return t;
}

inline std::string lstr(IVec3 l)
{
    return "(" + std::to_string(l.x) + " " + std::to_string(l.y) + " " + std::to_string(l.z) + ")";
}

// ---------------------------------------------------------------------------

struct FieldIdentityErrors
{
    double direct_vs_apply = 0, forms = 0, symmetry = 0, max_quadratic = -1e300, sum_of_squares = 0,
           stretching_energy = 0, double_lie = 0, key_identity = 0, lap_bound = 0;
};

/// Identities of the corrector on one random real field (and a complex pair for symmetry).
inline FieldIdentityErrors field_identities(const ThetaWeights& th, double nu, int M, Rng& rng)
{
    FieldIdentityErrors e;
    const SpectralField xi = random_real_field(M, rng);
    const SpectralField u = random_complex_field(M, rng);
    const SpectralField w = random_complex_field(M, rng);
    const Corrector S(th, nu, M, PerpForm::frame_sum);
    const Corrector S2(th, nu, M, PerpForm::sine_squared);
    const SpectralField Sxi = S.apply(xi);
    const double ns = l2_norm(Sxi);
    e.direct_vs_apply = l2_norm(Sxi - s_theta_direct(th, nu, xi)) / ns;
    e.forms = l2_norm(Sxi - S2.apply(xi)) / ns;
    e.symmetry = std::abs(inner(S.apply(u), w) - inner(u, S.apply(w))) / (l2_norm(u) * l2_norm(w));
    const double q = inner(xi, Sxi).real();
    e.max_quadratic = q;
    const double sos = transport_sum_of_squares(th, xi);
    const ThetaNorms tn = theta_norms(th);
    e.sum_of_squares = std::abs(2.0 * q + 3.0 * nu / tn.l2_sq * sos) / std::abs(2.0 * q);
    const EnergyJ J = advection_energy_J(th, nu, xi);
    e.stretching_energy = std::abs(J.lhs - J.rhs) / std::abs(J.rhs);
    const SpectralField dl = advection_double_lie(th, xi);
    const SpectralField lap = laplacian(xi);
    e.double_lie = l2_norm(dl - (2.0 / 3.0 * tn.l2_sq) * lap) / l2_norm(dl);
    e.key_identity = l2_norm(s_theta_direct(th, nu, xi, false) - nu * lap) / (nu * l2_norm(lap));
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const Block2 b = S.s_block(i);
        const double col = std::max(std::hypot(b.m[0][0], b.m[1][0]), std::hypot(b.m[0][1], b.m[1][1]));
        e.lap_bound = std::max(e.lap_bound, col / (10.0 * pi * pi * nu * xi.modes().mode(i).norm_sq()));
    }
    return e;
}

inline RunOutcome run_verify_identities(const Config& c)
{
    RunOutcome out;
    out.dir = run_directory(c, "verify-identities");
    const IVec3 l = c.lvec();
    CsvWriter rows(out.dir / "identities.csv",
                   {"N", "gamma", "l", "beta", "defect", "prop54_error", "covariance_max_offdiag"});
    CsvWriter fields(out.dir / "field_identities.csv",
                     {"N", "gamma", "sample", "direct_vs_apply", "forms", "symmetry", "quadratic_form", "sum_of_squares",
                      "stretching_energy", "double_lie", "key_identity", "lap_bound_ratio"});
    double cov_dev = 0, cov_off = 0, frame_err = 0;
    FieldIdentityErrors worst;
    double h1_ratio_margin = std::numeric_limits<double>::infinity();
    for (int N : c.N)
        for (double g : c.gamma) {
            const ThetaWeights th = make_theta(c.theta_kind, N, g);
            const ThetaNorms tn = theta_norms(th);
            const CovarianceCheck cc = check_covariance(th);
            cov_dev = std::max(cov_dev, cc.max_deviation / tn.l2_sq);
            cov_off = std::max(cov_off, cc.max_offdiag / tn.l2_sq);
            if (c.theta_kind == "shell")
                h1_ratio_margin = std::min(h1_ratio_margin, tn.h1_sq / tn.l2_sq - double(N) * N);
            for (const auto& k : th.support) {
                const Frame f = frame(k);
                const Vec3 kh = k.vec() / norm(k.vec());
                const Vec3 cr = cross(f.a1, f.a2);
                frame_err = std::max({frame_err, std::abs(dot(f.a1, kh)), std::abs(dot(f.a2, kh)),
                                      std::abs(norm(f.a1) - 1), std::abs(norm(f.a2) - 1), std::abs(dot(f.a1, f.a2)),
                                      norm(is_plus(k) ? cr - kh : cr + kh)});
            }
            const double defect = limit_defect(th, 1.0, l, c.beta);
            const AngularSumError pe = angular_sum_error(angular_sum(th, l, c.beta), l, c.beta);
            rows.row(N, g, lstr(l), c.beta, defect, pe.total, cc.max_offdiag);

            Rng rng(c.seed, 0x5e1f0000u + std::uint64_t(N) * 131 + std::uint64_t(g * 8));
            for (int s = 0; s < c.samples; ++s) {
                const FieldIdentityErrors e = field_identities(th, c.nu, c.M, rng);
                fields.row(N, g, s, e.direct_vs_apply, e.forms, e.symmetry, e.max_quadratic, e.sum_of_squares, e.stretching_energy,
                           e.double_lie, e.key_identity, e.lap_bound);
                worst.direct_vs_apply = std::max(worst.direct_vs_apply, e.direct_vs_apply);
                worst.forms = std::max(worst.forms, e.forms);
                worst.symmetry = std::max(worst.symmetry, e.symmetry);
                worst.max_quadratic = std::max(worst.max_quadratic, e.max_quadratic);
                worst.sum_of_squares = std::max(worst.sum_of_squares, e.sum_of_squares);
                worst.stretching_energy = std::max(worst.stretching_energy, e.stretching_energy);
                worst.double_lie = std::max(worst.double_lie, e.double_lie);
                worst.key_identity = std::max(worst.key_identity, e.key_identity);
                worst.lap_bound = std::max(worst.lap_bound, e.lap_bound);
            }
        }
    const double tol = c.checks.tolerance;
    auto add = [&](std::string name, double v, double lim, std::string note = "") {
        out.checks.push_back({std::move(name), v, lim, v <= lim, std::move(note)});
    };
    add("covariance_identity", cov_dev, c.checks.covariance_tol, "relative to ||theta||^2");
    add("covariance_offdiag", cov_off, c.checks.covariance_tol, "relative to ||theta||^2");
    add("frame_invariants", frame_err, 1e-14);
    add("direct_vs_apply", worst.direct_vs_apply, tol);
    add("perp_forms_agree", worst.forms, tol);
    add("symmetry", worst.symmetry, 1e-11);
    add("dissipative", worst.max_quadratic, 0.0, "max <xi, S xi>");
    add("sum_of_squares_identity", worst.sum_of_squares, tol);
    add("stretching_energy_identity", worst.stretching_energy, tol);
    add("double_lie_laplacian", worst.double_lie, tol);
    add("key_identity", worst.key_identity, tol);
    add("corrector_mode_bound", worst.lap_bound, 1.0, "||S sigma_l|| / (10 pi^2 nu |l|^2)");
    if (c.theta_kind == "shell")
        out.checks.push_back({"h1_over_l2_at_least_N2", h1_ratio_margin, 0.0, h1_ratio_margin >= 0, "min h1^2/l2^2 - N^2"});

    nlohmann::json rep = {{"metadata", run_metadata(c, "verify-identities")}, {"checks", checks_json(out.checks)}};
    write_json(out.dir / "report.json", rep);
    return out;
}

// ---------------------------------------------------------------------------

inline RunOutcome run_corrector_limit(const Config& c)
{
    RunOutcome out;
    out.dir = run_directory(c, "corrector-limit");
    const IVec3 l = c.lvec();
    CsvWriter rows(out.dir / "limit.csv",
                   {"N", "gamma", "l", "beta", "defect", "prop54_error", "covariance_max_offdiag"});
    CsvWriter extra(out.dir / "limit_detail.csv",
                    {"N", "gamma", "angular_sum_parallel", "angular_sum_orthogonal", "heuristic_ratio", "h1_over_l2"});
    nlohmann::json per_gamma = nlohmann::json::array();
    for (double g : c.gamma) {
        std::vector<double> defects, errs;
        double orth_excess = 0, heur = 0;
        for (int N : c.N) {
            const ThetaWeights th = make_theta(c.theta_kind, N, g);
            const ThetaNorms tn = theta_norms(th);
            const double d = limit_defect(th, 1.0, l, c.beta);
            const AngularSumError pe = angular_sum_error(angular_sum(th, l, c.beta), l, c.beta);
            heur = heuristic_ratio(th, 1.0, l);
            rows.row(N, g, lstr(l), c.beta, d, pe.total, check_covariance(th).max_offdiag);
            extra.row(N, g, pe.parallel, pe.orthogonal, heur, tn.h1_sq / tn.l2_sq);
            defects.push_back(d);
            errs.push_back(pe.total);
            orth_excess = std::max(orth_excess, pe.orthogonal - 10.0 * pe.parallel);
        }
        const TrendResult td = trend(c.N, defects, c.checks.ratio);
        const TrendResult tp = trend(c.N, errs, c.checks.ratio);
        const std::string tag = "gamma=" + fmt_short(g) + " ";
        out.checks.push_back({tag + "defect_strictly_decreasing", double(td.strictly_decreasing), 1, td.strictly_decreasing, ""});
        out.checks.push_back({tag + "defect_halving_ratio", td.worst_ratio, c.checks.ratio, td.ratio_ok, "N >= 8"});
        const bool slope_ok = td.slope >= c.checks.rate_lo && td.slope <= c.checks.rate_hi;
        out.checks.push_back({tag + "defect_loglog_slope", td.slope, c.checks.rate_hi, slope_ok,
                              "window [" + fmt_short(c.checks.rate_lo) + ", " + fmt_short(c.checks.rate_hi) + "]"});
        out.checks.push_back({tag + "angular_sum_strictly_decreasing", double(tp.strictly_decreasing), 1, tp.strictly_decreasing, ""});
        out.checks.push_back({tag + "angular_sum_halving_ratio", tp.worst_ratio, c.checks.ratio, tp.ratio_ok, "N >= 8"});
        out.checks.push_back({tag + "angular_sum_orthogonal_vs_parallel", orth_excess, 0, orth_excess <= 0,
                              "max(orthogonal - 10 * parallel)"});
        const double hrel = std::abs(heur / (-16.0 / 5.0) - 1.0);
        out.checks.push_back({tag + "heuristic_minus_16_5", hrel, c.checks.heuristic_rel, hrel <= c.checks.heuristic_rel,
                              "at N = " + std::to_string(c.N.back())});
        per_gamma.push_back({{"gamma", g}, {"defect_slope", td.slope}, {"angular_sum_slope", tp.slope}});
    }
    const double s5 = sine5_integral();
    out.checks.push_back({"sine5_integral_16_15", std::abs(s5 - 16.0 / 15.0), 1e-14, std::abs(s5 - 16.0 / 15.0) <= 1e-14, ""});
    nlohmann::json rep = {{"metadata", run_metadata(c, "corrector-limit")},
                          {"continuum", {{"sine5_integral", s5}, {"sphere_mean_sine4", sphere_mean_sine4()},
                                         {"angular_sum_continuum", angular_sum_continuum()}}},
                          {"fits", per_gamma},
                          {"checks", checks_json(out.checks)}};
    write_json(out.dir / "report.json", rep);
    return out;
}

// ---------------------------------------------------------------------------

struct PathDiagnostics
{
    double max_bracket_ratio = 0;   // |<xi, Pi_N(sigma . grad xi)>| / (||xi||^2 |k|)
    double max_excess_rate = -std::numeric_limits<double>::infinity();   // sup_t excess(t)/t
    double max_reality = 0;         // relative to ||xi||
    double max_divergence = 0;
};

/// Observer that tracks energy-orthogonality brackets and the a-priori excess
///   ||xi_t||^2 + int_0^t ||grad xi||^2 - ||xi_0||^2.
inline StepObserver path_diagnostics(PathDiagnostics& d, const std::vector<NoiseIndex>& idx, double dt,
                                     int bracket_stride, std::vector<double>* excess = nullptr)
{
    struct State { double e0 = 0, integral = 0, prev = 0; };
    auto st = std::make_shared<State>();
    return [&d, &idx, dt, bracket_stride, excess, st](int step, double t, const SpectralField& xi) {
        const double e = l2_norm_sq(xi);
        const double en = enstrophy(xi);
        if (step == 0) {
            st->e0 = e;
            st->prev = en;
            if (excess)
                excess->push_back(0.0);
        } else {
            st->integral += 0.5 * dt * (st->prev + en);
            st->prev = en;
            const double ex = e + st->integral - st->e0;
            d.max_excess_rate = std::max(d.max_excess_rate, ex / t);
            if (excess)
                excess->push_back(ex);
        }
        if (e > 0) {
            d.max_reality = std::max(d.max_reality, reality_defect(xi) / std::sqrt(e));
            d.max_divergence = std::max(d.max_divergence, divergence_defect(xi) / std::sqrt(e));
        }
        if (step % bracket_stride == 0 && e > 0)
            for (const auto& n : idx)
                for (IVec3 k : {n.k, -n.k}) {
                    const double b = std::abs(transport_bracket(k, n.alpha, xi));
                    d.max_bracket_ratio = std::max(d.max_bracket_ratio, b / (e * std::sqrt(double(k.norm_sq()))));
                }
    };
}

inline StepParams step_params(const Config& c)
{
    StepParams p;
    p.dt = c.dt;
    p.nu = c.nu;
    p.R = c.R;
    p.delta = c.delta;
    p.growth_guard = c.scheme.growth_guard;
    return p;
}

inline RunOutcome run_simulate(const Config& c)
{
    RunOutcome out;
    out.dir = run_directory(c, "simulate");
    const ThetaWeights th = make_theta(c.theta_kind, c.N.front(), c.gamma.front());
    const StepParams p = step_params(c);
    auto prop = std::make_shared<const LinearPropagator>(th, p, c.M);
    struct Result
    {
        TimeSeries ts;
        PathDiagnostics d;
    };
    std::vector<Result> res(c.samples);
    parallel_for(std::size_t(c.samples), c.scheme.threads, [&] {
        auto integ = std::make_shared<Integrator>(th, p, c.M, prop);
        return [&, integ](std::size_t s) {
            const NoiseDriver probe(th, c.M, c.seed, s);
            Result r;
            const auto obs = path_diagnostics(r.d, probe.active(), c.dt, c.checks.bracket_stride);
            const auto ic = initial_condition(c.M, c.seed, int(s % c.ic_family), c.ic_band, c.R0);
            r.ts = simulate_path(*integ, th, ic, c.T, c.seed, s, obs, c.scheme.output_every);
            res[s] = std::move(r);
        };
    });

    CsvWriter ts_csv(out.dir / "timeseries.csv", {"sample", "step", "t", "energy", "enstrophy", "hneg", "cutoff"});
    CsvWriter path_csv(out.dir / "paths.csv", {"sample", "failed", "failure_time", "final_energy", "max_bracket_ratio",
                                               "max_excess_rate", "max_reality_defect", "max_divergence_defect"});
    int failures = 0;
    double worst_bracket = 0, worst_struct = 0;
    for (int s = 0; s < c.samples; ++s) {
        const auto& r = res[s];
        for (const auto& row : r.ts.rows)
            ts_csv.row(s, row.step, row.t, row.energy, row.enstrophy, row.hneg, row.cutoff);
        path_csv.row(s, r.ts.failed, r.ts.failure_time, r.ts.rows.back().energy, r.d.max_bracket_ratio,
                     r.d.max_excess_rate, r.d.max_reality, r.d.max_divergence);
        failures += r.ts.failed;
        worst_bracket = std::max(worst_bracket, r.d.max_bracket_ratio);
        worst_struct = std::max({worst_struct, r.d.max_reality, r.d.max_divergence});
        if (c.scheme.checkpoint) {
            save_field((out.dir / ("final_" + std::to_string(s) + ".tnsf")).string(), r.ts.final_state);
            write_json(out.dir / ("final_" + std::to_string(s) + ".json"), field_to_json(r.ts.final_state));
        }
    }
    out.checks.push_back({"no_integration_failures", double(failures), 0, failures == 0, ""});
    out.checks.push_back({"energy_orthogonality", worst_bracket, c.checks.bracket_tol, worst_bracket <= c.checks.bracket_tol,
                          "max |<xi, Pi_N(sigma_k . grad xi)>| / (||xi||^2 |k|)"});
    out.checks.push_back({"reality_and_divergence", worst_struct, 1e-10, worst_struct <= 1e-10, "relative to ||xi||"});
    nlohmann::json rep = {{"metadata", run_metadata(c, "simulate")},
                          {"theta", {{"kind", c.theta_kind}, {"N", c.N.front()}, {"gamma", c.gamma.front()},
                                     {"active_noise_indices", NoiseDriver(th, c.M, 0).active().size()}}},
                          {"checks", checks_json(out.checks)}};
    if (failures) {
        nlohmann::json f = nlohmann::json::array();
        for (int s = 0; s < c.samples; ++s)
            if (res[s].ts.failed)
                f.push_back({{"sample", s}, {"time", res[s].ts.failure_time}, {"reason", res[s].ts.failure}});
        rep["failures"] = f;
    }
    write_json(out.dir / "report.json", rep);
    return out;
}

// ---------------------------------------------------------------------------

inline ScalingConfig scaling_config(const Config& c)
{
    ScalingConfig s;
    s.M = c.M;
    s.nu = c.nu;
    s.R = c.R;
    s.R0 = c.R0;
    s.delta = c.delta;
    s.dt = c.dt;
    s.T = c.T;
    s.samples = c.samples;
    s.N_ladder = c.N;
    s.gamma = c.gamma.front();
    s.theta_kind = c.theta_kind;
    s.seed = c.seed;
    s.ic_band = c.ic_band;
    s.ic_family = c.ic_family;
    s.threads = c.scheme.threads;
    s.growth_guard = c.scheme.growth_guard;
    return s;
}

inline void write_scaling_csv(const std::filesystem::path& dir, const ScalingReport& rep)
{
    CsvWriter paths(dir / "paths.csv",
                    {"N", "sample", "ic", "l2_distance", "sup_hneg_distance", "tau", "survived", "failed"});
    for (const auto& p : rep.paths)
        paths.row(p.N, p.sample, p.ic, p.l2_distance, p.sup_hneg_distance, p.tau, p.survived, p.failed);
    CsvWriter lad(dir / "ladder.csv", {"N", "l2_q10", "l2_median", "l2_q90", "sup_q10", "sup_median", "sup_q90",
                                       "survival_fraction", "failures"});
    for (const auto& s : rep.ladder)
        lad.row(s.N, s.l2_q10, s.l2_median, s.l2_q90, s.sup_q10, s.sup_median, s.sup_q90, s.survival_fraction,
                s.failures);
}

inline std::vector<Check> scaling_checks(const ScalingReport& rep, double median_ratio)
{
    std::vector<Check> checks;
    const auto& lad = rep.ladder;
    if (lad.size() >= 2) {
        const double r = lad.back().l2_median / lad.front().l2_median;
        checks.push_back({"median_distance_ratio", r, median_ratio, r <= median_ratio,
                          "median L2(0,T;H) distance at largest N over smallest N"});
    }
    bool mono = true;
    for (std::size_t i = 1; i < lad.size(); ++i)
        if (lad[i].survival_fraction < lad[i - 1].survival_fraction)
            mono = false;
    checks.push_back({"survival_non_decreasing", double(mono), 1, mono, "P(tau_R >= T) over the ladder"});
    return checks;
}

inline nlohmann::json ladder_json(const ScalingReport& rep)
{
    nlohmann::json lad = nlohmann::json::array();
    for (const auto& s : rep.ladder)
        lad.push_back({{"N", s.N}, {"l2_median", s.l2_median}, {"sup_median", s.sup_median},
                       {"survival_fraction", s.survival_fraction}, {"failures", s.failures}});
    return lad;
}

inline RunOutcome run_scaling_limit(const Config& c)
{
    RunOutcome out;
    out.dir = run_directory(c, "scaling-limit");
    const ScalingReport rep = scaling_limit_experiment(scaling_config(c));
    write_scaling_csv(out.dir, rep);
    out.checks = scaling_checks(rep, c.checks.median_ratio);
    nlohmann::json j = {{"metadata", run_metadata(c, "scaling-limit")},
                        {"nu1", 1.0 + 0.6 * c.nu},
                        {"initial_condition_norms", rep.ic_norms},
                        {"ladder", ladder_json(rep)},
                        {"checks", checks_json(out.checks)}};
    write_json(out.dir / "report.json", j);
    return out;
}

// ---------------------------------------------------------------------------

inline RunOutcome run_decay(const Config& c)
{
    RunOutcome out;
    out.dir = run_directory(c, "decay");
    const double r0 = small_data_radius(c.C0, c.nu1);
    const SpectralField xi0 = initial_condition(c.M, c.seed, 0, c.ic_band, c.norm_fraction * r0);
    const DecayReport d = decay_check(xi0, c.nu1, c.T, c.dt, c.C0);
    CsvWriter csv(out.dir / "decay.csv", {"t", "norm", "envelope_cubic", "envelope_small_data"});
    double cap_excess = -std::numeric_limits<double>::infinity();
    for (const auto& r : d.rows) {
        csv.row(r.t, r.norm, r.env_cubic, r.env_small);
        cap_excess = std::max(cap_excess, r.env_cubic - envelope_cubic_cap(c.C0, c.nu1));
    }
    out.checks.push_back({"no_integration_failure", double(d.failed), 0, !d.failed, ""});
    out.checks.push_back({"small_data", d.norm0, d.r0, d.small_data, "|xi0| <= (2 pi^2)^{1/4} nu1 / C0"});
    out.checks.push_back({"small_data_margin", d.min_margin_small, 0, d.min_margin_small >= 0, "min(envelope - |xi_t|)"});
    out.checks.push_back({"cubic_margin", d.min_margin_cubic, 0, d.min_margin_cubic >= 0, "min(envelope - |xi_t|)"});
    out.checks.push_back({"cubic_cap", cap_excess, 0, cap_excess <= 0, "envelope <= sqrt(2 pi) nu1 / C0"});
    nlohmann::json j = {{"metadata", run_metadata(c, "decay")},
                        {"norm0", d.norm0}, {"r0", d.r0},
                        {"min_margin_small_data", d.min_margin_small}, {"min_margin_cubic", d.min_margin_cubic},
                        {"checks", checks_json(out.checks)}};
    write_json(out.dir / "report.json", j);
    return out;
}

// ---------------------------------------------------------------------------

inline RunOutcome run_long_horizon(const Config& c)
{
    RunOutcome out;
    out.dir = run_directory(c, "long-horizon");
    LongHorizonConfig lc;
    lc.base = scaling_config(c);
    lc.C0 = c.C0;
    lc.eps = c.eps;
    lc.extra_T = c.extra_T;
    const LongHorizonReport rep = long_horizon_experiment(lc);
    write_scaling_csv(out.dir, rep.scaling);
    CsvWriter csv(out.dir / "continuation.csv", {"N", "sample", "passed", "small_time_found", "small_time",
                                                 "small_norm", "continued", "continuation_failed",
                                                 "min_envelope_margin"});
    int missing = 0, cont_fail = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.continuations) {
        csv.row(r.N, r.sample, r.passed, r.small_time_found, r.small_time, r.small_norm, r.continued,
                r.continuation_failed, r.min_envelope_margin);
        if (r.passed && !r.small_time_found)
            ++missing;
        if (r.continued) {
            cont_fail += r.continuation_failed;
            worst_margin = std::min(worst_margin, r.min_envelope_margin);
        }
    }
    out.checks.push_back({"nu_condition", c.nu, rep.nu_lower_bound, rep.nu_ok, "nu >= (5/3)[C0 R0/(2 pi^2)^{1/4} - 1]"});
    out.checks.push_back({"horizon_condition", rep.tail_bound, c.eps, rep.T_ok, "2 R0 e^{-2 pi^2 nu1 (T-1)} <= eps, T >= 1"});
    out.checks.push_back({"eps_condition", c.eps, rep.eps_cap, rep.eps_ok, "eps <= (2 pi^2)^{1/4} / (2 C0)"});
    out.checks.push_back({"reference_tail", rep.reference_tail_norm, rep.tail_bound,
                          rep.reference_tail_norm <= rep.tail_bound, "||xi||_{L2(T-1,T;H)}"});
    out.checks.push_back({"small_norm_time_exists", double(missing), 0, missing == 0, "passing paths without one"});
    out.checks.push_back({"continuation_survives", double(cont_fail), 0, cont_fail == 0, ""});
    if (std::isfinite(worst_margin))
        out.checks.push_back({"continuation_envelope", worst_margin, 0, worst_margin >= 0, "min(envelope - |xi|)"});
    nlohmann::json j = {{"metadata", run_metadata(c, "long-horizon")},
                        {"nu_lower_bound", rep.nu_lower_bound},
                        {"tail_bound", rep.tail_bound},
                        {"reference_tail_norm", rep.reference_tail_norm},
                        {"ladder", ladder_json(rep.scaling)},
                        {"checks", checks_json(out.checks)}};
    write_json(out.dir / "report.json", j);
    return out;
}

// ---------------------------------------------------------------------------

inline const std::map<std::string, std::function<RunOutcome(const Config&)>>& subcommands()
{
    static const std::map<std::string, std::function<RunOutcome(const Config&)>> table{
        {"verify-identities", run_verify_identities},
        {"corrector-limit", run_corrector_limit},
        {"simulate", run_simulate},
        {"scaling-limit", run_scaling_limit},
        {"decay", run_decay},
        {"long-horizon", run_long_horizon},
    };
    return table;
}

} // namespace tnoise
