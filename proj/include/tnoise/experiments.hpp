#pragma once

// Deterministic reference solver, decay envelopes and the scaling-limit /
// long-horizon Monte-Carlo experiments.

#include "tnoise/parallel.hpp"
#include "tnoise/sde.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

namespace tnoise {

struct DeterministicRun
{
    TimeSeries series;
    std::vector<SpectralField> states;   // every step, only when requested
};

/// Galerkin NSE with viscosity nu1 and no noise: the theta-empty path of the SDE integrator.
inline DeterministicRun deterministic_solve(double nu1, const SpectralField& xi0, double T, double dt,
                                            bool keep_states = false, double growth_guard = 1e8)
{
    StepParams p;
    p.dt = dt;
    p.viscosity = nu1;
    p.growth_guard = growth_guard;
    const ThetaWeights none;
    Integrator integ(none, p, xi0.M());
    DeterministicRun run;
    StepObserver obs;
    if (keep_states)
        obs = [&](int, double, const SpectralField& xi) { run.states.push_back(xi); };
    run.series = simulate_path(integ, none, xi0, T, 0, 0, obs);
    return run;
}

// ---- decay envelopes ----

/// [(|xi0|^-4 - C0^4/(4 pi^2 nu1^4)) e^{8 pi^2 nu1 t} + C0^4/(4 pi^2 nu1^4)]^{-1/4}
inline double envelope_cubic(double norm0, double nu1, double C0, double t)
{
    const double c = std::pow(C0, 4) / (4.0 * pi * pi * std::pow(nu1, 4));
    return std::pow((std::pow(norm0, -4) - c) * std::exp(8.0 * pi * pi * nu1 * t) + c, -0.25);
}

/// 2^{1/4} |xi0| e^{-2 pi^2 nu1 t}; nu1 = 1 is the small-data statement.
inline double envelope_small_data(double norm0, double nu1, double t)
{
    return std::pow(2.0, 0.25) * norm0 * std::exp(-2.0 * pi * pi * nu1 * t);
}

/// Small-data radius (2 pi^2)^{1/4} nu1 / C0.
inline double small_data_radius(double C0, double nu1 = 1.0) { return std::pow(2.0 * pi * pi, 0.25) * nu1 / C0; }

/// Uniform bound sqrt(2 pi) nu1 / C0 of the cubic-inequality envelope.
inline double envelope_cubic_cap(double C0, double nu1) { return std::sqrt(2.0 * pi) * nu1 / C0; }

struct DecayRow
{
    double t, norm, env_cubic, env_small;
};

struct DecayReport
{
    double norm0 = 0, r0 = 0, C0 = 1, nu1 = 1;
    bool small_data = false;   // |xi0| <= r0
    bool cubic_regime = false;   // nu1 > C0 |xi0| / sqrt(2 pi)
    std::vector<DecayRow> rows;
    double min_margin_cubic = 0, min_margin_small = 0;
    bool failed = false;
    bool pass() const { return !failed && min_margin_small >= 0 && min_margin_cubic >= 0; }
};

inline DecayReport decay_check(const SpectralField& xi0, double nu1, double T, double dt, double C0)
{
    DecayReport r;
    r.norm0 = l2_norm(xi0);
    r.C0 = C0;
    r.nu1 = nu1;
    r.r0 = small_data_radius(C0, nu1);
    r.small_data = r.norm0 <= r.r0;
    r.cubic_regime = nu1 > C0 * r.norm0 / std::sqrt(2.0 * pi);
    const auto run = deterministic_solve(nu1, xi0, T, dt);
    r.failed = run.series.failed;
    r.min_margin_cubic = r.min_margin_small = std::numeric_limits<double>::infinity();
    for (const auto& row : run.series.rows) {
        DecayRow d{row.t, std::sqrt(row.energy), envelope_cubic(r.norm0, nu1, C0, row.t),
                   envelope_small_data(r.norm0, nu1, row.t)};
        r.min_margin_cubic = std::min(r.min_margin_cubic, d.env_cubic - d.norm);
        r.min_margin_small = std::min(r.min_margin_small, d.env_small - d.norm);
        r.rows.push_back(d);
    }
    return r;
}

// ---- statistics ----

/// Linear-interpolation quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = q * double(v.size() - 1);
    const std::size_t lo = std::size_t(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

/// Trapezoid rule on a uniform grid.
inline double trapezoid(const std::vector<double>& f, double h)
{
    if (f.size() < 2)
        return 0;
    NeumaierSum<double> s;
    s += 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
        s += f[i];
    return h * s.value();
}

// ---- scaling limit ----

struct ScalingConfig
{
    int M = 6;
    double nu = 5;
    double R = 1e3;
    double R0 = 5;
    double delta = 0.25;
    double dt = 1e-3;
    double T = 0.5;
    int samples = 20;
    std::vector<int> N_ladder{4, 16};
    double gamma = 1;
    std::string theta_kind = "shell";
    std::uint64_t seed = 1;
    int ic_band = 2;
    int ic_family = 1;   // number of distinct initial conditions, cycled over samples
    int threads = 1;
    double growth_guard = 1e8;

    double nu1() const { return 1.0 + 0.6 * nu; }
};

struct PathResult
{
    int N = 0;
    int sample = 0;
    int ic = 0;
    double l2_distance = 0;        // ||xi^N - xi||_{L^2(0,T;H)}
    double sup_hneg_distance = 0;  // sup_t ||xi^N_t - xi_t||_{-delta}
    double tau = 0;                // first time ||xi^N||_{-delta} > R, or T
    bool survived = true;          // tau >= T and no integration failure
    bool failed = false;
    std::string failure;
    double max_noise_bracket = 0;  // max |<xi, Pi_N(sigma . grad xi)>| / (||xi||^2 |k|)
};

struct LadderStats
{
    int N = 0;
    double l2_q10 = 0, l2_median = 0, l2_q90 = 0;
    double sup_q10 = 0, sup_median = 0, sup_q90 = 0;
    double survival_fraction = 0;
    int failures = 0;
};

struct ScalingReport
{
    std::vector<PathResult> paths;
    std::vector<LadderStats> ladder;
    std::vector<double> ic_norms;
};

inline ThetaWeights make_theta(const std::string& kind, int N, double gamma)
{
    if (kind == "shell")
        return theta_shell(N, gamma);
    if (kind == "ball")
        return theta_ball(N, gamma);
    throw std::domain_error("unknown theta kind: " + kind);
}

/// Initial condition #i of the seeded family: band-limited, L2 norm R0.
inline SpectralField initial_condition(int M, std::uint64_t seed, int i, int band, double R0)
{
    Rng rng(seed, 0x1c0000u + std::uint64_t(i));
    return random_real_field(M, rng, band, R0);
}

inline LadderStats ladder_stats(int N, const std::vector<PathResult>& paths)
{
    LadderStats s;
    s.N = N;
    std::vector<double> l2, sup;
    int total = 0, alive = 0;
    for (const auto& p : paths) {
        if (p.N != N)
            continue;
        ++total;
        if (p.survived)
            ++alive;
        if (p.failed) {
            ++s.failures;
            continue;
        }
        l2.push_back(p.l2_distance);
        sup.push_back(p.sup_hneg_distance);
    }
    s.l2_q10 = quantile(l2, 0.1);
    s.l2_median = quantile(l2, 0.5);
    s.l2_q90 = quantile(l2, 0.9);
    s.sup_q10 = quantile(sup, 0.1);
    s.sup_median = quantile(sup, 0.5);
    s.sup_q90 = quantile(sup, 0.9);
    s.survival_fraction = total ? double(alive) / total : 0.0;
    return s;
}

/// Distances of the stochastic Galerkin paths to the deterministic solution
/// with viscosity 1 + (3/5) nu, same initial condition, common random numbers across N.
inline ScalingReport scaling_limit_experiment(const ScalingConfig& c)
{
    ScalingReport rep;
    const int nsteps = step_count(c.T, c.dt);
    std::vector<SpectralField> ics;
    std::vector<std::vector<SpectralField>> refs;
    for (int i = 0; i < c.ic_family; ++i) {
        ics.push_back(initial_condition(c.M, c.seed, i, c.ic_band, c.R0));
        rep.ic_norms.push_back(l2_norm(ics.back()));
        auto run = deterministic_solve(c.nu1(), ics.back(), c.T, c.dt, true, c.growth_guard);
        if (run.series.failed)
            throw IntegrationError("deterministic reference failed: " + run.series.failure,
                                   run.series.failure_time);
        refs.push_back(std::move(run.states));
    }

    for (int N : c.N_ladder) {
        const ThetaWeights th = make_theta(c.theta_kind, N, c.gamma);
        StepParams p;
        p.dt = c.dt;
        p.nu = c.nu;
        p.R = c.R;
        p.delta = c.delta;
        p.growth_guard = c.growth_guard;
        auto prop = std::make_shared<const LinearPropagator>(th, p, c.M);
        std::vector<PathResult> res(c.samples);
        parallel_for(std::size_t(c.samples), c.threads, [&] {
            auto integ = std::make_shared<Integrator>(th, p, c.M, prop);
            return [&, integ](std::size_t s) {
                PathResult r;
                r.N = N;
                r.sample = int(s);
                r.ic = int(s % ics.size());
                const auto& ref = refs[r.ic];
                std::vector<double> d2(nsteps + 1, 0.0);
                r.tau = c.T;
                bool hit = false;
                auto obs = [&](int step, double t, const SpectralField& xi) {
                    const SpectralField diff = xi - ref[step];
                    d2[step] = l2_norm_sq(diff);
                    r.sup_hneg_distance = std::max(r.sup_hneg_distance, sobolev_norm(diff, -c.delta));
                    if (!hit && sobolev_norm(xi, -c.delta) > c.R) {
                        hit = true;
                        r.tau = t;
                    }
                };
                auto ts = simulate_path(*integ, th, ics[r.ic], c.T, c.seed, s, obs);
                r.failed = ts.failed;
                r.failure = ts.failure;
                if (ts.failed && !hit)
                    r.tau = ts.failure_time;
                r.survived = !ts.failed && !hit;
                r.l2_distance = std::sqrt(trapezoid(d2, c.dt));
                res[s] = std::move(r);
            };
        });
        rep.paths.insert(rep.paths.end(), res.begin(), res.end());
        rep.ladder.push_back(ladder_stats(N, rep.paths));
    }
    return rep;
}

// ---- long horizon ----

struct LongHorizonConfig
{
    ScalingConfig base;
    double C0 = 1;
    double eps = 0.5;
    double extra_T = 0.5;   // continuation horizon without cut-off
};

struct ContinuationResult
{
    int N = 0;
    int sample = 0;
    bool passed = false;        // survived to T
    bool small_time_found = false;
    double small_time = 0;      // t in [T-1, T] with ||xi^N_t|| <= (2 pi^2)^{1/4}/C0
    double small_norm = 0;
    bool continued = false;
    bool continuation_failed = false;
    double min_envelope_margin = 0;   // min over continuation of envelope - norm
};

struct LongHorizonReport
{
    double nu_lower_bound = 0;   // (5/3)[C0 R0/(2 pi^2)^{1/4} - 1]
    bool nu_ok = false;
    double tail_bound = 0;       // 2 R0 e^{-2 pi^2 nu1 (T-1)}
    bool T_ok = false;           // tail_bound <= eps
    double eps_cap = 0;          // (2 pi^2)^{1/4} / (2 C0)
    bool eps_ok = false;
    double reference_tail_norm = 0;   // ||xi||_{L^2(T-1,T;H)} of the deterministic reference
    ScalingReport scaling;
    std::vector<ContinuationResult> continuations;
};

inline LongHorizonReport long_horizon_experiment(const LongHorizonConfig& lc)
{
    const ScalingConfig& c = lc.base;
    LongHorizonReport rep;
    const double r0 = small_data_radius(lc.C0);
    rep.nu_lower_bound = 5.0 / 3.0 * (lc.C0 * c.R0 / std::pow(2.0 * pi * pi, 0.25) - 1.0);
    rep.nu_ok = c.nu >= rep.nu_lower_bound;
    rep.tail_bound = 2.0 * c.R0 * std::exp(-2.0 * pi * pi * c.nu1() * (c.T - 1.0));
    rep.T_ok = c.T >= 1.0 && rep.tail_bound <= lc.eps;
    rep.eps_cap = r0 / 2.0;
    rep.eps_ok = lc.eps <= rep.eps_cap;

    const int nsteps = step_count(c.T, c.dt);
    const int window0 = step_count(c.T - 1.0, c.dt);
    {
        const auto ic = initial_condition(c.M, c.seed, 0, c.ic_band, c.R0);
        const auto run = deterministic_solve(c.nu1(), ic, c.T, c.dt, false, c.growth_guard);
        std::vector<double> e;
        for (const auto& row : run.series.rows)
            if (row.step >= window0)
                e.push_back(row.energy);
        rep.reference_tail_norm = std::sqrt(trapezoid(e, c.dt));
    }

    rep.scaling = scaling_limit_experiment(c);

    // re-run each path to locate the small-norm time, then continue without cut-off
    std::vector<SpectralField> ics;
    for (int i = 0; i < c.ic_family; ++i)
        ics.push_back(initial_condition(c.M, c.seed, i, c.ic_band, c.R0));
    for (int N : c.N_ladder) {
        const ThetaWeights th = make_theta(c.theta_kind, N, c.gamma);
        StepParams p;
        p.dt = c.dt;
        p.nu = c.nu;
        p.R = c.R;
        p.delta = c.delta;
        p.growth_guard = c.growth_guard;
        StepParams pc = p;
        pc.R = std::numeric_limits<double>::infinity();
        auto prop = std::make_shared<const LinearPropagator>(th, p, c.M);
        std::vector<ContinuationResult> res(c.samples);
        parallel_for(std::size_t(c.samples), c.threads, [&] {
            auto integ = std::make_shared<Integrator>(th, p, c.M, prop);
            auto cont = std::make_shared<Integrator>(th, pc, c.M, prop);
            return [&, integ, cont](std::size_t s) {
                ContinuationResult r;
                r.N = N;
                r.sample = int(s);
                std::optional<SpectralField> start;
                bool hit = false;
                auto obs = [&](int step, double t, const SpectralField& xi) {
                    if (sobolev_norm(xi, -c.delta) > c.R)
                        hit = true;
                    if (!start && step >= window0 && step <= nsteps && l2_norm(xi) <= r0) {
                        start = xi;
                        r.small_time = t;
                        r.small_norm = l2_norm(xi);
                    }
                };
                auto ts = simulate_path(*integ, th, ics[s % ics.size()], c.T, c.seed, s, obs);
                r.passed = !ts.failed && !hit;
                r.small_time_found = start.has_value();
                if (r.passed && start) {
                    r.continued = true;
                    r.min_envelope_margin = std::numeric_limits<double>::infinity();
                    auto cobs = [&](int, double t, const SpectralField& xi) {
                        r.min_envelope_margin = std::min(
                            r.min_envelope_margin, envelope_small_data(r.small_norm, 1.0, t) - l2_norm(xi));
                    };
                    auto cts = simulate_path(*cont, th, *start, lc.extra_T, c.seed,
                                             0x10000000u + s, cobs);
                    r.continuation_failed = cts.failed;
                }
                res[s] = r;
            };
        });
        rep.continuations.insert(rep.continuations.end(), res.begin(), res.end());
    }
    return rep;
}

} // namespace tnoise
