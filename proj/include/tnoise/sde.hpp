#pragma once

// Galerkin SDE for the vorticity with transport noise, in Ito form:
//   d xi = [-f_R(||xi||_{-delta}) Pi_N L_u xi + visc Lap xi + S_theta xi] dt
//          + (C_nu/||theta||) sum theta_k Pi_N(sigma_{k,alpha} . grad xi) dW^{k,alpha}
// Nonlinear and noise terms are explicit (Euler-Maruyama); the stiff linear
// part is integrated exactly per 2x2 mode block.

#include "tnoise/corrector.hpp"
#include "tnoise/pseudo_spectral.hpp"
#include "tnoise/rng.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace tnoise {

inline double cutoff_fR(double x, double R)
{
    if (!(R > 0))
        throw std::domain_error("cutoff_fR: R must be positive");
    if (x <= R)
        return 1.0;
    if (x >= R + 1.0)
        return 0.0;
    const double c = std::cos(0.5 * pi * (x - R));
    return c * c;
}

inline double noise_intensity(double nu) { return std::sqrt(1.5 * nu); }

struct NoiseIndex
{
    IVec3 k;        // in the plus half; -k is handled by conjugation
    int alpha;      // 1 or 2
    double theta;
};

/// Complex Brownian increments dW = dB1 + i dB2 on the plus half of the support.
/// Only k that can couple two retained modes (|k| <= 2M) are sampled; the rest
/// are annihilated by the Galerkin projection anyway.
class NoiseDriver
{
public:
    NoiseDriver(const ThetaWeights& th, int M, std::uint64_t seed, std::uint64_t stream = 0)
        : rng_(seed, stream), seed_(seed)
    {
        for (std::size_t n = 0; n < th.size(); ++n) {
            const IVec3 k = th.support[n];
            if (!is_plus(k) || th.weight[n] <= 0 || k.norm_sq() > 4 * M * M)
                continue;
            for (int alpha = 1; alpha <= 2; ++alpha)
                active_.push_back({k, alpha, th.weight[n]});
        }
    }

    const std::vector<NoiseIndex>& active() const { return active_; }
    std::uint64_t seed() const { return seed_; }

    /// One increment per active index, variance dt per real part.
    void sample(double dt, std::vector<cplx>& out)
    {
        out.resize(active_.size());
        const double s = std::sqrt(dt);
        for (auto& w : out) {
            const double b1 = rng_.normal();
            const double b2 = rng_.normal();
            w = cplx(s * b1, s * b2);
        }
    }

private:
    Rng rng_;
    std::uint64_t seed_;
    std::vector<NoiseIndex> active_;
};

/// exp(t A) for real symmetric 2x2 A.
inline Block2 expm_sym2(const Block2& A, double t)
{
    const double a = A.m[0][0], d = A.m[1][1], b = 0.5 * (A.m[0][1] + A.m[1][0]);
    const double m = 0.5 * (a + d);
    const double h = 0.5 * (a - d);
    const double r = std::hypot(h, b);
    const double em = std::exp(t * m);
    const double ch = em * std::cosh(t * r);
    // e^{tm} sinh(tr)/r, with the series near r = 0
    const double tr = t * r;
    const double sh = std::abs(tr) < 1e-4 ? em * t * (1.0 + tr * tr / 6.0) : em * std::sinh(tr) / r;
    Block2 E;
    E.m[0][0] = ch + sh * h;
    E.m[1][1] = ch - sh * h;
    E.m[0][1] = E.m[1][0] = sh * b;
    return E;
}

struct StepParams
{
    double dt = 1e-3;
    double viscosity = 1.0;   // coefficient of Lap; nu_1 for the deterministic solver
    double nu = 0.0;          // noise strength; C_nu = sqrt(3 nu / 2)
    double R = std::numeric_limits<double>::infinity();   // cut-off level, inf disables
    double delta = 0.25;
    bool nonlinear = true;
    double growth_guard = 1e8;   // abort when ||xi|| exceeds this
};

struct IntegrationError : std::runtime_error
{
    double time;
    IntegrationError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
};

/// Immutable per-(theta, params, M) data: exact linear propagators per mode.
class LinearPropagator
{
public:
    LinearPropagator(const ThetaWeights& th, const StepParams& p, int M)
        : ms_(ModeSet::get(M)), E_(ms_->size())
    {
        const Corrector S(th, p.nu, M);
        for (std::size_t i = 0; i < ms_->size(); ++i) {
            Block2 A = S.s_block(i);
            const double lap = -4.0 * pi * pi * p.viscosity * ms_->mode(i).norm_sq();
            A.m[0][0] += lap;
            A.m[1][1] += lap;
            E_[i] = expm_sym2(A, p.dt);
        }
    }

    const ModeSet& modes() const { return *ms_; }

    void apply(SpectralField& y) const
    {
        for (std::size_t i = 0; i < y.size(); ++i) {
            const auto [v1, v2] = to_frame(*ms_, i, y[i]);
            const Block2& E = E_[i];
            y[i] = from_frame(*ms_, i, E.m[0][0] * v1 + E.m[0][1] * v2, E.m[1][0] * v1 + E.m[1][1] * v2);
        }
    }

private:
    std::shared_ptr<const ModeSet> ms_;
    std::vector<Block2> E_;
};

/// Per-thread stepper (owns an FFT workspace).
class Integrator
{
public:
    Integrator(const ThetaWeights& th, const StepParams& p, int M,
               std::shared_ptr<const LinearPropagator> prop = nullptr)
        : p_(p), M_(M),
          prop_(prop ? std::move(prop) : std::make_shared<const LinearPropagator>(th, p, M)),
          ps_(smooth_grid_size((th.empty() ? 3 * M : 4 * M) + 1))
    {
        if (!th.empty())
            noise_scale_ = noise_intensity(p.nu) / theta_norms(th).l2;
    }

    const StepParams& params() const { return p_; }

    /// Velocity-like noise field w = c sum theta_k dW^{k,alpha} sigma_{k,alpha} on |k| <= 2M (real).
    SpectralField noise_field(const std::vector<NoiseIndex>& idx, const std::vector<cplx>& dW) const
    {
        SpectralField w(2 * M_);
        const auto& ms = w.modes();
        for (std::size_t n = 0; n < idx.size(); ++n) {
            const Vec3 a = frame(idx[n].k)[idx[n].alpha - 1];
            const cplx amp = noise_scale_ * idx[n].theta * dW[n];
            const int i = ms.index(idx[n].k);
            w[i] += a * amp;
            w[ms.neg(i)] += a * std::conj(amp);
        }
        return w;
    }

    /// Advance xi by one step. `idx`/`dW` may be empty (no noise). Returns f_R used.
    double step(SpectralField& xi, double t, const std::vector<NoiseIndex>& idx, const std::vector<cplx>& dW)
    {
        SpectralField y = xi;
        double f = 1.0;
        if (p_.nonlinear) {
            if (std::isfinite(p_.R))
                f = cutoff_fR(sobolev_norm(xi, -p_.delta), p_.R);
            if (f > 0)
                y -= (p_.dt * f) * ps_.lie_derivative(biot_savart(xi), xi);
        }
        if (!idx.empty())
            y += ps_.transport(noise_field(idx, dW), xi);
        prop_->apply(y);
        restore_reality(y);
        const double n2 = l2_norm_sq(y);
        if (!std::isfinite(n2))
            throw IntegrationError("non-finite state", t + p_.dt);
        if (n2 > p_.growth_guard * p_.growth_guard)
            throw IntegrationError("growth guard exceeded", t + p_.dt);
        xi = std::move(y);
        return f;
    }

private:
    StepParams p_;
    int M_;
    std::shared_ptr<const LinearPropagator> prop_;
    PseudoSpectral ps_;
    double noise_scale_ = 0;
};

struct SeriesRow
{
    int step = 0;
    double t = 0;
    double energy = 0;      // ||xi||^2
    double enstrophy = 0;   // ||grad xi||^2
    double hneg = 0;        // ||xi||_{-delta}
    double cutoff = 1;      // f_R applied on the step that produced this state
};

struct TimeSeries
{
    std::vector<SeriesRow> rows;
    SpectralField final_state;
    bool failed = false;
    std::string failure;
    double failure_time = 0;
};

/// Called after every step with (step index, time, state).
using StepObserver = std::function<void(int, double, const SpectralField&)>;

inline int step_count(double T, double dt) { return int(std::llround(T / dt)); }

inline SeriesRow series_row(int n, double t, const SpectralField& xi, double delta, double f)
{
    return {n, t, l2_norm_sq(xi), enstrophy(xi), sobolev_norm(xi, -delta), f};
}

/// One trajectory. The noise stream is fixed by (seed, sample).
inline TimeSeries simulate_path(Integrator& integ, const ThetaWeights& th, SpectralField xi, double T,
                                std::uint64_t seed, std::uint64_t sample, const StepObserver& obs = {},
                                int output_every = 1)
{
    const StepParams& p = integ.params();
    NoiseDriver drv(th, xi.M(), seed, sample);
    std::vector<cplx> dW;
    TimeSeries ts;
    ts.rows.push_back(series_row(0, 0.0, xi, p.delta, 1.0));
    if (obs)
        obs(0, 0.0, xi);
    const int n = step_count(T, p.dt);
    for (int s = 1; s <= n; ++s) {
        const double t0 = (s - 1) * p.dt;
        if (!drv.active().empty())
            drv.sample(p.dt, dW);
        double f;
        try {
            f = integ.step(xi, t0, drv.active(), dW);
        } catch (const IntegrationError& e) {
            ts.failed = true;
            ts.failure = e.what();
            ts.failure_time = e.time;
            break;
        }
        const double t = s * p.dt;
        if (obs)
            obs(s, t, xi);
        if (s % output_every == 0 || s == n)
            ts.rows.push_back(series_row(s, t, xi, p.delta, f));
    }
    ts.final_state = std::move(xi);
    return ts;
}

} // namespace tnoise
