#pragma once

// Ito corrector S_theta = nu Lap - S_perp and the lattice sums behind its
// scaling limit (3/5) nu Lap.

#include "tnoise/advection.hpp"
#include "tnoise/field.hpp"
#include "tnoise/lattice.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>

namespace tnoise {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// sum_{k,alpha} theta_k^2 a_{k,alpha} (x) a_{k,alpha}; equals (2/3)||theta||^2 I for radial theta.
inline Mat3 coefficient_covariance(const ThetaWeights& th)
{
    std::array<NeumaierSum<double>, 9> acc;
    for (std::size_t n = 0; n < th.size(); ++n) {
        const Frame f = frame(th.support[n]);
        const double w2 = th.weight[n] * th.weight[n];
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    acc[3 * i + j] += w2 * f[a][i] * f[a][j];
    }
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m[i][j] = acc[3 * i + j].value();
    return m;
}

struct CovarianceCheck
{
    double max_offdiag = 0;     // max |C_ij|, i != j
    double max_deviation = 0;   // max |C - (2/3)||theta||^2 I|
    double l2_sq = 0;
};

inline CovarianceCheck check_covariance(const ThetaWeights& th)
{
    const Mat3 c = coefficient_covariance(th);
    CovarianceCheck r;
    r.l2_sq = theta_norms(th).l2_sq;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double target = i == j ? (2.0 / 3.0) * r.l2_sq : 0.0;
            r.max_deviation = std::max(r.max_deviation, std::abs(c[i][j] - target));
            if (i != j)
                r.max_offdiag = std::max(r.max_offdiag, std::abs(c[i][j]));
        }
    return r;
}

/// Weight of the inner sum: either the frame sum sum_alpha (a_{k,alpha}.l)^2
/// or the equivalent |l|^2 sin^2 angle(k,l).
enum class PerpForm { frame_sum, sine_squared };

/// V_beta = sum_{k != l} theta_k^2 w(k,l) (a_{l,beta}.(k-l)) (k-l)/|k-l|^2, beta = 1, 2.
inline std::array<Vec3, 2> perp_vectors(const ThetaWeights& th, IVec3 l, PerpForm form)
{
    const Frame fl = frame(l);
    const double l2 = l.norm_sq();
    std::array<NeumaierSum<double>, 6> acc;
    for (std::size_t n = 0; n < th.size(); ++n) {
        const IVec3 k = th.support[n];
        if (k == l)
            continue;   // a_k . k = 0 kills this term; k - l is the mean mode
        double w;
        if (form == PerpForm::frame_sum) {
            const Frame fk = frame(k);
            const double p1 = dot(fk.a1, l), p2 = dot(fk.a2, l);
            w = p1 * p1 + p2 * p2;
        } else {
            const double kl = double(dot(k, l));
            w = l2 - kl * kl / k.norm_sq();
        }
        w *= th.weight[n] * th.weight[n];
        const IVec3 d = k - l;
        const double inv = 1.0 / d.norm_sq();
        for (int b = 0; b < 2; ++b) {
            const double s = w * dot(fl[b], d) * inv;
            acc[3 * b] += s * d.x;
            acc[3 * b + 1] += s * d.y;
            acc[3 * b + 2] += s * d.z;
        }
    }
    return {Vec3{acc[0].value(), acc[1].value(), acc[2].value()},
            Vec3{acc[3].value(), acc[4].value(), acc[5].value()}};
}

/// Real 2x2 matrix in frame coordinates (v_{l,1}, v_{l,2}).
struct Block2
{
    double m[2][2] = {{0, 0}, {0, 0}};
    double asymmetry() const { return std::abs(m[0][1] - m[1][0]); }
};

/// S_perp block at mode l: P_{b'b} = -(6 pi^2 nu / ||theta||^2) a_{l,b'} . V_b.
inline Block2 perp_block(const ThetaWeights& th, double l2_sq, double nu, IVec3 l, PerpForm form)
{
    const auto v = perp_vectors(th, l, form);
    const Frame fl = frame(l);
    const double c = -6.0 * pi * pi * nu / l2_sq;
    Block2 b;
    for (int bp = 0; bp < 2; ++bp)
        for (int bb = 0; bb < 2; ++bb)
            b.m[bp][bb] = c * dot(fl[bp], v[bb]);
    return b;
}

/// Block-diagonal corrector on a fixed truncation; blocks are computed once.
class Corrector
{
public:
    Corrector(const ThetaWeights& th, double nu, int M, PerpForm form = PerpForm::sine_squared)
        : ms_(ModeSet::get(M)), nu_(nu), blocks_(ms_->size())
    {
        if (th.empty())
            return;   // no noise, no corrector
        const double l2_sq = theta_norms(th).l2_sq;
        for (std::size_t i = 0; i < ms_->size(); ++i) {
            if (!is_plus(ms_->mode(i)))
                continue;
            blocks_[i] = tnoise::perp_block(th, l2_sq, nu, ms_->mode(i), form);
            blocks_[ms_->neg(i)] = blocks_[i];   // V(-l) = V(l), frames shared
        }
        active_ = true;
    }

    bool active() const { return active_; }
    double nu() const { return nu_; }
    int M() const { return ms_->M(); }
    const Block2& perp_block(std::size_t i) const { return blocks_[i]; }

    /// Frame-coordinate block of S_theta itself: -4 pi^2 nu |l|^2 I - P.
    Block2 s_block(std::size_t i) const
    {
        Block2 b;
        const double lap = active_ ? -4.0 * pi * pi * nu_ * ms_->mode(i).norm_sq() : 0.0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                b.m[r][c] = (r == c ? lap : 0.0) - blocks_[i].m[r][c];
        return b;
    }

    SpectralField perp_apply(const SpectralField& v) const { return apply_blocks(v, false); }
    SpectralField apply(const SpectralField& v) const { return apply_blocks(v, true); }

private:
    SpectralField apply_blocks(const SpectralField& v, bool full) const
    {
        if (v.mode_set() != ms_)
            throw std::domain_error("Corrector: truncation mismatch");
        SpectralField out(ms_);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto [v1, v2] = to_frame(*ms_, i, v[i]);
            const Block2 b = full ? s_block(i) : blocks_[i];
            out[i] = from_frame(*ms_, i, b.m[0][0] * v1 + b.m[0][1] * v2, b.m[1][0] * v1 + b.m[1][1] * v2);
        }
        return out;
    }

    std::shared_ptr<const ModeSet> ms_;
    double nu_;
    std::vector<Block2> blocks_;
    bool active_ = false;
};

inline SpectralField s_theta_perp_apply(const ThetaWeights& th, double nu, const SpectralField& v,
                                        PerpForm form = PerpForm::frame_sum)
{
    return Corrector(th, nu, v.M(), form).perp_apply(v);
}

inline SpectralField s_theta_apply(const ThetaWeights& th, double nu, const SpectralField& v,
                                   PerpForm form = PerpForm::frame_sum)
{
    return Corrector(th, nu, v.M(), form).apply(v);
}

/// Truncation needed so that every intermediate mode l - k with |l| <= M is kept.
inline int working_truncation(const ThetaWeights& th, int M)
{
    return M + int(std::ceil(th.max_norm()));
}

namespace detail {

inline int checked_working(const ThetaWeights& th, int M, int working_M)
{
    const int need = working_truncation(th, M);
    if (working_M < 0)
        return need;
    if (working_M < need)
        throw std::domain_error("working truncation too small for the noise support");
    return working_M;
}

template <typename Fn>
void for_each_noise_index(const ThetaWeights& th, Fn&& fn)
{
    for (std::size_t n = 0; n < th.size(); ++n)
        for (int alpha = 1; alpha <= 2; ++alpha)
            fn(th.support[n], alpha, th.weight[n]);
}

} // namespace detail

/// Brute force (C_nu^2/||theta||^2) sum theta_k^2 Pi[sigma_k . grad Pi(sigma_{-k} . grad xi)].
/// With inner_projection=false the inner Pi is dropped, which gives nu Lap xi.
inline SpectralField s_theta_direct(const ThetaWeights& th, double nu, const SpectralField& xi,
                                    bool inner_projection = true, int working_M = -1)
{
    if (th.empty())
        return SpectralField(xi.mode_set());
    const int Mw = detail::checked_working(th, xi.M(), working_M);
    const SpectralField xw = xi.resized(Mw);
    SpectralField acc(xw.mode_set());
    detail::for_each_noise_index(th, [&](IVec3 k, int alpha, double w) {
        SpectralField t = advect_by_sigma(-k, alpha, xw);
        if (inner_projection)
            t = leray_project(std::move(t));
        acc += (w * w) * advect_by_sigma(k, alpha, t);
    });
    const double cnu2 = 1.5 * nu;
    return leray_project(acc.resized(xi.M())) * (cnu2 / theta_norms(th).l2_sq);
}

/// sum theta_k^2 ||Pi(sigma_{k,alpha} . grad xi)||^2 without Galerkin truncation.
inline double transport_sum_of_squares(const ThetaWeights& th, const SpectralField& xi, int working_M = -1)
{
    const SpectralField xw = xi.resized(detail::checked_working(th, xi.M(), working_M));
    NeumaierSum<double> s;
    detail::for_each_noise_index(th, [&](IVec3 k, int alpha, double w) {
        s += w * w * l2_norm_sq(leray_project(advect_by_sigma(k, alpha, xw)));
    });
    return s.value();
}

/// sum theta_k^2 L_{sigma_{k,alpha}} L_{sigma_{-k,alpha}} xi, restricted to xi's truncation.
inline SpectralField advection_double_lie(const ThetaWeights& th, const SpectralField& xi, int working_M = -1)
{
    const SpectralField xw = xi.resized(detail::checked_working(th, xi.M(), working_M));
    SpectralField acc(xw.mode_set());
    detail::for_each_noise_index(th, [&](IVec3 k, int alpha, double w) {
        acc += (w * w) * lie_by_sigma(k, alpha, lie_by_sigma(-k, alpha, xw));
    });
    return acc.resized(xi.M());
}

struct EnergyJ
{
    double lhs = 0;   // (3 nu/||theta||^2) sum theta^2 ||L_sigma xi||^2
    double rhs = 0;   // 2 nu ||grad xi||^2 + 8 nu pi^2 (h1^2/l2^2) ||xi||^2
};

inline EnergyJ advection_energy_J(const ThetaWeights& th, double nu, const SpectralField& xi, int working_M = -1)
{
    const SpectralField xw = xi.resized(detail::checked_working(th, xi.M(), working_M));
    NeumaierSum<double> s;
    detail::for_each_noise_index(th, [&](IVec3 k, int alpha, double w) {
        s += w * w * l2_norm_sq(lie_by_sigma(k, alpha, xw));
    });
    const ThetaNorms tn = theta_norms(th);
    EnergyJ j;
    j.lhs = 3.0 * nu / tn.l2_sq * s.value();
    // the stretching part contributes 8 pi^2 (1/3) h1^2 ||xi||^2: two alphas per k
    j.rhs = 2.0 * nu * enstrophy(xi) + 8.0 * nu * pi * pi * (tn.h1_sq / tn.l2_sq) * l2_norm_sq(xi);
    return j;
}

// ---- scaling-limit lattice sums ----

inline constexpr double angular_sum_limit = 4.0 / 15.0;

/// (1/||theta||^2) sum theta_k^2 sin^2 angle(k,l) (a_{l,beta}.(k-l)) (k-l)/|k-l|^2
inline Vec3 angular_sum(const ThetaWeights& th, IVec3 l, int beta)
{
    const Vec3 v = perp_vectors(th, l, PerpForm::sine_squared)[beta - 1];
    return v / (theta_norms(th).l2_sq * l.norm_sq());
}
inline Vec3 angular_sum(int N, double gamma, IVec3 l, int beta)
{
    return angular_sum(theta_shell(N, gamma), l, beta);
}

struct AngularSumError
{
    double total = 0;        // |J - (4/15) a|
    double parallel = 0;     // |a.J - 4/15|
    double orthogonal = 0;   // |J - (a.J) a|
};

inline AngularSumError angular_sum_error(const Vec3& J, IVec3 l, int beta)
{
    const Vec3 a = frame(l)[beta - 1];
    AngularSumError e;
    e.total = norm(J - angular_sum_limit * a);
    const double par = dot(a, J);
    e.parallel = std::abs(par - angular_sum_limit);
    e.orthogonal = norm(J - par * a);
    return e;
}

/// ||S_theta(sigma_{l,beta}) - (3/5) nu Lap sigma_{l,beta}|| / ((12/5) pi^2 nu |l|^2)
inline double limit_defect(const ThetaWeights& th, double nu, IVec3 l, int beta)
{
    const double l2 = l.norm_sq();
    const Block2 p = perp_block(th, theta_norms(th).l2_sq, nu, l, PerpForm::sine_squared);
    const Frame fl = frame(l);
    const int b = beta - 1;
    // S_theta sigma = -4 pi^2 nu |l|^2 a_b - sum_b' P_{b'b} a_b'
    Vec3 s = (-4.0 * pi * pi * nu * l2) * fl[b];
    s -= p.m[0][b] * fl.a1 + p.m[1][b] * fl.a2;
    const Vec3 target = (-12.0 / 5.0 * pi * pi * nu * l2) * fl[b];
    return norm(s - target) / (12.0 / 5.0 * pi * pi * nu * l2);
}
inline double limit_defect(int N, double gamma, double nu, IVec3 l, int beta)
{
    return limit_defect(theta_shell(N, gamma), nu, l, beta);
}

/// <S_perp(v), v> / (pi^2 nu |l|^2) for v = sigma_{l,1} + sigma_{l,2}; tends to -16/5.
inline double heuristic_ratio(const ThetaWeights& th, double nu, IVec3 l)
{
    const Block2 p = perp_block(th, theta_norms(th).l2_sq, nu, l, PerpForm::sine_squared);
    const double q = p.m[0][0] + p.m[0][1] + p.m[1][0] + p.m[1][1];
    return q / (pi * pi * nu * l.norm_sq());
}

/// Sphere average of sin^4 of the polar angle, (1/2) int_0^pi sin^5 = 8/15, by Gauss quadrature.
inline double sine5_integral()
{
    return boost::math::quadrature::gauss<double, 20>::integrate(
        [](double psi) { return std::pow(std::sin(psi), 5); }, 0.0, pi);
}
inline double sphere_mean_sine4() { return 0.5 * sine5_integral(); }
/// Continuum value of the angular sum along a_{l,beta}: half the sin^4 mean.
inline double angular_sum_continuum() { return 0.5 * sphere_mean_sine4(); }

} // namespace tnoise
