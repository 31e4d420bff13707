#pragma once

#include "tnoise/compensated.hpp"
#include "tnoise/lattice.hpp"
#include "tnoise/rng.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tnoise {

/// Modes 1 <= |l| <= M (spherical truncation), with lookup, negation map and frames.
class ModeSet
{
public:
    explicit ModeSet(int M) : M_(M), side_(2 * M + 1)
    {
        if (M < 1)
            throw std::domain_error("ModeSet: truncation M must be >= 1");
        modes_ = lattice_points(1, M * M);
        lookup_.assign(std::size_t(side_) * side_ * side_, -1);
        for (std::size_t i = 0; i < modes_.size(); ++i)
            lookup_[slot(modes_[i])] = int(i);
        neg_.resize(modes_.size());
        frames_.reserve(modes_.size());
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            neg_[i] = index(-modes_[i]);
            frames_.push_back(frame(modes_[i]));
        }
    }

    /// Shared, cached instance per truncation.
    static std::shared_ptr<const ModeSet> get(int M)
    {
        static std::mutex mtx;
        static std::map<int, std::shared_ptr<const ModeSet>> cache;
        std::lock_guard lock(mtx);
        auto& p = cache[M];
        if (!p)
            p = std::make_shared<const ModeSet>(M);
        return p;
    }

    int M() const { return M_; }
    std::size_t size() const { return modes_.size(); }
    IVec3 mode(std::size_t i) const { return modes_[i]; }
    const std::vector<IVec3>& modes() const { return modes_; }
    int neg(std::size_t i) const { return neg_[i]; }
    const Frame& frame_of(std::size_t i) const { return frames_[i]; }

    int index(IVec3 l) const
    {
        if (std::abs(l.x) > M_ || std::abs(l.y) > M_ || std::abs(l.z) > M_)
            return -1;
        return lookup_[slot(l)];
    }

private:
    std::size_t slot(IVec3 l) const
    {
        return (std::size_t(l.x + M_) * side_ + std::size_t(l.y + M_)) * side_ + std::size_t(l.z + M_);
    }

    int M_;
    int side_;
    std::vector<IVec3> modes_;
    std::vector<int> lookup_;
    std::vector<int> neg_;
    std::vector<Frame> frames_;
};

/// Zero-mean vector field as Cartesian complex Fourier coefficients on |l| <= M.
class SpectralField
{
public:
    SpectralField() = default;
    explicit SpectralField(int M) : SpectralField(ModeSet::get(M)) {}
    explicit SpectralField(std::shared_ptr<const ModeSet> ms) : ms_(std::move(ms)), c_(ms_->size()) {}

    int M() const { return ms_->M(); }
    std::size_t size() const { return c_.size(); }
    const ModeSet& modes() const { return *ms_; }
    const std::shared_ptr<const ModeSet>& mode_set() const { return ms_; }

    CVec3& operator[](std::size_t i) { return c_[i]; }
    const CVec3& operator[](std::size_t i) const { return c_[i]; }
    std::vector<CVec3>& coeffs() { return c_; }
    const std::vector<CVec3>& coeffs() const { return c_; }

    CVec3 at(IVec3 l) const
    {
        const int i = ms_->index(l);
        return i < 0 ? CVec3{} : c_[i];
    }
    void set(IVec3 l, const CVec3& v)
    {
        const int i = ms_->index(l);
        if (i < 0)
            throw std::out_of_range("SpectralField::set: mode outside truncation");
        c_[i] = v;
    }

    /// Copy onto another truncation: embeds or drops modes.
    SpectralField resized(int M2) const
    {
        SpectralField out(M2);
        for (std::size_t i = 0; i < size(); ++i) {
            const int j = out.ms_->index(ms_->mode(i));
            if (j >= 0)
                out.c_[j] = c_[i];
        }
        return out;
    }

    SpectralField& operator+=(const SpectralField& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i)
            c_[i] += o.c_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i)
            c_[i] -= o.c_[i];
        return *this;
    }
    SpectralField& operator*=(cplx s)
    {
        for (auto& v : c_)
            v *= s;
        return *this;
    }
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, cplx s) { return a *= s; }

    void check_same(const SpectralField& o) const
    {
        if (ms_ != o.ms_)
            throw std::domain_error("SpectralField: truncation mismatch");
    }

private:
    std::shared_ptr<const ModeSet> ms_;
    std::vector<CVec3> c_;
};

/// sigma_{k,alpha} scaled by amp; alpha is 1 or 2.
inline SpectralField sigma_mode(int M, IVec3 k, int alpha, cplx amp = 1.0)
{
    SpectralField f(M);
    f.set(k, amp * frame(k)[alpha - 1]);
    return f;
}

// frame coordinates of a coefficient at mode index i
inline std::pair<cplx, cplx> to_frame(const ModeSet& ms, std::size_t i, const CVec3& v)
{
    const Frame& f = ms.frame_of(i);
    return {dot(f.a1, v), dot(f.a2, v)};
}
inline CVec3 from_frame(const ModeSet& ms, std::size_t i, cplx v1, cplx v2)
{
    const Frame& f = ms.frame_of(i);
    return f.a1 * v1 + f.a2 * v2;
}

// ---- inner products and norms ----

/// <f, g> = sum_l f_l . conj(g_l)
inline cplx inner(const SpectralField& f, const SpectralField& g)
{
    f.check_same(g);
    NeumaierSum<cplx> s;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += inner(f[i], g[i]);
    return s.value();
}

inline double l2_norm_sq(const SpectralField& f)
{
    NeumaierSum<double> s;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += norm_sq(f[i]);
    return s.value();
}
inline double l2_norm(const SpectralField& f) { return std::sqrt(l2_norm_sq(f)); }

/// ||f||_s^2 = sum (4 pi^2 |l|^2)^s |f_l|^2
inline double sobolev_norm_sq(const SpectralField& f, double s)
{
    NeumaierSum<double> acc;
    const auto& ms = f.modes();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = 4.0 * pi * pi * ms.mode(i).norm_sq();
        acc += (s == 0 ? 1.0 : (s == 1 ? w : std::pow(w, s))) * norm_sq(f[i]);
    }
    return acc.value();
}
inline double sobolev_norm(const SpectralField& f, double s) { return std::sqrt(sobolev_norm_sq(f, s)); }

/// ||grad f||^2
inline double enstrophy(const SpectralField& f) { return sobolev_norm_sq(f, 1.0); }

// ---- linear operators ----

inline CVec3 leray(IVec3 l, const CVec3& v)
{
    const cplx p = dot(l, v) / double(l.norm_sq());
    return v - l.vec() * p;
}

inline SpectralField leray_project(SpectralField f)
{
    const auto& ms = f.modes();
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = leray(ms.mode(i), f[i]);
    return f;
}

inline SpectralField leray_perp(SpectralField f)
{
    const auto& ms = f.modes();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const IVec3 l = ms.mode(i);
        f[i] = l.vec() * (dot(l, f[i]) / double(l.norm_sq()));
    }
    return f;
}

inline SpectralField curl(SpectralField f)
{
    const auto& ms = f.modes();
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = two_pi_i * cross(ms.mode(i).vec(), f[i]);
    return f;
}

/// u_l = i (l x xi_l) / (2 pi |l|^2)
inline SpectralField biot_savart(SpectralField xi)
{
    const auto& ms = xi.modes();
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const IVec3 l = ms.mode(i);
        xi[i] = cplx(0.0, 1.0 / (2.0 * pi * l.norm_sq())) * cross(l.vec(), xi[i]);
    }
    return xi;
}

inline SpectralField laplacian(SpectralField f)
{
    const auto& ms = f.modes();
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] *= -4.0 * pi * pi * ms.mode(i).norm_sq();
    return f;
}

// ---- structural checks ----

/// max |conj(f_l) - f_{-l}|
inline double reality_defect(const SpectralField& f)
{
    double m = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        m = std::max(m, norm(conj(f[i]) - f[f.modes().neg(i)]));
    return m;
}

/// max |l . f_l| / |l|
inline double divergence_defect(const SpectralField& f)
{
    double m = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const IVec3 l = f.modes().mode(i);
        m = std::max(m, std::abs(dot(l, f[i])) / std::sqrt(double(l.norm_sq())));
    }
    return m;
}

/// f_l <- (f_l + conj f_{-l}) / 2
inline void restore_reality(SpectralField& f)
{
    const auto& ms = f.modes();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::size_t j = ms.neg(i);
        if (j < i)
            continue;
        const CVec3 avg = 0.5 * (f[i] + conj(f[j]));
        f[i] = avg;
        f[j] = conj(avg);
    }
}

/// Random real divergence-free field supported on 1 <= |l| <= band, complex
/// Gaussian frame coordinates. Rescaled to L2 norm `target_norm` if positive.
inline SpectralField random_real_field(int M, Rng& rng, int band = -1, double target_norm = -1)
{
    SpectralField f(M);
    const auto& ms = f.modes();
    const int band_sq = band < 0 ? M * M : band * band;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const IVec3 l = ms.mode(i);
        if (!is_plus(l) || l.norm_sq() > band_sq)
            continue;
        const cplx v1(rng.normal(), rng.normal());
        const cplx v2(rng.normal(), rng.normal());
        f[i] = from_frame(ms, i, v1, v2);
        f[ms.neg(i)] = conj(f[i]);
    }
    if (target_norm >= 0) {
        const double n = l2_norm(f);
        if (n > 0)
            f *= target_norm / n;
    }
    return f;
}

/// Random complex (not real) divergence-free field on all modes.
inline SpectralField random_complex_field(int M, Rng& rng)
{
    SpectralField f(M);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = from_frame(f.modes(), i, {rng.normal(), rng.normal()}, {rng.normal(), rng.normal()});
    return f;
}

} // namespace tnoise
