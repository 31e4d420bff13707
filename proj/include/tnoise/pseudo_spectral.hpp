#pragma once

// Grid-based evaluation of quadratic terms with FFTW. Grids are sized so that
// products of the band-limited inputs never alias back onto retained modes.

#include "tnoise/field.hpp"

#include <fftw3.h>

#include <array>
#include <mutex>

namespace tnoise {

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

inline bool is_smooth_size(int n)
{
    for (int p : {2, 3, 5})
        while (n % p == 0)
            n /= p;
    return n == 1;
}

template <typename T>
struct FftwBuffer
{
    T* p = nullptr;
    FftwBuffer() = default;
    explicit FftwBuffer(std::size_t n) : p(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {}
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    FftwBuffer(FftwBuffer&& o) noexcept : p(std::exchange(o.p, nullptr)) {}
    FftwBuffer& operator=(FftwBuffer&& o) noexcept
    {
        std::swap(p, o.p);
        return *this;
    }
    ~FftwBuffer()
    {
        if (p)
            fftw_free(p);
    }
};

} // namespace detail

/// Smallest 2-3-5 smooth grid size >= n_min.
inline int smooth_grid_size(int n_min)
{
    int n = std::max(n_min, 2);
    while (!detail::is_smooth_size(n))
        ++n;
    return n;
}

/// Workspace for one thread; not shareable across threads.
class PseudoSpectral
{
public:
    /// Grid of n^3 points. A product of factors with bands p and q is exact
    /// on |m| <= M when n > p + q + M.
    explicit PseudoSpectral(int n) : n_(n), nh_(n / 2 + 1)
    {
        const std::size_t nr = std::size_t(n_) * n_ * n_;
        const std::size_t nc = std::size_t(n_) * n_ * nh_;
        for (auto& b : real_)
            b = detail::FftwBuffer<double>(nr);
        spec_ = detail::FftwBuffer<fftw_complex>(nc);
        std::lock_guard lock(detail::fftw_planner_mutex());
        // ESTIMATE keeps the chosen algorithm, and hence the rounding, identical across runs
        c2r_ = fftw_plan_dft_c2r_3d(n_, n_, n_, spec_.p, real_[0].p, FFTW_ESTIMATE);
        r2c_ = fftw_plan_dft_r2c_3d(n_, n_, n_, real_[0].p, spec_.p, FFTW_ESTIMATE);
    }
    PseudoSpectral(const PseudoSpectral&) = delete;
    PseudoSpectral& operator=(const PseudoSpectral&) = delete;
    ~PseudoSpectral()
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(c2r_);
        fftw_destroy_plan(r2c_);
    }

    int n() const { return n_; }

    /// Nonlinear term L_u xi = curl(xi x u) with u = biot_savart(xi). Needs n > 3M.
    SpectralField lie_derivative(const SpectralField& u, const SpectralField& xi)
    {
        u.check_same(xi);
        require(3 * xi.M());
        for (int c = 0; c < 3; ++c) {
            to_grid(xi, [&](std::size_t i) { return xi[i][c]; }, c);
            to_grid(u, [&](std::size_t i) { return u[i][c]; }, 3 + c);
        }
        const std::size_t nr = std::size_t(n_) * n_ * n_;
        double* x0 = real_[0].p; double* x1 = real_[1].p; double* x2 = real_[2].p;
        double* u0 = real_[3].p; double* u1 = real_[4].p; double* u2 = real_[5].p;
        for (std::size_t p = 0; p < nr; ++p) {
            const double c0 = x1[p] * u2[p] - x2[p] * u1[p];
            const double c1 = x2[p] * u0[p] - x0[p] * u2[p];
            const double c2 = x0[p] * u1[p] - x1[p] * u0[p];
            x0[p] = c0; x1[p] = c1; x2[p] = c2;
        }
        SpectralField cr(xi.mode_set());
        for (int c = 0; c < 3; ++c)
            from_grid(c, cr, c);
        return leray_project(curl(std::move(cr)));
    }

    /// w . grad xi restricted to xi's truncation, Leray projected.
    /// w may live on a larger truncation; needs n > M_w + 2M.
    SpectralField transport(const SpectralField& w, const SpectralField& xi)
    {
        require(w.M() + 2 * xi.M());
        const auto& ms = xi.modes();
        for (int j = 0; j < 3; ++j)
            to_grid(w, [&](std::size_t i) { return w[i][j]; }, 9 + j);
        SpectralField out(xi.mode_set());
        double* acc[3] = {real_[0].p, real_[1].p, real_[2].p};
        const std::size_t nr = std::size_t(n_) * n_ * n_;
        for (int c = 0; c < 3; ++c)
            std::fill(acc[c], acc[c] + nr, 0.0);
        for (int j = 0; j < 3; ++j) {
            const double* wj = real_[9 + j].p;
            for (int c = 0; c < 3; ++c) {
                to_grid(xi, [&](std::size_t i) { return two_pi_i * double(ms.mode(i)[j]) * xi[i][c]; }, 3);
                const double* d = real_[3].p;
                double* a = acc[c];
                for (std::size_t p = 0; p < nr; ++p)
                    a[p] += wj[p] * d[p];
            }
        }
        for (int c = 0; c < 3; ++c)
            from_grid(c, out, c);
        return leray_project(std::move(out));
    }

private:
    static constexpr int nbuf = 12;

    void require(int bound) const
    {
        if (n_ <= bound)
            throw std::domain_error("PseudoSpectral: grid too small for alias-free product");
    }

    std::size_t cidx(int a, int b, int c) const
    {
        auto wrap = [this](int v) { return v < 0 ? v + n_ : v; };
        return (std::size_t(wrap(a)) * n_ + std::size_t(wrap(b))) * nh_ + std::size_t(c);
    }

    template <typename Fn>
    void to_grid(const SpectralField& f, Fn&& coeff, int buf)
    {
        fftw_complex* s = spec_.p;
        std::fill(&s[0][0], &s[0][0] + 2 * std::size_t(n_) * n_ * nh_, 0.0);
        const auto& ms = f.modes();
        for (std::size_t i = 0; i < f.size(); ++i) {
            const IVec3 l = ms.mode(i);
            if (l.z < 0)
                continue;
            const cplx v = coeff(i);
            const std::size_t q = cidx(l.x, l.y, l.z);
            s[q][0] = v.real();
            s[q][1] = v.imag();
        }
        fftw_execute_dft_c2r(c2r_, s, real_[buf].p);
    }

    void from_grid(int buf, SpectralField& out, int comp)
    {
        fftw_execute_dft_r2c(r2c_, real_[buf].p, spec_.p);
        const double scale = 1.0 / (double(n_) * n_ * n_);
        const auto& ms = out.modes();
        for (std::size_t i = 0; i < out.size(); ++i) {
            const IVec3 l = ms.mode(i);
            if (l.z >= 0) {
                const auto& v = spec_.p[cidx(l.x, l.y, l.z)];
                out[i][comp] = cplx(v[0], v[1]) * scale;
            } else {
                const auto& v = spec_.p[cidx(-l.x, -l.y, -l.z)];
                out[i][comp] = cplx(v[0], -v[1]) * scale;
            }
        }
    }

    int n_, nh_;
    std::array<detail::FftwBuffer<double>, nbuf> real_;
    detail::FftwBuffer<fftw_complex> spec_;
    fftw_plan c2r_ = nullptr;
    fftw_plan r2c_ = nullptr;
};

} // namespace tnoise
