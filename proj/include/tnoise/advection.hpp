#pragma once

// Mode-shift operators: transport and Lie derivative along a single sigma_{k,alpha},
// and the direct (mode-pair) nonlinear term.

#include "tnoise/field.hpp"

namespace tnoise {

/// sigma_{k,alpha} . grad xi, Galerkin truncated (modes leaving |.| <= M dropped).
/// Not Leray projected. alpha is 1 or 2.
inline SpectralField advect_by_sigma(IVec3 k, int alpha, const SpectralField& xi)
{
    const Vec3 a = frame(k)[alpha - 1];
    const auto& ms = xi.modes();
    SpectralField out(xi.mode_set());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const IVec3 l = ms.mode(i);
        const int j = ms.index(l + k);
        if (j < 0)
            continue;
        out[j] += (two_pi_i * dot(a, l)) * xi[i];
    }
    return out;
}

/// L_sigma xi = sigma . grad xi - xi . grad sigma, truncated, sigma = sigma_{k,alpha}.
inline SpectralField lie_by_sigma(IVec3 k, int alpha, const SpectralField& xi)
{
    const Vec3 a = frame(k)[alpha - 1];
    const auto& ms = xi.modes();
    SpectralField out(xi.mode_set());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const IVec3 l = ms.mode(i);
        const int j = ms.index(l + k);
        if (j < 0)
            continue;
        out[j] += two_pi_i * (dot(a, l) * xi[i] - a * dot(k, xi[i]));
    }
    return out;
}

/// <xi, Pi_N(sigma_{k,alpha} . grad xi)> without materialising the advected field.
inline cplx transport_bracket(IVec3 k, int alpha, const SpectralField& xi)
{
    const Vec3 a = frame(k)[alpha - 1];
    const auto& ms = xi.modes();
    NeumaierSum<cplx> s;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const IVec3 l = ms.mode(i);
        const int j = ms.index(l + k);
        if (j < 0)
            continue;
        // the Leray projection is self-adjoint and fixes xi, so it drops out
        s += std::conj(two_pi_i * dot(a, l)) * inner(xi[j], xi[i]);
    }
    return s.value();
}

/// L_u xi = u . grad xi - xi . grad u by direct summation over mode pairs,
/// truncated to |m| <= M and Leray projected. O(modes^2).
inline SpectralField lie_derivative_direct(const SpectralField& u, const SpectralField& xi)
{
    u.check_same(xi);
    const auto& ms = xi.modes();
    const std::size_t n = ms.size();
    std::vector<NeumaierSum<cplx>> acc(3 * n);
    for (std::size_t jj = 0; jj < n; ++jj) {
        const IVec3 j = ms.mode(jj);
        const CVec3& uj = u[jj];
        if (norm_sq(uj) == 0)
            continue;
        for (std::size_t ll = 0; ll < n; ++ll) {
            const IVec3 l = ms.mode(ll);
            const int m = ms.index(j + l);
            if (m < 0)
                continue;
            const CVec3 term = two_pi_i * (dot(uj, l.vec()) * xi[ll] - dot(xi[ll], j.vec()) * uj);
            for (int c = 0; c < 3; ++c)
                acc[3 * m + c] += term[c];
        }
    }
    SpectralField out(xi.mode_set());
    for (std::size_t m = 0; m < n; ++m)
        out[m] = {acc[3 * m].value(), acc[3 * m + 1].value(), acc[3 * m + 2].value()};
    return leray_project(std::move(out));
}

} // namespace tnoise
