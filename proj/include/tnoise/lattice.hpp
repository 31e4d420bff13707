#pragma once

#include "tnoise/compensated.hpp"
#include "tnoise/vec3.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace tnoise {

struct IVec3
{
    int x = 0, y = 0, z = 0;

    constexpr int operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr int norm_sq() const { return x * x + y * y + z * z; }
    constexpr bool is_zero() const { return x == 0 && y == 0 && z == 0; }
    Vec3 vec() const { return {double(x), double(y), double(z)}; }

    friend constexpr IVec3 operator+(IVec3 a, IVec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr IVec3 operator-(IVec3 a, IVec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr IVec3 operator-(IVec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(IVec3, IVec3) = default;
    friend constexpr auto operator<=>(IVec3, IVec3) = default;
};

constexpr long dot(IVec3 a, IVec3 b) { return long(a.x) * b.x + long(a.y) * b.y + long(a.z) * b.z; }
inline double dot(const Vec3& a, IVec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double dot(IVec3 a, const Vec3& b) { return dot(b, a); }
inline cplx dot(IVec3 a, const CVec3& b) { return double(a.x) * b.x + double(a.y) * b.y + double(a.z) * b.z; }

enum class SignClass { plus, minus };

inline SignClass sign_class(IVec3 k)
{
    for (int i = 0; i < 3; ++i) {
        if (k[i] > 0) return SignClass::plus;
        if (k[i] < 0) return SignClass::minus;
    }
    throw std::domain_error("sign_class: zero wave vector");
}

inline bool is_plus(IVec3 k) { return sign_class(k) == SignClass::plus; }

struct Frame
{
    Vec3 a1, a2;
    const Vec3& operator[](int alpha) const { return alpha == 0 ? a1 : a2; }   // 0-based alpha
};

// h = first e_i not parallel to k, a1 = k x h / |k x h|, a2 = k/|k| x a1.
// Negative half of the lattice reuses the frame of -k.
inline Frame frame(IVec3 k)
{
    if (k.is_zero())
        throw std::domain_error("frame: zero wave vector");
    if (!is_plus(k))
        k = -k;
    const Vec3 kv = k.vec();
    Vec3 h;
    for (int i = 0; i < 3; ++i) {
        Vec3 e;
        e[i] = 1.0;
        if (cross(kv, e) != Vec3{}) {
            h = e;
            break;
        }
    }
    const Vec3 c = cross(kv, h);
    Frame f;
    f.a1 = c / norm(c);
    f.a2 = cross(kv / norm(kv), f.a1);
    return f;
}

// All nonzero lattice points with |k|^2 in [lo_sq, hi_sq], ordered by |k|^2 then lexicographically.
inline std::vector<IVec3> lattice_points(int lo_sq, int hi_sq)
{
    std::vector<IVec3> out;
    lo_sq = std::max(lo_sq, 1);
    const int r = int(std::floor(std::sqrt(double(hi_sq)))) + 1;
    for (int x = -r; x <= r; ++x)
        for (int y = -r; y <= r; ++y)
            for (int z = -r; z <= r; ++z) {
                const IVec3 k{x, y, z};
                const int n = k.norm_sq();
                if (n >= lo_sq && n <= hi_sq)
                    out.push_back(k);
            }
    std::sort(out.begin(), out.end(), [](IVec3 a, IVec3 b) {
        const int na = a.norm_sq(), nb = b.norm_sq();
        return na != nb ? na < nb : a < b;
    });
    return out;
}

struct ThetaNorms
{
    double l2_sq = 0, l2 = 0, linf = 0, h1_sq = 0, h1 = 0;
};

// Finite, radially symmetric noise weights. The weight is a function of |k|^2
// only, evaluated once per shell so equal-|k| orbits are bit-identical.
struct ThetaWeights
{
    std::vector<IVec3> support;
    std::vector<double> weight;

    bool empty() const { return support.empty(); }
    std::size_t size() const { return support.size(); }

    int max_norm_sq() const { return support.empty() ? 0 : support.back().norm_sq(); }
    double max_norm() const { return std::sqrt(double(max_norm_sq())); }

    bool radially_symmetric() const
    {
        std::map<int, double> by_shell;
        for (std::size_t i = 0; i < support.size(); ++i) {
            auto [it, fresh] = by_shell.emplace(support[i].norm_sq(), weight[i]);
            if (!fresh && it->second != weight[i])
                return false;
        }
        return true;
    }
};

namespace detail {

inline double radial_weight(int norm_sq, double gamma)
{
    // even integer gamma: integer power, no pow() rounding
    if (gamma == std::floor(gamma) && std::fmod(gamma, 2.0) == 0.0) {
        double d = 1.0;
        for (int i = 0; i < int(gamma) / 2; ++i)
            d *= norm_sq;
        return 1.0 / d;
    }
    return std::pow(double(norm_sq), -0.5 * gamma);
}

inline ThetaWeights radial_weights(int lo_sq, int hi_sq, double gamma)
{
    ThetaWeights th;
    th.support = lattice_points(lo_sq, hi_sq);
    th.weight.reserve(th.support.size());
    int shell = -1;
    double w = 0;
    for (const auto& k : th.support) {
        if (k.norm_sq() != shell) {
            shell = k.norm_sq();
            w = radial_weight(shell, gamma);
        }
        th.weight.push_back(w);
    }
    return th;
}

} // namespace detail

/// |k|^-gamma on N <= |k| <= 2N.
inline ThetaWeights theta_shell(int N, double gamma)
{
    if (N < 1)
        throw std::domain_error("theta_shell: N must be >= 1");
    if (gamma < 0)
        throw std::domain_error("theta_shell: gamma must be >= 0");
    return detail::radial_weights(N * N, 4 * N * N, gamma);
}

/// |k|^-gamma on 1 <= |k| <= N, gamma in [0, 3/2].
inline ThetaWeights theta_ball(int N, double gamma)
{
    if (N < 1)
        throw std::domain_error("theta_ball: N must be >= 1");
    if (gamma < 0 || gamma > 1.5)
        throw std::domain_error("theta_ball: gamma must lie in [0, 3/2]");
    return detail::radial_weights(1, N * N, gamma);
}

inline ThetaNorms theta_norms(const ThetaWeights& th)
{
    NeumaierSum<double> l2, h1;
    ThetaNorms n;
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double w2 = th.weight[i] * th.weight[i];
        l2 += w2;
        h1 += w2 * th.support[i].norm_sq();
        n.linf = std::max(n.linf, th.weight[i]);
    }
    n.l2_sq = l2.value();
    n.h1_sq = h1.value();
    n.l2 = std::sqrt(n.l2_sq);
    n.h1 = std::sqrt(n.h1_sq);
    return n;
}

} // namespace tnoise
