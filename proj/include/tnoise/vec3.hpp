#pragma once

#include <cmath>
#include <complex>

namespace tnoise {

using cplx = std::complex<double>;

struct Vec3
{
    double x = 0, y = 0, z = 0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Complex 3-vector: one Fourier coefficient of a vector field.
struct CVec3
{
    cplx x{}, y{}, z{};

    cplx operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    cplx& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    CVec3& operator+=(const CVec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    CVec3& operator-=(const CVec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    CVec3& operator*=(cplx s) { x *= s; y *= s; z *= s; return *this; }
    friend CVec3 operator+(CVec3 a, const CVec3& b) { return a += b; }
    friend CVec3 operator-(CVec3 a, const CVec3& b) { return a -= b; }
    friend CVec3 operator-(const CVec3& a) { return {-a.x, -a.y, -a.z}; }
    friend CVec3 operator*(cplx s, CVec3 a) { return a *= s; }
    friend CVec3 operator*(CVec3 a, cplx s) { return a *= s; }
    friend bool operator==(const CVec3&, const CVec3&) = default;
};

inline CVec3 to_complex(const Vec3& v) { return {v.x, v.y, v.z}; }
inline CVec3 conj(const CVec3& v) { return {std::conj(v.x), std::conj(v.y), std::conj(v.z)}; }

// Bilinear (no conjugation) products with real vectors.
inline cplx dot(const Vec3& a, const CVec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline cplx dot(const CVec3& a, const Vec3& b) { return dot(b, a); }
inline CVec3 cross(const Vec3& a, const CVec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 cross(const CVec3& a, const CVec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 operator*(const Vec3& v, cplx s) { return {v.x * s, v.y * s, v.z * s}; }
inline CVec3 operator*(cplx s, const Vec3& v) { return v * s; }

// Sesquilinear inner product a . conj(b).
inline cplx inner(const CVec3& a, const CVec3& b)
{
    return a.x * std::conj(b.x) + a.y * std::conj(b.y) + a.z * std::conj(b.z);
}
inline double norm_sq(const CVec3& a) { return std::norm(a.x) + std::norm(a.y) + std::norm(a.z); }
inline double norm(const CVec3& a) { return std::sqrt(norm_sq(a)); }

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx two_pi_i{0.0, 2.0 * pi};

} // namespace tnoise
