#pragma once

// Field checkpoints: JSON mode list and a little-endian binary layout
//   "TNSF" | u32 version | i32 M | u64 count | count x (3 x i32, 6 x f64)

#include "tnoise/field.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tnoise {

inline constexpr std::uint32_t field_format_version = 1;

inline nlohmann::json field_to_json(const SpectralField& f)
{
    nlohmann::json modes = nlohmann::json::array();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const IVec3 l = f.modes().mode(i);
        const CVec3& v = f[i];
        modes.push_back({l.x, l.y, l.z, v.x.real(), v.x.imag(), v.y.real(), v.y.imag(), v.z.real(), v.z.imag()});
    }
    return {{"format", "tnoise-field"}, {"version", field_format_version}, {"M", f.M()}, {"modes", modes}};
}

inline SpectralField field_from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "tnoise-field" || j.value("version", 0u) != field_format_version)
        throw std::runtime_error("field json: unsupported format or version");
    SpectralField f(j.at("M").get<int>());
    for (const auto& m : j.at("modes")) {
        if (m.size() != 9)
            throw std::runtime_error("field json: mode entries need 3 ints + 6 floats");
        const IVec3 l{m[0].get<int>(), m[1].get<int>(), m[2].get<int>()};
        f.set(l, {{m[3].get<double>(), m[4].get<double>()},
                  {m[5].get<double>(), m[6].get<double>()},
                  {m[7].get<double>(), m[8].get<double>()}});
    }
    return f;
}

namespace detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& in)
{
    unsigned char b[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(T)))
        throw std::runtime_error("field binary: truncated input");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

} // namespace detail

inline void write_field_binary(std::ostream& out, const SpectralField& f)
{
    out.write("TNSF", 4);
    detail::put_le<std::uint32_t>(out, field_format_version);
    detail::put_le<std::int32_t>(out, f.M());
    detail::put_le<std::uint64_t>(out, f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const IVec3 l = f.modes().mode(i);
        detail::put_le<std::int32_t>(out, l.x);
        detail::put_le<std::int32_t>(out, l.y);
        detail::put_le<std::int32_t>(out, l.z);
        for (int c = 0; c < 3; ++c) {
            detail::put_le<double>(out, f[i][c].real());
            detail::put_le<double>(out, f[i][c].imag());
        }
    }
}

inline SpectralField read_field_binary(std::istream& in)
{
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "TNSF", 4) != 0)
        throw std::runtime_error("field binary: bad magic");
    if (detail::get_le<std::uint32_t>(in) != field_format_version)
        throw std::runtime_error("field binary: unsupported version");
    SpectralField f(detail::get_le<std::int32_t>(in));
    const auto count = detail::get_le<std::uint64_t>(in);
    for (std::uint64_t n = 0; n < count; ++n) {
        IVec3 l;
        l.x = detail::get_le<std::int32_t>(in);
        l.y = detail::get_le<std::int32_t>(in);
        l.z = detail::get_le<std::int32_t>(in);
        CVec3 v;
        for (int c = 0; c < 3; ++c) {
            const double re = detail::get_le<double>(in);
            const double im = detail::get_le<double>(in);
            v[c] = {re, im};
        }
        f.set(l, v);
    }
    return f;
}

inline void save_field(const std::string& path, const SpectralField& f)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    write_field_binary(out, f);
}

inline SpectralField load_field(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    return read_field_binary(in);
}

} // namespace tnoise
