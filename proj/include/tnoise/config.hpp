#pragma once

// Versioned JSON run configuration with typed dotted-path overrides.

#include "tnoise/lattice.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnoise {

inline constexpr int config_schema_version = 1;
inline constexpr const char* tnoise_version = "0.1.0";

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Config
{
    int schema_version = config_schema_version;
    int M = 6;
    std::string theta_kind = "shell";
    std::vector<int> N{4, 16};
    std::vector<double> gamma{1.0};
    std::vector<int> l{1, 0, 0};
    int beta = 1;
    double nu = 5;
    double R = 1e3;
    double R0 = 5;
    double delta = 0.25;
    double dt = 1e-3;
    double T = 0.5;
    std::uint64_t seed = 1;
    int samples = 20;
    int ic_band = 2;
    int ic_family = 1;
    double C0 = 1;
    double eps = 0.5;
    double extra_T = 0.5;
    double nu1 = 1;            // decay: viscosity of the deterministic run
    double norm_fraction = 0.5;   // decay: |xi0| as a fraction of the small-data radius

    struct Scheme
    {
        int threads = 1;
        double growth_guard = 1e8;
        int output_every = 1;
        bool checkpoint = false;
    } scheme;

    struct Checks
    {
        double tolerance = 1e-10;
        double covariance_tol = 1e-12;
        double ratio = 0.7;
        double rate_lo = -1.3;
        double rate_hi = -0.7;
        double heuristic_rel = 0.05;
        double median_ratio = 0.75;
        double bracket_tol = 1e-12;
        int bracket_stride = 1;
    } checks;

    struct Output
    {
        std::string root = "runs";
        std::string name;
    } output;

    IVec3 lvec() const { return {l.at(0), l.at(1), l.at(2)}; }
};

inline void to_json(nlohmann::json& j, const Config::Scheme& s)
{
    j = {{"threads", s.threads}, {"growth_guard", s.growth_guard}, {"output_every", s.output_every},
         {"checkpoint", s.checkpoint}};
}
inline void to_json(nlohmann::json& j, const Config::Checks& c)
{
    j = {{"tolerance", c.tolerance}, {"covariance_tol", c.covariance_tol}, {"ratio", c.ratio},
         {"rate_lo", c.rate_lo}, {"rate_hi", c.rate_hi}, {"heuristic_rel", c.heuristic_rel},
         {"median_ratio", c.median_ratio}, {"bracket_tol", c.bracket_tol}, {"bracket_stride", c.bracket_stride}};
}
inline void to_json(nlohmann::json& j, const Config::Output& o) { j = {{"root", o.root}, {"name", o.name}}; }

inline void to_json(nlohmann::json& j, const Config& c)
{
    j = {{"schema_version", c.schema_version}, {"M", c.M}, {"theta_kind", c.theta_kind}, {"N", c.N},
         {"gamma", c.gamma}, {"l", c.l}, {"beta", c.beta}, {"nu", c.nu}, {"R", c.R}, {"R0", c.R0},
         {"delta", c.delta}, {"dt", c.dt}, {"T", c.T}, {"seed", c.seed}, {"samples", c.samples},
         {"ic_band", c.ic_band}, {"ic_family", c.ic_family}, {"C0", c.C0}, {"eps", c.eps},
         {"extra_T", c.extra_T}, {"nu1", c.nu1}, {"norm_fraction", c.norm_fraction},
         {"scheme", c.scheme}, {"checks", c.checks}, {"output", c.output}};
}

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& dst, const std::string& path)
{
    if (!j.contains(key))
        return;
    try {
        dst = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path + key + ": wrong type (" + j.at(key).dump() + ")");
    }
}

inline void reject_unknown(const nlohmann::json& given, const nlohmann::json& known, const std::string& path)
{
    for (auto it = given.begin(); it != given.end(); ++it) {
        if (!known.contains(it.key()))
            throw ConfigError("unknown key: " + path + it.key());
        if (it->is_object() && known.at(it.key()).is_object())
            reject_unknown(*it, known.at(it.key()), path + it.key() + ".");
    }
}

} // namespace detail

inline void from_json(const nlohmann::json& j, Config& c)
{
    if (!j.is_object())
        throw ConfigError("config root must be a JSON object");
    detail::reject_unknown(j, nlohmann::json(Config{}), "");
    using detail::read_field;
    read_field(j, "schema_version", c.schema_version, "");
    read_field(j, "M", c.M, "");
    read_field(j, "theta_kind", c.theta_kind, "");
    read_field(j, "N", c.N, "");
    read_field(j, "gamma", c.gamma, "");
    read_field(j, "l", c.l, "");
    read_field(j, "beta", c.beta, "");
    read_field(j, "nu", c.nu, "");
    read_field(j, "R", c.R, "");
    read_field(j, "R0", c.R0, "");
    read_field(j, "delta", c.delta, "");
    read_field(j, "dt", c.dt, "");
    read_field(j, "T", c.T, "");
    read_field(j, "seed", c.seed, "");
    read_field(j, "samples", c.samples, "");
    read_field(j, "ic_band", c.ic_band, "");
    read_field(j, "ic_family", c.ic_family, "");
    read_field(j, "C0", c.C0, "");
    read_field(j, "eps", c.eps, "");
    read_field(j, "extra_T", c.extra_T, "");
    read_field(j, "nu1", c.nu1, "");
    read_field(j, "norm_fraction", c.norm_fraction, "");
    if (j.contains("scheme")) {
        const auto& s = j.at("scheme");
        read_field(s, "threads", c.scheme.threads, "scheme.");
        read_field(s, "growth_guard", c.scheme.growth_guard, "scheme.");
        read_field(s, "output_every", c.scheme.output_every, "scheme.");
        read_field(s, "checkpoint", c.scheme.checkpoint, "scheme.");
    }
    if (j.contains("checks")) {
        const auto& s = j.at("checks");
        read_field(s, "tolerance", c.checks.tolerance, "checks.");
        read_field(s, "covariance_tol", c.checks.covariance_tol, "checks.");
        read_field(s, "ratio", c.checks.ratio, "checks.");
        read_field(s, "rate_lo", c.checks.rate_lo, "checks.");
        read_field(s, "rate_hi", c.checks.rate_hi, "checks.");
        read_field(s, "heuristic_rel", c.checks.heuristic_rel, "checks.");
        read_field(s, "median_ratio", c.checks.median_ratio, "checks.");
        read_field(s, "bracket_tol", c.checks.bracket_tol, "checks.");
        read_field(s, "bracket_stride", c.checks.bracket_stride, "checks.");
    }
    if (j.contains("output")) {
        read_field(j.at("output"), "root", c.output.root, "output.");
        read_field(j.at("output"), "name", c.output.name, "output.");
    }
}

/// Field-level validation; throws ConfigError naming the offending key.
inline void validate(const Config& c)
{
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
    if (c.schema_version != config_schema_version)
        fail("schema_version", "unsupported version " + std::to_string(c.schema_version));
    if (c.M < 1)
        fail("M", "must be >= 1");
    if (c.theta_kind != "shell" && c.theta_kind != "ball")
        fail("theta_kind", "must be \"shell\" or \"ball\"");
    if (c.N.empty())
        fail("N", "must be a non-empty list");
    for (int n : c.N)
        if (n < 1)
            fail("N", "entries must be >= 1");
    if (c.gamma.empty())
        fail("gamma", "must be a non-empty list");
    for (double g : c.gamma) {
        if (g < 0)
            fail("gamma", "entries must be >= 0");
        if (c.theta_kind == "ball" && g > 1.5)
            fail("gamma", "ball weights need gamma in [0, 3/2]");
    }
    if (c.l.size() != 3 || (c.l[0] == 0 && c.l[1] == 0 && c.l[2] == 0))
        fail("l", "must be a nonzero integer triple");
    if (c.beta != 1 && c.beta != 2)
        fail("beta", "must be 1 or 2");
    if (!(c.nu >= 0))
        fail("nu", "must be >= 0");
    if (!(c.R > 0))
        fail("R", "must be > 0");
    if (!(c.R0 >= 0))
        fail("R0", "must be >= 0");
    if (!(c.delta > 0 && c.delta < 0.5))
        fail("delta", "must lie in (0, 1/2)");
    if (!(c.dt > 0))
        fail("dt", "must be > 0");
    if (!(c.T > 0))
        fail("T", "must be > 0");
    if (c.samples < 1)
        fail("samples", "must be >= 1");
    if (c.ic_band < 1)
        fail("ic_band", "must be >= 1");
    if (c.ic_family < 1)
        fail("ic_family", "must be >= 1");
    if (!(c.C0 > 0))
        fail("C0", "must be > 0");
    if (!(c.eps > 0))
        fail("eps", "must be > 0");
    if (!(c.extra_T >= 0))
        fail("extra_T", "must be >= 0");
    if (!(c.nu1 > 0))
        fail("nu1", "must be > 0");
    if (!(c.norm_fraction >= 0))
        fail("norm_fraction", "must be >= 0");
    if (c.scheme.threads < 1)
        fail("scheme.threads", "must be >= 1");
    if (!(c.scheme.growth_guard > 0))
        fail("scheme.growth_guard", "must be > 0");
    if (c.scheme.output_every < 1)
        fail("scheme.output_every", "must be >= 1");
    if (c.checks.bracket_stride < 1)
        fail("checks.bracket_stride", "must be >= 1");
}

/// Canonical text: sorted keys, compact.
inline std::string canonical(const Config& c) { return nlohmann::json(c).dump(); }

inline std::uint64_t fnv1a64(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

// where the output goes does not change what is computed
inline std::string config_hash(const Config& c)
{
    nlohmann::json j = c;
    j.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

inline Config parse_config(const nlohmann::json& j)
{
    Config c;
    from_json(j, c);
    return c;
}

inline Config load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

namespace detail {

inline nlohmann::json parse_scalar_like(const std::string& key, const std::string& text, const nlohmann::json& like)
{
    try {
        if (like.is_boolean()) {
            if (text == "true" || text == "1")
                return true;
            if (text == "false" || text == "0")
                return false;
            throw ConfigError(key + ": expected true/false, got \"" + text + "\"");
        }
        std::size_t pos = 0;
        if (like.is_number_unsigned()) {
            if (!text.empty() && text[0] == '-')
                throw ConfigError(key + ": expected a non-negative integer, got \"" + text + "\"");
            const unsigned long long v = std::stoull(text, &pos, 0);
            if (pos != text.size())
                throw std::invalid_argument("");
            return v;
        }
        if (like.is_number_integer()) {
            const long long v = std::stoll(text, &pos);
            if (pos != text.size())
                throw std::invalid_argument("");
            return v;
        }
        if (like.is_number()) {
            const double v = std::stod(text, &pos);
            if (pos != text.size())
                throw std::invalid_argument("");
            return v;
        }
        if (like.is_string())
            return text;
    } catch (const std::logic_error&) {
        throw ConfigError(key + ": cannot parse \"" + text + "\"");
    }
    throw ConfigError(key + ": cannot be overridden from the command line");
}

} // namespace detail

/// Apply `key.path = text`; the type is taken from the current value.
inline Config apply_override(const Config& c, const std::string& key, const std::string& text)
{
    nlohmann::json j = c;
    nlohmann::json* node = &j;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (!node->is_object() || !node->contains(part))
            throw ConfigError("unknown key: " + key);
        node = &(*node)[part];
    }
    if (node->is_array()) {
        const nlohmann::json like = node->empty() ? nlohmann::json(0.0) : (*node)[0];
        nlohmann::json arr = nlohmann::json::array();
        std::stringstream items(text);
        std::string item;
        while (std::getline(items, item, ','))
            arr.push_back(detail::parse_scalar_like(key, item, like.is_number_integer() ? nlohmann::json(0) : like));
        *node = arr;
    } else if (node->is_object()) {
        throw ConfigError(key + ": is a group of keys, not a value");
    } else {
        *node = detail::parse_scalar_like(key, text, *node);
    }
    return parse_config(j);
}

} // namespace tnoise
