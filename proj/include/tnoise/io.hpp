#pragma once

// Run directories, CSV output and report metadata.

#include "tnoise/config.hpp"
#include "tnoise/rng.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace tnoise {

/// %.17g: round-trips every double; independent of locale as long as nobody calls setlocale.
inline std::string fmt_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
/// Short form for human-facing notes.
inline std::string fmt_short(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}
inline std::string fmt_num(int v) { return std::to_string(v); }
inline std::string fmt_num(long v) { return std::to_string(v); }
inline std::string fmt_num(std::size_t v) { return std::to_string(v); }
inline std::string fmt_num(bool v) { return v ? "1" : "0"; }

/// Comma-separated, header row, LF line endings, no timestamps.
class CsvWriter
{
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
        : out_(path, std::ios::binary), ncol_(header.size())
    {
        if (!out_)
            throw std::runtime_error("cannot write " + path.string());
        write_line(std::vector<std::string>(header));
    }

    template <typename... Ts>
    void row(const Ts&... vals)
    {
        static_assert(sizeof...(Ts) > 0);
        std::vector<std::string> cells{cell(vals)...};
        if (cells.size() != ncol_)
            throw std::logic_error("CsvWriter: column count mismatch");
        write_line(cells);
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <typename T>
    static std::string cell(const T& v) { return fmt_num(v); }

    void write_line(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t ncol_;
};

inline std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// TNOISE_OUTPUT_ROOT beats the config's output.root.
inline std::filesystem::path output_root(const Config& c)
{
    if (const char* env = std::getenv("TNOISE_OUTPUT_ROOT"); env && *env)
        return env;
    return c.output.root;
}

/// One directory per (subcommand, config); re-running overwrites in place.
inline std::filesystem::path run_directory(const Config& c, const std::string& subcommand)
{
    const std::string name = c.output.name.empty() ? subcommand + "-" + config_hash(c) : c.output.name;
    auto dir = output_root(c) / name;
    std::filesystem::create_directories(dir);
    return dir;
}

inline nlohmann::json run_metadata(const Config& c, const std::string& subcommand)
{
    return {{"subcommand", subcommand},
            {"version", tnoise_version},
            {"config_hash", config_hash(c)},
            {"rng_algorithm", rng_algorithm_id},
            {"seed", c.seed},
            {"timestamp", utc_timestamp()},
            {"config", nlohmann::json(c)}};
}

struct Check
{
    std::string name;
    double value;
    double limit;
    bool pass;
    std::string note;
};

inline nlohmann::json checks_json(const std::vector<Check>& checks)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ch : checks)
        arr.push_back({{"name", ch.name}, {"value", ch.value}, {"limit", ch.limit}, {"pass", ch.pass},
                       {"note", ch.note}});
    return arr;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace tnoise
