// tnoise: command-line driver. Every --key.path flag overrides a config key.

#include "tnoise/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

namespace {

enum Exit { ok = 0, check_failure = 1, usage_error = 2, runtime_failure = 3 };

tnoise::Config apply_overrides(tnoise::Config c, const std::vector<std::string>& extras)
{
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& a = extras[i];
        if (a.rfind("--", 0) != 0 || a.size() <= 2)
            throw tnoise::ConfigError("unexpected argument '" + a + "' (overrides look like --key value)");
        std::string key = a.substr(2), value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= extras.size())
                throw tnoise::ConfigError("--" + key + ": missing value");
            value = extras[++i];
        }
        c = tnoise::apply_override(c, key, value);
    }
    return c;
}

void print_checks(const tnoise::RunOutcome& r)
{
    for (const auto& ch : r.checks)
        std::printf("%s  %-40s value=%-24s limit=%s%s%s\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(),
                    tnoise::fmt_num(ch.value).c_str(), tnoise::fmt_short(ch.limit).c_str(),
                    ch.note.empty() ? "" : "  # ", ch.note.c_str());
    std::printf("output: %s\n", r.dir.string().c_str());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transport-noise Navier-Stokes spectral laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tnoise::tnoise_version);

    std::string config_path;
    bool print_config = false;
    std::vector<CLI::App*> subs;
    const std::map<std::string, std::string> blurb{
        {"verify-identities", "covariance, corrector and advection identities on seeded fields"},
        {"corrector-limit", "lattice sums of the corrector scaling limit over an N ladder"},
        {"simulate", "Monte-Carlo paths of the cut-off Galerkin SDE"},
        {"scaling-limit", "distance of noisy paths to the enhanced-viscosity deterministic solution"},
        {"decay", "small-data decay envelopes for the deterministic solver"},
        {"long-horizon", "long-time mechanism: small-norm time and continuation without cut-off"},
    };
    for (const auto& [name, fn] : tnoise::subcommands()) {
        auto* s = app.add_subcommand(name, blurb.at(name));
        s->add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        s->add_flag("--print-config", print_config, "print the resolved config and exit");
        s->allow_extras();
        s->footer("Any other --key.path value (or --key.path=value) overrides the config key, "
                  "e.g. --N 4,8,16,32 --l 1,0,0 --scheme.threads 2");
        subs.push_back(s);
    }

    if (argc > 1 && argv[1][0] != '-' && !tnoise::subcommands().count(argv[1])) {
        std::cerr << "unknown subcommand '" << argv[1] << "'\n\n" << app.help();
        return usage_error;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return usage_error;
    }

    CLI::App* sub = app.get_subcommands().front();
    tnoise::Config cfg;
    try {
        if (!config_path.empty())
            cfg = tnoise::load_config_file(config_path);
        cfg = apply_overrides(cfg, sub->remaining());
        tnoise::validate(cfg);
    } catch (const tnoise::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return usage_error;
    }
    if (print_config) {
        std::cout << nlohmann::json(cfg).dump(2) << '\n';
        return ok;
    }

    try {
        const auto result = tnoise::subcommands().at(sub->get_name())(cfg);
        print_checks(result);
        return result.pass() ? ok : check_failure;
    } catch (const tnoise::IntegrationError& e) {
        std::cerr << "integration failure at t=" << e.time << ": " << e.what() << '\n';
        return runtime_failure;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return runtime_failure;
    }
}
