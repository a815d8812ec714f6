// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/config.hpp"
#include "chanest/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

int parse_preset(const std::string& name)
{
    std::string digits = name.rfind("preset", 0) == 0 ? name.substr(6) : name;
    if (digits.size() != 1 || digits[0] < '1' || digits[0] > '5')
        throw std::invalid_argument("unknown preset '" + name + "' (expected preset1..preset5)");
    return digits[0] - '0';
}

std::string sibling_path(const std::string& out, const std::string& suffix)
{
    std::filesystem::path p(out);
    std::filesystem::path name = p.stem();
    name += suffix;
    name += p.has_extension() ? p.extension() : std::filesystem::path(".csv");
    return (p.parent_path() / name).string();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Massive MIMO-OFDM channel estimation experiments"};
    app.require_subcommand(1);

    std::string preset_name;
    std::string config_path;
    std::string out_path;
    std::string profile = "desk";
    std::optional<std::uint64_t> seed;
    bool check = false;
    bool timings = false;

    CLI::App* exp = app.add_subcommand("experiment", "Run an experiment preset and write CSV results");
    exp->add_option("preset", preset_name, "preset1..preset5")->required();
    exp->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    exp->add_option("--out", out_path, "CSV output path (stdout when omitted)");
    exp->add_option("--seed", seed, "master seed (overrides the config)");
    exp->add_option("--profile", profile, "base profile")->check(CLI::IsMember({"desk", "paper"}));
    exp->add_flag("--check", check, "exit nonzero when an invariant of the preset is violated");
    exp->add_flag("--timings", timings, "fill the seconds column of presets 1-4 (not reproducible)");

    CLI11_PARSE(app, argc, argv);

    try {
        int preset = parse_preset(preset_name);
        chanest::ExperimentConfig cfg = chanest::profile_by_name(profile);
        if (!config_path.empty())
            chanest::apply_config_file(cfg, config_path);
        if (seed)
            cfg.seed = *seed;
        cfg.record_timings = timings;
        cfg.validate();

        chanest::ExperimentOutput out = chanest::run_experiment(preset, cfg);
        if (out_path.empty()) {
            std::cout << chanest::csv_text(out.main);
            for (const auto& [suffix, table] : out.extra)
                std::cout << '\n' << chanest::csv_text(table);
        } else {
            chanest::emit_csv(out.main, out_path);
            for (const auto& [suffix, table] : out.extra)
                chanest::emit_csv(table, sibling_path(out_path, suffix));
        }

        if (check) {
            auto bad = chanest::check_experiment(preset, out, cfg);
            for (const std::string& msg : bad)
                std::cerr << "violation: " << msg << '\n';
            if (!bad.empty())
                return 2;
            std::cerr << "all invariants hold\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
