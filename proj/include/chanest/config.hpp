// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/correlation.hpp"
#include "chanest/interference.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chanest {

struct ExperimentConfig {
    ArrayGeometry geometry;
    int n_subcarriers = 64;
    int n_pilots = 16;
    int qam_order = 4;
    int l_taps = 4;
    double decay = 1.0;
    std::vector<double> snr_db = {0.0, 10.0, 20.0};
    std::vector<double> lambdas = {0.1, 0.01, 0.5}; // empty: no interference scenario
    double gamma_o = 2.0;
    double gamma_m = 5.0;
    double beta = 2.0;
    int trials = 100;
    int dlmmse_d = 3;
    double dlmmse_a = 1e-6;
    std::uint64_t seed = 1;
    // Fill the seconds column of presets 1-4 (wall-clock, so not reproducible).
    // Preset 5 always reports its timings.
    bool record_timings = false;

    void validate() const;
    PppScenario ppp(double lambda) const;
};

// 6x6 array, N=64, K=16, L=4.
ExperimentConfig desk_profile();
// 10x10 array, N=256, K=32, L=8.
ExperimentConfig paper_profile();
ExperimentConfig profile_by_name(const std::string& name);

// Applies "key = value" lines; '#' starts a comment; lists are comma separated.
// Unknown keys and malformed values throw std::invalid_argument.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

} // namespace chanest
