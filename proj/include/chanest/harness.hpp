// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/config.hpp"
#include "chanest/correlation.hpp"
#include "chanest/dlmmse.hpp"
#include "chanest/interference.hpp"
#include "chanest/ofdm.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace chanest {

enum class Estimator { LS, CLS, LLMMSE, OLMMSE, DLMMSE, DAD };

std::string estimator_name(Estimator e);

// Everything derived from a config that stays fixed across trials.
struct Scenario {
    ExperimentConfig cfg;
    ArrayGeometry geometry;
    ChannelStats stats;
    PilotPattern pilots;
    cmat a_p;
    cmat cfr_rows; // sqrt(N) F over all carriers: H = cfr_rows * h_r
    std::vector<cplx> constellation;

    int antennas() const { return stats.antennas(); }
    int taps() const { return stats.taps(); }
};

// r_array overrides the geometry-based spatial correlation when given.
Scenario make_scenario(const ExperimentConfig& cfg, std::optional<cmat> r_array = std::nullopt);

double noise_variance_for(double snr_db); // E_x = 1

struct TrialContext {
    const DlmmsePlan* plan = nullptr;          // for Estimator::DLMMSE
    std::optional<PppScenario> interference;   // pilot contamination when set
    InterferenceSynthesis synthesis = InterferenceSynthesis::PerInterferer;
    DlmmseOptions dad_options;                 // for Estimator::DAD
};

struct TrialResult {
    std::vector<double> sq_err;
    std::vector<double> seconds;
    std::vector<double> dlmmse_rounds; // squared error after each round when the plan traces
    bool ok = true;
    std::string error;
};

// One channel draw and one noise/interference draw shared by every estimator.
// Random streams are derived from trial_seed only, so the draws do not depend
// on which estimators run.
TrialResult run_trial(const Scenario& scn, double snr_db, const std::vector<Estimator>& estimators,
                      std::uint64_t trial_seed, const TrialContext& ctx);

// Welford accumulator of per-trial squared errors.
struct RunningStat {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double seconds = 0.0;

    void add(double x);
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderr_mean() const;
};

struct MseRow {
    double sweep = 0.0;
    std::string estimator;
    double empirical = 0.0;
    double analytic = std::numeric_limits<double>::quiet_NaN();
    double stderr_mse = 0.0;
    double seconds = 0.0;
    std::size_t trials = 0;
};

struct MseReport {
    std::string sweep_name;
    std::vector<MseRow> rows;

    const MseRow* find(const std::string& estimator, double sweep) const;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v); // 12 significant digits; empty for NaN
CsvTable to_table(const MseReport& report);
void emit_csv(const CsvTable& table, const std::string& path);
std::string csv_text(const CsvTable& table);

struct MomentRow {
    double lambda;
    double analytic_mean;
    double empirical_mean;
    double analytic_var;
    double empirical_var;
    std::size_t samples;
};

std::vector<MomentRow> interference_moment_table(const ExperimentConfig& cfg, std::size_t samples,
                                                 std::uint64_t seed);
CsvTable to_table(const std::vector<MomentRow>& rows);

// Analytic MSE of an estimator at the given SNR, NaN when no closed form applies.
double analytic_mse(const Scenario& scn, Estimator e, double snr_db, double sigma_i2 = 0.0);

// Monte Carlo over cfg.trials paired trials at one SNR.
std::vector<RunningStat> monte_carlo(const Scenario& scn, double snr_db, const std::vector<Estimator>& estimators,
                                     const TrialContext& ctx, int trials, std::uint64_t seed,
                                     std::size_t* discarded = nullptr);

struct ExperimentOutput {
    CsvTable main;
    std::vector<std::pair<std::string, CsvTable>> extra; // file suffix, table
    std::vector<MseReport> reports;
    std::vector<MomentRow> moments;
};

ExperimentOutput run_experiment(int preset, const ExperimentConfig& cfg);

// Invariant violations of a preset's output; empty when all hold.
std::vector<std::string> check_experiment(int preset, const ExperimentOutput& out, const ExperimentConfig& cfg);

// Median wall-clock seconds of `reps` calls.
template <class F>
double median_seconds(F&& fn, int reps = 5)
{
    std::vector<double> t;
    for (int i = 0; i < reps; ++i) {
        auto start = std::chrono::steady_clock::now();
        fn();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

struct TimingPoint {
    int antennas;
    double olmmse_seconds;
    double dlmmse_seconds;
};

// Times the dense centralized estimator against the distributed one (local
// output rule, information recursion included) on square arrays.
std::vector<TimingPoint> time_estimators(const ExperimentConfig& cfg, const std::vector<int>& sides, int reps = 5);

} // namespace chanest
