// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/correlation.hpp"
#include "chanest/linalg.hpp"
#include "chanest/rng.hpp"

#include <limits>
#include <vector>

namespace chanest {

// Interferers form a homogeneous Poisson process of density lambda on the
// annulus gamma_o < |z| < gamma_m around the receiver.
struct PppScenario {
    double lambda = 0.1;
    double gamma_o = 2.0;
    double gamma_m = 5.0;
    double beta = 2.0;
    double e_x = 1.0;
    double omega = 1.0;
    double symbol_power = 1.0; // E|x|^2 of the interferers' symbols

    void validate() const;
    double mean_count() const;
};

struct Interferer {
    double radius;
    double angle;
    double alpha; // Rayleigh amplitude, E alpha^2 = omega
    double phase;
    cplx symbol;
};

using InterfererRealization = std::vector<Interferer>;

// Symbols are drawn uniformly from `constellation` (4-QAM when empty).
InterfererRealization sample_ppp(const PppScenario& scenario, Rng& rng,
                                 const std::vector<cplx>& constellation = {});

cplx aggregate_interference(const InterfererRealization& realization, const PppScenario& scenario);

// One tone: fresh point-process draw, fading and symbols.
cplx sample_tone_interference(const PppScenario& scenario, Rng& rng);

struct InterferenceMoments {
    double mean;
    double variance;
};

// gamma_m may be +infinity.
InterferenceMoments interference_moments(const PppScenario& scenario);

// sigma_i2 A R_tap A^H.
cmat interference_covariance_single(const cmat& a_p, const cmat& r_tap, double sigma_i2);

enum class InterferenceSynthesis {
    PerInterferer,     // sum of actual interferer terms over a PPP draw
    AnalyticEquivalent // Gaussian with the second moment matched
};

// Pilot-tone interference for all R antennas (RK vector). Interfering users
// reuse the desired user's pilots and have channels with statistics `stats`.
cvec synthesize_pilot_interference(const ChannelStats& stats, const cmat& a_p, const PppScenario& scenario,
                                   Rng& rng, InterferenceSynthesis mode = InterferenceSynthesis::PerInterferer);

double mse_ls_pc(int r, int l, double rho, int k, double sigma_i2, const rvec& deltas);
double mse_ls_pc_limit(int r, double sigma_i2, const rvec& deltas);
double mse_llmmse_pc(int r, const rvec& deltas, double rho, int k, double sigma_i2);
double mse_llmmse_pc_limit(int r, const rvec& deltas, double sigma_i2);
double mse_olmmse_pc(const rvec& etas, const rvec& deltas, double rho, int k, double sigma_i2);
double mse_olmmse_pc_limit(double trace_array, const rvec& deltas, double sigma_i2);

} // namespace chanest
