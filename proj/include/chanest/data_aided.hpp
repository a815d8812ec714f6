// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/correlation.hpp"
#include "chanest/dlmmse.hpp"
#include "chanest/estimators.hpp"
#include "chanest/ofdm.hpp"

#include <optional>
#include <vector>

namespace chanest {

inline constexpr double kMinCfrPower = 1e-12;

// y / h, or nothing when |h|^2 is below kMinCfrPower.
std::optional<cplx> zf_equalize(cplx y, cplx h_hat);

// Ratio of the Gaussian density at the nearest constellation point to the sum
// of densities at all other points, for distortion variance noise_var_k.
double reliability_metric(cplx x_hat, double noise_var_k, const std::vector<cplx>& constellation);
double log_reliability_metric(cplx x_hat, double noise_var_k, const std::vector<cplx>& constellation);

struct ReliabilitySet {
    std::vector<int> indices;   // carrier indices with metric > 1
    std::vector<double> metric; // metric of every member
    std::vector<int> decisions; // constellation index of every member
};

// x_hat and h_hat are aligned with `carriers`. Per-carrier distortion
// variance is noise_var / |h_hat|^2; carriers with a vanishing CFR are skipped.
ReliabilitySet select_reliable(const cvec& x_hat, const cvec& h_hat, const std::vector<int>& carriers,
                               double noise_var, const std::vector<cplx>& constellation);

// Block RLS update of (h_hat, c_e) with extra observations y_d = a_d h + w,
// Cov(w) = r_w. a_d narrower than h_hat is zero-padded on the right.
EstimateWithCovariance rls_refine(const cvec& h_hat, const cmat& c_e, const cmat& a_d, const cvec& y_d,
                                  const cmat& r_w);

struct DadResult {
    DlmmseResult estimate;
    std::vector<ReliabilitySet> reliable;
};

// rx[r] is the received OFDM symbol of antenna r over all n carriers.
DadResult run_dad_lmmse(const std::vector<cvec>& rx, const PilotPattern& pilots, int n, const ArrayGeometry& geom,
                        const ChannelStats& stats, double noise_var, const std::vector<cplx>& constellation,
                        const DlmmseOptions& options = {});

} // namespace chanest
