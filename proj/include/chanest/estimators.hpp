// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/correlation.hpp"
#include "chanest/linalg.hpp"

#include <vector>

namespace chanest {

// Estimate with its error covariance. When `weighted` is set, h_hat holds
// P * h and err_cov holds P = C_e^-1.
struct EstimateWithCovariance {
    cvec h_hat;
    cmat err_cov;
    bool weighted = false;

    EstimateWithCovariance to_weighted() const;
    EstimateWithCovariance to_plain() const;
};

// (A^H A)^-1 A^H y. Throws std::invalid_argument when K < L or A^H A is singular.
cvec ls_estimate(const cvec& y, const cmat& a_p);

// Per-antenna LS on the stacked RK observation; bitwise equal to ls_estimate
// applied block by block.
cvec cls_estimate(const cvec& y_all, const cmat& a_p);

// Localized LMMSE for one antenna. With interference_var = 0 the information
// form (R^-1 + A^H A / s2)^-1 A^H y / s2 is used; otherwise the noise
// covariance s2 I + interference_var A R A^H enters through the covariance form.
EstimateWithCovariance llmmse_estimate(const cvec& y, const cmat& a_p, const cmat& r_tap,
                                       double noise_var, double interference_var = 0.0);

// Applies llmmse_estimate to every antenna block; returns the RL estimate.
cvec llmmse_estimate_all(const cvec& y_all, const cmat& a_p, const cmat& r_tap,
                         double noise_var, double interference_var = 0.0);

enum class OlmmseRoute { Auto, Eigen, Dense };

// Centralized LMMSE across all antennas. The eigen route diagonalizes with
// V kron Q and needs A^H A = c I; the dense route materializes R_h (subject to
// the materialization cap).
EstimateWithCovariance olmmse_estimate(const cvec& y_all, const cmat& a_p, const ChannelStats& stats,
                                       double noise_var, double interference_var = 0.0,
                                       OlmmseRoute route = OlmmseRoute::Auto,
                                       bool with_covariance = true);

// Returns c when a^H a = c I within tol, otherwise a negative value.
double gram_scale(const cmat& a_p, double tol = 1e-10);

double mse_ls_awgn(int r, int l, double rho, int k);
double mse_llmmse_awgn(int r, const rvec& deltas, double rho, int k);
double mse_olmmse_awgn(const rvec& etas, const rvec& deltas, double rho, int k);

} // namespace chanest
