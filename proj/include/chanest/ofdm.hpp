// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/linalg.hpp"
#include "chanest/rng.hpp"

#include <optional>
#include <vector>

namespace chanest {

struct OfdmConfig {
    int n_subcarriers = 64;
    int n_pilots = 16;
    int qam_order = 4;
    double noise_variance = 1.0;
    double symbol_energy = 1.0;

    void validate() const;
};

struct PilotPattern {
    std::vector<int> indices;
    std::vector<cplx> symbols;
};

// Gray-labelled square QAM with unit mean power. Symbol i carries label i.
std::vector<cplx> qam_constellation(int order);

// Index of the nearest constellation point.
int nearest_symbol(cplx x, const std::vector<cplx>& constellation);

// First l columns of the unitary n-point DFT.
cmat truncated_dft(int n, int l);

std::vector<int> uniform_pilot_indices(int n, int k);

// Constant-modulus 4-QAM pilot sequence scaled to symbol energy e_x.
std::vector<cplx> default_pilot_symbols(int k, double e_x = 1.0);

PilotPattern make_pilot_pattern(const OfdmConfig& cfg);

// Carriers not used by pilots, ascending.
std::vector<int> data_indices(int n, const std::vector<int>& pilots);

// sqrt(n) diag(symbols) F(indices, 0:l); general row selection.
cmat observation_rows(int n, const std::vector<int>& indices, const std::vector<cplx>& symbols, int l);

cmat build_observation_matrix(const OfdmConfig& cfg, const PilotPattern& pattern, int l);

// Frequency response sqrt(n) F h over all n carriers.
cvec channel_frequency_response(const cvec& h_r, int n);

// One received OFDM symbol over all carriers: cfr .* tx + w.
cvec synthesize_ofdm_symbol(const cvec& cfr, const std::vector<cplx>& tx, double noise_var, Rng& rng);

cvec synthesize_rx(const cvec& h_r, const cmat& a_p, double noise_var,
                   const std::optional<cvec>& interference, Rng& rng);

} // namespace chanest
