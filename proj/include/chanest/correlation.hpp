// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/linalg.hpp"
#include "chanest/rng.hpp"

#include <vector>

namespace chanest {

// Uniform planar array of m_rows x g_cols elements. Antennas are indexed
// 0-based with the row index running fastest: r = m + m_rows * g.
// Spacings are in wavelengths, angles in radians.
struct ArrayGeometry {
    int m_rows = 1;
    int g_cols = 1;
    double dx = 0.5;
    double dy = 0.5;
    double phi = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double xi = 0.0;

    int antenna_count() const { return m_rows * g_cols; }
    int index(int m, int g) const { return m + m_rows * g; }
    int row_of(int r) const { return r % m_rows; }
    int col_of(int r) const { return r / m_rows; }
    void validate() const;
};

enum class ArrayModel { Exact, Kronecker };

cplx spatial_correlation_entry(const ArrayGeometry& geom, int r, int r_prime);

// Exact model, or R_az (g_cols x g_cols) kron R_el (m_rows x m_rows).
cmat build_r_array(const ArrayGeometry& geom, ArrayModel model = ArrayModel::Exact);
cmat build_r_el(const ArrayGeometry& geom);
cmat build_r_az(const ArrayGeometry& geom);

// diag(exp(-decay * tau)), tau = 0..l_taps-1.
cmat build_r_tap(int l_taps, double decay = 1.0);

// Kronecker channel statistics R_h = r_array kron r_tap together with the
// eigen data used by the closed-form oracles and the sampler.
class ChannelStats {
public:
    ChannelStats(cmat r_array, cmat r_tap);

    int antennas() const { return static_cast<int>(r_array_.rows()); }
    int taps() const { return static_cast<int>(r_tap_.rows()); }
    Eigen::Index dim() const { return r_array_.rows() * r_tap_.rows(); }

    const cmat& r_array() const { return r_array_; }
    const cmat& r_tap() const { return r_tap_; }
    const rvec& eigenvalues_array() const { return eta_; }
    const rvec& eigenvalues_tap() const { return delta_; }

    // Unitary eigenvectors with columns ordered like the descending eigenvalues.
    const cmat& eigenvectors_array() const { return v_array_; }
    const cmat& eigenvectors_tap() const { return q_tap_; }

    const cmat& sqrt_array() const { return sqrt_array_; }
    const cmat& sqrt_tap() const { return sqrt_tap_; }

    // Block (r, r') of R_h.
    cmat block(int r, int r_prime) const { return r_array_(r, r_prime) * r_tap_; }

    // Dense R_h; refused when R * L exceeds max_dim.
    cmat composite(Eigen::Index max_dim = kMaterializationCap) const;

    // Prior of the sub-vector of antennas listed in `antennas`, in that order.
    cmat composite_subset(const std::vector<int>& antennas) const;

    static constexpr Eigen::Index kMaterializationCap = 4096;

private:
    cmat r_array_;
    cmat r_tap_;
    rvec eta_;
    rvec delta_;
    cmat v_array_;
    cmat q_tap_;
    cmat sqrt_array_;
    cmat sqrt_tap_;
};

// h = (S_a kron S_t) g; the R x L block layout is (S_t G S_a^T) column-wise,
// returned as an RL vector with antenna r at rows [rL, rL + L).
cvec sample_channel(const ChannelStats& stats, Rng& rng);

} // namespace chanest
