// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/ofdm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chanest {

void OfdmConfig::validate() const
{
    if (n_subcarriers < 1 || n_pilots < 1 || n_pilots > n_subcarriers)
        throw std::invalid_argument("OfdmConfig: need 1 <= K <= N");
    if (qam_order != 4 && qam_order != 16 && qam_order != 64)
        throw std::invalid_argument("OfdmConfig: unsupported QAM order");
    if (noise_variance < 0.0 || !(symbol_energy > 0.0))
        throw std::invalid_argument("OfdmConfig: invalid noise variance or symbol energy");
}

std::vector<cplx> qam_constellation(int order)
{
    int bits_per_axis;
    switch (order) {
    case 4: bits_per_axis = 1; break;
    case 16: bits_per_axis = 2; break;
    case 64: bits_per_axis = 3; break;
    default: throw std::invalid_argument("qam_constellation: order must be 4, 16 or 64");
    }
    int side = 1 << bits_per_axis;
    // E|x|^2 of the unscaled grid {+-1, +-3, ...} on both axes.
    double scale = std::sqrt(2.0 * (side * side - 1) / 3.0);
    auto level = [side](int gray) {
        int bin = gray;
        for (int shift = gray >> 1; shift; shift >>= 1)
            bin ^= shift;
        return 2.0 * bin - (side - 1);
    };
    std::vector<cplx> points(order);
    for (int label = 0; label < order; ++label) {
        int i_bits = label >> bits_per_axis;
        int q_bits = label & (side - 1);
        points[label] = cplx(level(i_bits), level(q_bits)) / scale;
    }
    return points;
}

int nearest_symbol(cplx x, const std::vector<cplx>& constellation)
{
    if (constellation.empty())
        throw std::invalid_argument("nearest_symbol: empty constellation");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < constellation.size(); ++i) {
        double d = std::norm(x - constellation[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

cmat truncated_dft(int n, int l)
{
    if (n < 1 || l < 1 || l > n)
        throw std::invalid_argument("truncated_dft: need 1 <= l <= n");
    cmat f(n, l);
    double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k)
        for (int t = 0; t < l; ++t) {
            // Reduce the phase index first so large n keeps full precision.
            long long idx = (static_cast<long long>(k) * t) % n;
            f(k, t) = std::polar(norm, -2.0 * M_PI * static_cast<double>(idx) / n);
        }
    return f;
}

std::vector<int> uniform_pilot_indices(int n, int k)
{
    if (k < 1)
        throw std::invalid_argument("uniform_pilot_indices: k must be positive");
    if (k > n)
        throw std::invalid_argument("uniform_pilot_indices: k exceeds n");
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) {
        long long num = static_cast<long long>(i) * n;
        // round(i * n / k), ties away from zero
        out[i] = static_cast<int>((2 * num + k) / (2LL * k));
    }
    return out;
}

std::vector<cplx> default_pilot_symbols(int k, double e_x)
{
    auto qpsk = qam_constellation(4);
    std::vector<cplx> out(k);
    double amp = std::sqrt(e_x);
    // Quadratic phase pattern: constant modulus, no spectral lines.
    for (int i = 0; i < k; ++i)
        out[i] = amp * qpsk[(static_cast<long long>(i) * (i + 1) / 2) % 4];
    return out;
}

PilotPattern make_pilot_pattern(const OfdmConfig& cfg)
{
    cfg.validate();
    PilotPattern p;
    p.indices = uniform_pilot_indices(cfg.n_subcarriers, cfg.n_pilots);
    p.symbols = default_pilot_symbols(cfg.n_pilots, cfg.symbol_energy);
    return p;
}

std::vector<int> data_indices(int n, const std::vector<int>& pilots)
{
    std::vector<bool> used(n, false);
    for (int p : pilots)
        if (p >= 0 && p < n)
            used[p] = true;
    std::vector<int> out;
    for (int k = 0; k < n; ++k)
        if (!used[k])
            out.push_back(k);
    return out;
}

cmat observation_rows(int n, const std::vector<int>& indices, const std::vector<cplx>& symbols, int l)
{
    if (indices.size() != symbols.size())
        throw std::invalid_argument("observation_rows: index and symbol counts differ");
    if (l < 1 || l > n)
        throw std::invalid_argument("observation_rows: need 1 <= l <= n");
    cmat a(static_cast<Eigen::Index>(indices.size()), l);
    double root_n = std::sqrt(static_cast<double>(n));
    for (std::size_t row = 0; row < indices.size(); ++row) {
        int k = indices[row];
        if (k < 0 || k >= n)
            throw std::out_of_range("observation_rows: carrier index out of range");
        for (int t = 0; t < l; ++t) {
            long long idx = (static_cast<long long>(k) * t) % n;
            a(static_cast<Eigen::Index>(row), t) = root_n * symbols[row]
                * std::polar(1.0 / root_n, -2.0 * M_PI * static_cast<double>(idx) / n);
        }
    }
    return a;
}

cmat build_observation_matrix(const OfdmConfig& cfg, const PilotPattern& pattern, int l)
{
    if (pattern.indices.empty())
        throw std::invalid_argument("build_observation_matrix: no pilots");
    return observation_rows(cfg.n_subcarriers, pattern.indices, pattern.symbols, l);
}

cvec channel_frequency_response(const cvec& h_r, int n)
{
    return std::sqrt(static_cast<double>(n)) * truncated_dft(n, static_cast<int>(h_r.size())) * h_r;
}

cvec synthesize_ofdm_symbol(const cvec& cfr, const std::vector<cplx>& tx, double noise_var, Rng& rng)
{
    if (noise_var < 0.0)
        throw std::invalid_argument("synthesize_ofdm_symbol: negative noise variance");
    if (static_cast<std::size_t>(cfr.size()) != tx.size())
        throw std::invalid_argument("synthesize_ofdm_symbol: symbol count mismatch");
    cvec y(cfr.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        y(k) = cfr(k) * tx[static_cast<std::size_t>(k)];
        if (noise_var > 0.0)
            y(k) += complex_normal(rng, noise_var);
    }
    return y;
}

cvec synthesize_rx(const cvec& h_r, const cmat& a_p, double noise_var,
                   const std::optional<cvec>& interference, Rng& rng)
{
    if (noise_var < 0.0)
        throw std::invalid_argument("synthesize_rx: negative noise variance");
    if (a_p.cols() != h_r.size())
        throw std::invalid_argument("synthesize_rx: channel length does not match observation matrix");
    cvec y = a_p * h_r;
    if (interference) {
        if (interference->size() != y.size())
            throw std::invalid_argument("synthesize_rx: interference length mismatch");
        y += *interference;
    }
    if (noise_var > 0.0)
        for (Eigen::Index k = 0; k < y.size(); ++k)
            y(k) += complex_normal(rng, noise_var);
    return y;
}

} // namespace chanest
