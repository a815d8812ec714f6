// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace chanest {

void ArrayGeometry::validate() const
{
    if (m_rows < 1 || g_cols < 1)
        throw std::invalid_argument("ArrayGeometry: grid dimensions must be positive");
    if (!(dx > 0.0) || !(dy > 0.0))
        throw std::invalid_argument("ArrayGeometry: element spacing must be positive");
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Vertical offsets (p - m) scale with dy, horizontal offsets (q - g) with dx.
cplx elevation_term(const ArrayGeometry& geom, int dm)
{
    double k = kTwoPi * geom.dy * dm;
    double st = std::sin(geom.theta);
    return std::polar(std::exp(-0.5 * std::pow(geom.xi * k, 2) * st * st), k * std::cos(geom.theta));
}

} // namespace

cplx spatial_correlation_entry(const ArrayGeometry& geom, int r, int r_prime)
{
    int count = geom.antenna_count();
    if (r < 0 || r >= count || r_prime < 0 || r_prime >= count)
        throw std::out_of_range("spatial_correlation_entry: antenna index out of range");

    int dm = geom.row_of(r_prime) - geom.row_of(r);
    int dg = geom.col_of(r_prime) - geom.col_of(r);

    double sp = std::sin(geom.phi) * geom.sigma;
    double s2 = sp * sp;
    double cp = std::cos(geom.phi);

    cplx d1 = elevation_term(geom, dm);
    double d2 = kTwoPi * geom.dx * dg * std::sin(geom.theta);
    double d3 = geom.xi * kTwoPi * geom.dx * dg * std::cos(geom.theta);
    double d4 = 0.5 * std::pow(geom.xi * kTwoPi, 2) * geom.dx * geom.dy * dm * dg * std::sin(2.0 * geom.theta);
    double d5 = d3 * d3 * s2 + 1.0;
    double d6 = d4 * s2 + cp;
    double d7 = d3 * d3 * cp * cp - d4 * d4 * s2 - 2.0 * d4 * cp;

    double magnitude = std::exp(-(d7 + std::pow(d2 * sp, 2)) / (2.0 * d5)) / std::sqrt(d5);
    return d1 * std::polar(magnitude, d2 * d6 / d5);
}

cmat build_r_el(const ArrayGeometry& geom)
{
    geom.validate();
    cmat out(geom.m_rows, geom.m_rows);
    for (int m = 0; m < geom.m_rows; ++m)
        for (int p = 0; p < geom.m_rows; ++p)
            out(m, p) = elevation_term(geom, p - m);
    return out;
}

cmat build_r_az(const ArrayGeometry& geom)
{
    geom.validate();
    double cp = std::cos(geom.phi);
    double s2 = std::pow(std::sin(geom.phi) * geom.sigma, 2);
    cmat out(geom.g_cols, geom.g_cols);
    for (int g = 0; g < geom.g_cols; ++g)
        for (int q = 0; q < geom.g_cols; ++q) {
            int dg = q - g;
            double d2 = kTwoPi * geom.dx * dg * std::sin(geom.theta);
            double d3 = geom.xi * kTwoPi * geom.dx * dg * std::cos(geom.theta);
            double d5 = d3 * d3 * s2 + 1.0;
            double magnitude = std::exp(-d3 * d3 * cp * cp / (2.0 * d5))
                * std::exp(-0.5 * std::pow(d2 * geom.sigma, 2) / d5) / std::sqrt(d5);
            out(g, q) = std::polar(magnitude, d2 * cp / d5);
        }
    return out;
}

cmat build_r_array(const ArrayGeometry& geom, ArrayModel model)
{
    geom.validate();
    if (model == ArrayModel::Kronecker)
        return kron(build_r_az(geom), build_r_el(geom));
    int count = geom.antenna_count();
    cmat out(count, count);
    for (int r = 0; r < count; ++r) {
        out(r, r) = 1.0;
        for (int rp = r + 1; rp < count; ++rp) {
            out(r, rp) = spatial_correlation_entry(geom, r, rp);
            out(rp, r) = std::conj(out(r, rp));
        }
    }
    return out;
}

cmat build_r_tap(int l_taps, double decay)
{
    if (l_taps < 1)
        throw std::invalid_argument("build_r_tap: need at least one tap");
    if (!(decay > 0.0))
        throw std::invalid_argument("build_r_tap: decay must be positive");
    cmat out = cmat::Zero(l_taps, l_taps);
    for (int tau = 0; tau < l_taps; ++tau)
        out(tau, tau) = std::exp(-decay * tau);
    return out;
}

namespace {

void descending_eigen(const cmat& a, rvec& values, cmat& vectors)
{
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(a));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("ChannelStats: eigendecomposition failed");
    values = es.eigenvalues().reverse();
    vectors = es.eigenvectors().rowwise().reverse();
}

} // namespace

ChannelStats::ChannelStats(cmat r_array, cmat r_tap)
    : r_array_(std::move(r_array))
    , r_tap_(std::move(r_tap))
{
    if (r_array_.rows() == 0 || r_tap_.rows() == 0)
        throw std::invalid_argument("ChannelStats: empty correlation matrix");
    if (!is_hermitian(r_array_, 1e-9) || !is_hermitian(r_tap_, 1e-9))
        throw std::invalid_argument("ChannelStats: correlation matrices must be Hermitian");
    if (r_tap_.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("ChannelStats: tap correlation is zero");
    if (r_array_.cwiseAbs().maxCoeff() == 0.0)
        throw std::invalid_argument("ChannelStats: array correlation is zero");
    descending_eigen(r_array_, eta_, v_array_);
    descending_eigen(r_tap_, delta_, q_tap_);
    sqrt_array_ = psd_sqrt(r_array_);
    sqrt_tap_ = psd_sqrt(r_tap_);
}

cmat ChannelStats::composite(Eigen::Index max_dim) const
{
    if (dim() > max_dim)
        throw std::length_error("ChannelStats: composite correlation exceeds materialization cap");
    return kron(r_array_, r_tap_);
}

cmat ChannelStats::composite_subset(const std::vector<int>& antennas) const
{
    Eigen::Index l = taps();
    Eigen::Index n = static_cast<Eigen::Index>(antennas.size());
    cmat out(n * l, n * l);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out.block(i * l, j * l, l, l) = block(antennas[i], antennas[j]);
    return out;
}

cvec sample_channel(const ChannelStats& stats, Rng& rng)
{
    Eigen::Index l = stats.taps();
    Eigen::Index r = stats.antennas();
    cmat white(l, r);
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index i = 0; i < l; ++i)
            white(i, j) = complex_normal(rng);
    cmat h = stats.sqrt_tap() * white * stats.sqrt_array().transpose();
    return Eigen::Map<cvec>(h.data(), h.size());
}

} // namespace chanest
