// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/data_aided.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chanest {

std::optional<cplx> zf_equalize(cplx y, cplx h_hat)
{
    if (std::norm(h_hat) < kMinCfrPower)
        return std::nullopt;
    return y / h_hat;
}

double log_reliability_metric(cplx x_hat, double noise_var_k, const std::vector<cplx>& constellation)
{
    if (constellation.size() < 2)
        throw std::invalid_argument("reliability_metric: constellation needs at least two points");
    if (!(noise_var_k > 0.0))
        throw std::invalid_argument("reliability_metric: distortion variance must be positive");
    int decision = nearest_symbol(x_hat, constellation);
    double d0 = std::norm(x_hat - constellation[decision]);
    // log sum_m exp(-(d_m - d_0) / s2); every exponent is <= 0.
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> ex;
    ex.reserve(constellation.size());
    for (std::size_t m = 0; m < constellation.size(); ++m) {
        if (static_cast<int>(m) == decision)
            continue;
        double e = -(std::norm(x_hat - constellation[m]) - d0) / noise_var_k;
        ex.push_back(e);
        top = std::max(top, e);
    }
    // The largest term contributes exactly 1; log1p keeps the rest visible.
    double rest = 0.0;
    bool skipped = false;
    for (double e : ex) {
        if (!skipped && e == top) {
            skipped = true;
            continue;
        }
        rest += std::exp(e - top);
    }
    return -(top + std::log1p(rest));
}

double reliability_metric(cplx x_hat, double noise_var_k, const std::vector<cplx>& constellation)
{
    return std::exp(log_reliability_metric(x_hat, noise_var_k, constellation));
}

ReliabilitySet select_reliable(const cvec& x_hat, const cvec& h_hat, const std::vector<int>& carriers,
                               double noise_var, const std::vector<cplx>& constellation)
{
    if (x_hat.size() != h_hat.size() || static_cast<std::size_t>(x_hat.size()) != carriers.size())
        throw std::invalid_argument("select_reliable: inputs are not aligned");
    if (!(noise_var > 0.0))
        throw std::invalid_argument("select_reliable: noise variance must be positive");
    ReliabilitySet out;
    for (Eigen::Index i = 0; i < x_hat.size(); ++i) {
        double gain = std::norm(h_hat(i));
        if (gain < kMinCfrPower)
            continue;
        double lr = log_reliability_metric(x_hat(i), noise_var / gain, constellation);
        if (lr > 0.0) {
            out.indices.push_back(carriers[static_cast<std::size_t>(i)]);
            out.metric.push_back(std::exp(lr));
            out.decisions.push_back(nearest_symbol(x_hat(i), constellation));
        }
    }
    return out;
}

EstimateWithCovariance rls_refine(const cvec& h_hat, const cmat& c_e, const cmat& a_d, const cvec& y_d,
                                  const cmat& r_w)
{
    EstimateWithCovariance out{h_hat, c_e, false};
    if (a_d.rows() == 0)
        return out;
    if (a_d.cols() > h_hat.size() || y_d.size() != a_d.rows() || r_w.rows() != a_d.rows()
        || c_e.rows() != h_hat.size())
        throw std::invalid_argument("rls_refine: dimension mismatch");
    cmat a = cmat::Zero(a_d.rows(), h_hat.size());
    a.leftCols(a_d.cols()) = a_d;
    cmat ca = c_e * a.adjoint();
    cmat g = hermitian_inverse(r_w + a * ca);
    cmat k = ca * g;
    out.h_hat = h_hat + k * (y_d - a * h_hat);
    out.err_cov = hermitian_part(c_e - k * ca.adjoint());
    return out;
}

DadResult run_dad_lmmse(const std::vector<cvec>& rx, const PilotPattern& pilots, int n, const ArrayGeometry& geom,
                        const ChannelStats& stats, double noise_var, const std::vector<cplx>& constellation,
                        const DlmmseOptions& options)
{
    int r_count = stats.antennas();
    int l = stats.taps();
    if (static_cast<int>(rx.size()) != r_count)
        throw std::invalid_argument("run_dad_lmmse: one received symbol per antenna required");
    if (!(noise_var > 0.0))
        throw std::invalid_argument("run_dad_lmmse: noise variance must be positive");
    cmat a_p = observation_rows(n, pilots.indices, pilots.symbols, l);
    std::vector<int> data = data_indices(n, pilots.indices);
    std::vector<cplx> ones(data.size(), 1.0);
    cmat f_data = observation_rows(n, data, ones, l);
    cmat pilot_gram = a_p.adjoint() * a_p / noise_var;
    cmat prior_info = hermitian_inverse(stats.r_tap());

    DadResult out;
    out.reliable.resize(r_count);
    std::vector<cmat> grams(r_count);
    std::vector<cvec> s(r_count);
    for (int r = 0; r < r_count; ++r) {
        if (rx[r].size() != n)
            throw std::invalid_argument("run_dad_lmmse: received symbol has the wrong length");
        cvec y_p(static_cast<Eigen::Index>(pilots.indices.size()));
        for (std::size_t i = 0; i < pilots.indices.size(); ++i)
            y_p(static_cast<Eigen::Index>(i)) = rx[r](pilots.indices[i]);
        EstimateWithCovariance local = llmmse_estimate(y_p, a_p, stats.r_tap(), noise_var);

        cvec h_data = f_data * local.h_hat;
        cvec x_hat = cvec::Zero(h_data.size());
        for (Eigen::Index i = 0; i < h_data.size(); ++i)
            if (auto x = zf_equalize(rx[r](data[static_cast<std::size_t>(i)]), h_data(i)))
                x_hat(i) = *x;
        ReliabilitySet rel = select_reliable(x_hat, h_data, data, noise_var, constellation);

        if (rel.indices.empty()) {
            grams[r] = pilot_gram;
            s[r] = a_p.adjoint() * y_p / noise_var;
        } else {
            std::vector<cplx> decided(rel.decisions.size());
            cvec y_d(static_cast<Eigen::Index>(rel.indices.size()));
            for (std::size_t i = 0; i < rel.indices.size(); ++i) {
                decided[i] = constellation[static_cast<std::size_t>(rel.decisions[i])];
                y_d(static_cast<Eigen::Index>(i)) = rx[r](rel.indices[i]);
            }
            cmat a_d = observation_rows(n, rel.indices, decided, l);
            cmat r_w = noise_var * cmat::Identity(a_d.rows(), a_d.rows());
            EstimateWithCovariance refined = rls_refine(local.h_hat, local.err_cov, a_d, y_d, r_w);
            cmat info = hermitian_inverse(refined.err_cov);
            grams[r] = hermitian_part(info - prior_info);
            s[r] = info * refined.h_hat;
        }
        out.reliable[r] = std::move(rel);
    }
    DlmmsePlan plan(geom, stats, std::move(grams), options);
    out.estimate = plan.run(s);
    return out;
}

} // namespace chanest
