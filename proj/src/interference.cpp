// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/interference.hpp"

#include "chanest/ofdm.hpp"

#include <cmath>
#include <stdexcept>

namespace chanest {

void PppScenario::validate() const
{
    if (lambda < 0.0)
        throw std::invalid_argument("PppScenario: negative density");
    if (!(beta > 1.0))
        throw std::invalid_argument("PppScenario: pathloss exponent must exceed 1");
    if (!(gamma_o > 0.0) || !(gamma_o < gamma_m))
        throw std::invalid_argument("PppScenario: need 0 < gamma_o < gamma_m");
}

double PppScenario::mean_count() const
{
    return lambda * M_PI * (gamma_m * gamma_m - gamma_o * gamma_o);
}

InterfererRealization sample_ppp(const PppScenario& scenario, Rng& rng, const std::vector<cplx>& constellation)
{
    scenario.validate();
    if (!std::isfinite(scenario.gamma_m))
        throw std::invalid_argument("sample_ppp: outer radius must be finite for sampling");
    InterfererRealization out;
    if (scenario.lambda == 0.0)
        return out;
    static const std::vector<cplx> qpsk = qam_constellation(4);
    const std::vector<cplx>& symbols = constellation.empty() ? qpsk : constellation;
    std::poisson_distribution<long> count_dist(scenario.mean_count());
    long count = count_dist(rng);
    out.reserve(static_cast<std::size_t>(count));
    double go2 = scenario.gamma_o * scenario.gamma_o;
    double span = scenario.gamma_m * scenario.gamma_m - go2;
    for (long i = 0; i < count; ++i) {
        Interferer it;
        double u = uniform01(rng);
        it.radius = std::sqrt(go2 + u * span);
        // u == 0 would land on the inner boundary
        if (!(it.radius > scenario.gamma_o))
            it.radius = std::nextafter(scenario.gamma_o, scenario.gamma_m);
        it.angle = 2.0 * M_PI * uniform01(rng);
        it.alpha = std::abs(complex_normal(rng, scenario.omega));
        it.phase = 2.0 * M_PI * uniform01(rng);
        it.symbol = symbols[static_cast<std::size_t>(uniform01(rng) * symbols.size()) % symbols.size()];
        out.push_back(it);
    }
    return out;
}

cplx aggregate_interference(const InterfererRealization& realization, const PppScenario& scenario)
{
    cplx sum = 0.0;
    double amp = std::sqrt(scenario.e_x);
    for (const Interferer& it : realization)
        sum += amp * it.symbol * std::polar(it.alpha, it.phase) / std::pow(it.radius, scenario.beta);
    return sum;
}

cplx sample_tone_interference(const PppScenario& scenario, Rng& rng)
{
    return aggregate_interference(sample_ppp(scenario, rng), scenario);
}

InterferenceMoments interference_moments(const PppScenario& scenario)
{
    scenario.validate();
    double e = 2.0 * scenario.beta - 2.0;
    double outer = std::isfinite(scenario.gamma_m) ? std::pow(scenario.gamma_m, -e) : 0.0;
    double scale = M_PI * scenario.lambda / (scenario.beta - 1.0) * scenario.symbol_power * scenario.e_x * scenario.omega;
    return {0.0, scale * (std::pow(scenario.gamma_o, -e) - outer)};
}

cmat interference_covariance_single(const cmat& a_p, const cmat& r_tap, double sigma_i2)
{
    if (sigma_i2 < 0.0)
        throw std::invalid_argument("interference_covariance_single: negative variance");
    return hermitian_part(sigma_i2 * a_p * r_tap * a_p.adjoint());
}

namespace {

void add_through_pilots(cvec& out, const cvec& g, const cmat& a_p, cplx scale)
{
    Eigen::Index k = a_p.rows();
    Eigen::Index l = a_p.cols();
    Eigen::Index r = g.size() / l;
    for (Eigen::Index i = 0; i < r; ++i)
        out.segment(i * k, k) += scale * (a_p * g.segment(i * l, l));
}

} // namespace

cvec synthesize_pilot_interference(const ChannelStats& stats, const cmat& a_p, const PppScenario& scenario,
                                   Rng& rng, InterferenceSynthesis mode)
{
    if (a_p.cols() != stats.taps())
        throw std::invalid_argument("synthesize_pilot_interference: tap count mismatch");
    cvec out = cvec::Zero(a_p.rows() * stats.antennas());
    if (mode == InterferenceSynthesis::AnalyticEquivalent) {
        double var = interference_moments(scenario).variance;
        if (var > 0.0)
            add_through_pilots(out, sample_channel(stats, rng), a_p, std::sqrt(var));
        return out;
    }
    double power = scenario.e_x * scenario.omega * scenario.symbol_power;
    for (const Interferer& it : sample_ppp(scenario, rng)) {
        // Fading and symbol phase are carried by the interferer's channel draw.
        double amp = std::sqrt(power) / std::pow(it.radius, scenario.beta);
        add_through_pilots(out, sample_channel(stats, rng), a_p, amp);
    }
    return out;
}

double mse_ls_pc(int r, int l, double rho, int k, double sigma_i2, const rvec& deltas)
{
    if (r < 1 || l < 1 || k < 1 || !(rho > 0.0))
        throw std::invalid_argument("mse_ls_pc: arguments must be positive");
    return static_cast<double>(r) * l / (rho * k) + mse_ls_pc_limit(r, sigma_i2, deltas);
}

double mse_ls_pc_limit(int r, double sigma_i2, const rvec& deltas)
{
    return r * sigma_i2 * deltas.sum();
}

double mse_llmmse_pc(int r, const rvec& deltas, double rho, int k, double sigma_i2)
{
    double sum = 0.0;
    for (double d : deltas) {
        double g = rho * k * d;
        sum += d * (1.0 + g * sigma_i2) / (1.0 + g + g * sigma_i2);
    }
    return r * sum;
}

double mse_llmmse_pc_limit(int r, const rvec& deltas, double sigma_i2)
{
    return r * sigma_i2 / (1.0 + sigma_i2) * deltas.sum();
}

double mse_olmmse_pc(const rvec& etas, const rvec& deltas, double rho, int k, double sigma_i2)
{
    double sum = 0.0;
    for (double e : etas)
        for (double d : deltas) {
            double lam = std::max(e * d, 0.0);
            double g = rho * k * lam;
            sum += lam * (1.0 + g * sigma_i2) / (1.0 + g + g * sigma_i2);
        }
    return sum;
}

double mse_olmmse_pc_limit(double trace_array, const rvec& deltas, double sigma_i2)
{
    return sigma_i2 / (1.0 + sigma_i2) * trace_array * deltas.sum();
}

} // namespace chanest
