// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/config.hpp"
#include "chanest/data_aided.hpp"
#include "chanest/estimators.hpp"
#include "chanest/ofdm.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace chanest;

namespace {

struct Link {
    int n;
    PilotPattern pilots;
    cmat a_p;
    std::vector<int> data;
};

Link make_link(int n, int k, int l)
{
    OfdmConfig cfg;
    cfg.n_subcarriers = n;
    cfg.n_pilots = k;
    Link link{n, make_pilot_pattern(cfg), {}, {}};
    link.a_p = build_observation_matrix(cfg, link.pilots, l);
    link.data = data_indices(n, link.pilots.indices);
    return link;
}

// Transmit symbol over all carriers: pilots in place, random QAM elsewhere.
std::vector<cplx> make_tx(const Link& link, const std::vector<cplx>& qam, Rng& rng)
{
    std::vector<cplx> tx(static_cast<std::size_t>(link.n));
    for (int c : link.data)
        tx[c] = qam[static_cast<std::size_t>(uniform01(rng) * qam.size())];
    for (std::size_t i = 0; i < link.pilots.indices.size(); ++i)
        tx[link.pilots.indices[i]] = link.pilots.symbols[i];
    return tx;
}

double brute_force_metric(cplx x, double s2, const std::vector<cplx>& qam)
{
    auto pdf = [s2](cplx z) { return std::exp(-std::norm(z) / s2) / (std::numbers::pi * s2); };
    int d = nearest_symbol(x, qam);
    double den = 0.0;
    for (std::size_t m = 0; m < qam.size(); ++m)
        if (static_cast<int>(m) != d)
            den += pdf(x - qam[m]);
    return pdf(x - qam[d]) / den;
}

} // namespace

TEST_CASE("zero forcing")
{
    cplx x(0.3, -0.7), h(1.2, 0.4);
    CHECK(std::abs(*zf_equalize(h * x, h) - x) < 1e-15);
    CHECK(std::abs(*zf_equalize(h * x, 2.0 * h) - x / 2.0) < 1e-15);
    CHECK_FALSE(zf_equalize(cplx(1.0), cplx(0.0)).has_value());
    CHECK_FALSE(zf_equalize(cplx(1.0), cplx(1e-7)).has_value());
}

TEST_CASE("zero-forcing distortion variance is noise over |H|^2")
{
    Rng rng = make_rng(1, 0, 0);
    cplx h(0.5, 0.2), x(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    const double s2 = 0.1;
    const int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += std::norm(*zf_equalize(h * x + complex_normal(rng, s2), h) - x);
    CHECK(acc / n == doctest::Approx(s2 / std::norm(h)).epsilon(0.03));
}

TEST_CASE("reliability is largest on a constellation point")
{
    auto qam = qam_constellation(4);
    double on = reliability_metric(qam[0], 0.2, qam);
    CHECK(on > 1.0);
    for (cplx off : {qam[0] * 0.8, qam[0] + cplx(0.1, 0.05), qam[0] * cplx(0.9, 0.2)})
        CHECK(reliability_metric(off, 0.2, qam) < on);
}

TEST_CASE("reliability at the midpoint of two points is below one")
{
    auto qam = qam_constellation(4);
    cplx mid = (qam[0] + qam[1]) / 2.0;
    for (double s2 : {0.1, 0.2, 0.5})
        CHECK(reliability_metric(mid, s2, qam) < 1.0);
    for (double s2 : {0.01, 0.05, 0.5})
        CHECK(log_reliability_metric(mid, s2, qam) < 0.0);
}

TEST_CASE("reliability matches a brute-force density ratio")
{
    auto qam = qam_constellation(4);
    cplx base = 0.9 * cplx(1.0, 1.0) / std::sqrt(2.0);
    for (double eps : {0.0, 1e-3, 1e-2}) {
        cplx x = base * (1.0 + eps);
        CHECK(reliability_metric(x, 0.5, qam) == doctest::Approx(brute_force_metric(x, 0.5, qam)).epsilon(1e-12));
        CHECK(log_reliability_metric(x, 0.5, qam) == doctest::Approx(std::log(brute_force_metric(x, 0.5, qam))));
    }
    auto q16 = qam_constellation(16);
    CHECK(reliability_metric(cplx(0.1, -0.3), 0.05, q16)
          == doctest::Approx(brute_force_metric(cplx(0.1, -0.3), 0.05, q16)).epsilon(1e-10));
}

TEST_CASE("reliability input validation")
{
    CHECK_THROWS_AS(reliability_metric(cplx(0.0), 0.1, {}), std::invalid_argument);
    CHECK_THROWS_AS(reliability_metric(cplx(0.0), 0.0, qam_constellation(4)), std::invalid_argument);
    // A tiny distortion variance is handled in the log domain without overflow.
    CHECK(std::isfinite(log_reliability_metric(cplx(0.7, 0.7), 1e-9, qam_constellation(4))));
}

TEST_CASE("selection limits in the noise variance")
{
    auto qam = qam_constellation(4);
    Link link = make_link(64, 16, 4);
    Rng rng = make_rng(2, 0, 0);
    std::size_t nd = link.data.size();
    cvec x_hat(nd), h(nd);
    for (std::size_t i = 0; i < nd; ++i) {
        x_hat(i) = qam[i % 4] + complex_normal(rng, 0.01);
        h(i) = complex_normal(rng) + 0.5;
    }
    CHECK(select_reliable(x_hat, h, link.data, 1e-10, qam).indices.size() == nd);
    CHECK(select_reliable(x_hat, h, link.data, 1e10, qam).indices.empty());
    CHECK(reliability_metric(qam[0] * 1.1, 1e12, qam) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    h(3) = 0.0;
    auto sel = select_reliable(x_hat, h, link.data, 1e-10, qam);
    CHECK(sel.indices.size() == nd - 1);
    for (std::size_t i = 0; i < sel.indices.size(); ++i) {
        CHECK(sel.metric[i] > 1.0);
        CHECK(std::find(link.pilots.indices.begin(), link.pilots.indices.end(), sel.indices[i])
              == link.pilots.indices.end());
    }
}

TEST_CASE("a stronger CFR never removes a carrier")
{
    auto qam = qam_constellation(4);
    Rng rng = make_rng(3, 0, 0);
    for (int trial = 0; trial < 200; ++trial) {
        cvec x(1);
        x(0) = qam[trial % 4] + complex_normal(rng, 0.3);
        bool was = false;
        for (double g = 0.1; g < 5.0; g *= 1.2) {
            cvec h(1);
            h(0) = g;
            bool now = !select_reliable(x, h, {5}, 0.2, qam).indices.empty();
            CHECK(!(was && !now));
            was = now;
        }
    }
}

TEST_CASE("property: decisions and reliability are invariant under common scaling")
{
    auto qam = qam_constellation(16);
    Rng rng = make_rng(4, 0, 0);
    for (int i = 0; i < 500; ++i) {
        cplx h = complex_normal(rng);
        cplx y = h * qam[i % 16] + complex_normal(rng, 0.05);
        cplx alpha = complex_normal(rng) + 0.1;
        double s2 = 0.05;
        cvec x1(1), h1(1), x2(1), h2(1);
        x1(0) = *zf_equalize(y, h);
        h1(0) = h;
        x2(0) = *zf_equalize(alpha * y, alpha * h);
        h2(0) = alpha * h;
        CHECK(nearest_symbol(x1(0), qam) == nearest_symbol(x2(0), qam));
        // The distortion variance is noise / |H|^2, so the noise scales with |alpha|^2.
        double r1 = log_reliability_metric(x1(0), s2 / std::norm(h), qam);
        double r2 = log_reliability_metric(x2(0), s2 * std::norm(alpha) / std::norm(alpha * h), qam);
        CHECK(r1 == doctest::Approx(r2).epsilon(1e-9));
        auto s1 = select_reliable(x1, h1, {0}, s2, qam);
        auto s2set = select_reliable(x2, h2, {0}, s2 * std::norm(alpha), qam);
        CHECK(s1.indices == s2set.indices);
    }
}

TEST_CASE("refinement with nothing selected is the identity")
{
    cvec h = cvec::Random(4);
    cmat c = cmat::Identity(4, 4);
    auto out = rls_refine(h, c, cmat(0, 4), cvec(0), cmat(0, 0));
    CHECK(out.h_hat == h);
    CHECK(out.err_cov == c);
}

TEST_CASE("refinement with true symbols equals the estimate on the extended pilot set")
{
    Link link = make_link(32, 8, 4);
    cmat rt = build_r_tap(4);
    auto qam = qam_constellation(4);
    Rng rng = make_rng(5, 0, 0);
    const double s2 = 0.2;
    cvec h(4);
    for (int i = 0; i < 4; ++i)
        h(i) = complex_normal(rng, rt(i, i).real());
    std::vector<cplx> tx = make_tx(link, qam, rng);
    cvec rx = synthesize_ofdm_symbol(channel_frequency_response(h, link.n), tx, s2, rng);

    cvec y_p(8);
    for (int i = 0; i < 8; ++i)
        y_p(i) = rx(link.pilots.indices[i]);
    auto prior = llmmse_estimate(y_p, link.a_p, rt, s2);

    std::vector<int> extra = {1, 5, 9, 14, 30};
    std::vector<cplx> sym;
    cvec y_d(5);
    for (std::size_t i = 0; i < extra.size(); ++i) {
        sym.push_back(tx[extra[i]]);
        y_d(static_cast<Eigen::Index>(i)) = rx(extra[i]);
    }
    cmat a_d = observation_rows(link.n, extra, sym, 4);
    auto refined = rls_refine(prior.h_hat, prior.err_cov, a_d, y_d, s2 * cmat::Identity(5, 5));

    cmat a_all(13, 4);
    a_all << link.a_p, a_d;
    cvec y_all(13);
    y_all << y_p, y_d;
    auto direct = llmmse_estimate(y_all, a_all, rt, s2);
    CHECK((refined.h_hat - direct.h_hat).norm() < 1e-10);
    CHECK((refined.err_cov - direct.err_cov).norm() < 1e-10);
    CHECK(refined.err_cov.trace().real() <= prior.err_cov.trace().real());
}

TEST_CASE("refinement zero-pads a narrow observation block and never grows the error")
{
    Rng rng = make_rng(6, 0, 0);
    cmat b = cmat::Random(6, 6);
    cmat c = b * b.adjoint() + cmat::Identity(6, 6);
    cvec h = cvec::Random(6);
    cmat a_d = cmat::Random(3, 2);
    cvec y = cvec::Random(3);
    auto out = rls_refine(h, c, a_d, y, 0.5 * cmat::Identity(3, 3));
    CHECK(out.h_hat.size() == 6);
    CHECK(out.err_cov.trace().real() <= c.trace().real());
    CHECK(min_eigenvalue(c - out.err_cov) > -1e-10);
    cmat padded = cmat::Zero(3, 6);
    padded.leftCols(2) = a_d;
    auto same = rls_refine(h, c, padded, y, 0.5 * cmat::Identity(3, 3));
    CHECK((same.h_hat - out.h_hat).norm() < 1e-12);
    CHECK_THROWS_AS(rls_refine(h, c, cmat::Random(3, 7), y, cmat::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("with no reliable carriers the data-aided estimator is the distributed one")
{
    ExperimentConfig cfg = desk_profile();
    Link link = make_link(cfg.n_subcarriers, cfg.n_pilots, cfg.l_taps);
    ChannelStats stats(build_r_array(cfg.geometry), build_r_tap(cfg.l_taps));
    auto qam = qam_constellation(4);
    Rng rng = make_rng(7, 0, 0);
    const double s2 = 1e6;
    cvec h = sample_channel(stats, rng);
    std::vector<cplx> tx = make_tx(link, qam, rng);
    std::vector<cvec> rx;
    cvec y_all(36 * 16);
    for (int r = 0; r < 36; ++r) {
        rx.push_back(synthesize_ofdm_symbol(channel_frequency_response(h.segment(4 * r, 4), link.n), tx, s2, rng));
        for (int i = 0; i < 16; ++i)
            y_all(16 * r + i) = rx.back()(link.pilots.indices[i]);
    }
    DadResult dad = run_dad_lmmse(rx, link.pilots, link.n, cfg.geometry, stats, s2, qam);
    for (const auto& set : dad.reliable)
        CHECK(set.indices.empty());
    cvec plain = run_dlmmse(y_all, link.a_p, cfg.geometry, stats, s2).h_hat;
    CHECK((dad.estimate.h_hat - plain).norm() <= 1e-9 * (1.0 + plain.norm()));
}

TEST_CASE("data aiding lowers the error at 20 dB")
{
    ExperimentConfig cfg = desk_profile();
    Link link = make_link(cfg.n_subcarriers, cfg.n_pilots, cfg.l_taps);
    ChannelStats stats(build_r_array(cfg.geometry), build_r_tap(cfg.l_taps));
    auto qam = qam_constellation(4);
    const double s2 = 0.01;
    double dad_err = 0.0, d_err = 0.0;
    for (int t = 0; t < 10; ++t) {
        Rng rng = make_rng(8, 0, static_cast<std::uint64_t>(t));
        cvec h = sample_channel(stats, rng);
        std::vector<cplx> tx = make_tx(link, qam, rng);
        std::vector<cvec> rx;
        cvec y_all(36 * 16);
        for (int r = 0; r < 36; ++r) {
            rx.push_back(synthesize_ofdm_symbol(channel_frequency_response(h.segment(4 * r, 4), link.n), tx, s2, rng));
            for (int i = 0; i < 16; ++i)
                y_all(16 * r + i) = rx.back()(link.pilots.indices[i]);
        }
        dad_err += (run_dad_lmmse(rx, link.pilots, link.n, cfg.geometry, stats, s2, qam).estimate.h_hat - h).squaredNorm();
        d_err += (run_dlmmse(y_all, link.a_p, cfg.geometry, stats, s2).h_hat - h).squaredNorm();
    }
    CHECK(dad_err < d_err);
}

TEST_CASE("selected carriers have a lower symbol error rate at 10 dB")
{
    Link link = make_link(64, 16, 4);
    cmat rt = build_r_tap(4);
    auto qam = qam_constellation(4);
    const double s2 = 0.1;
    std::size_t sel_n = 0, sel_err = 0, rest_n = 0, rest_err = 0;
    for (int t = 0; t < 300; ++t) {
        Rng rng = make_rng(9, 0, static_cast<std::uint64_t>(t));
        cvec h(4);
        for (int i = 0; i < 4; ++i)
            h(i) = complex_normal(rng, rt(i, i).real());
        std::vector<cplx> tx = make_tx(link, qam, rng);
        cvec rx = synthesize_ofdm_symbol(channel_frequency_response(h, 64), tx, s2, rng);
        cvec y_p(16);
        for (int i = 0; i < 16; ++i)
            y_p(i) = rx(link.pilots.indices[i]);
        cvec cfr = channel_frequency_response(llmmse_estimate(y_p, link.a_p, rt, s2).h_hat, 64);
        cvec x_hat(48), h_d(48);
        for (int i = 0; i < 48; ++i) {
            h_d(i) = cfr(link.data[i]);
            x_hat(i) = rx(link.data[i]) / h_d(i);
        }
        auto sel = select_reliable(x_hat, h_d, link.data, s2, qam);
        std::vector<bool> chosen(64, false);
        for (int c : sel.indices)
            chosen[c] = true;
        for (int i = 0; i < 48; ++i) {
            int c = link.data[i];
            bool wrong = qam[nearest_symbol(x_hat(i), qam)] != tx[c];
            if (chosen[c]) {
                ++sel_n;
                sel_err += wrong;
            } else {
                ++rest_n;
                rest_err += wrong;
            }
        }
    }
    REQUIRE(sel_n + rest_n >= 10000);
    REQUIRE(rest_n > 0);
    double ser_sel = double(sel_err) / double(sel_n);
    double ser_rest = double(rest_err) / double(rest_n);
    MESSAGE("SER selected " << ser_sel << " (" << sel_n << "), unselected " << ser_rest << " (" << rest_n << ")");
    CHECK(ser_sel < ser_rest);
}
