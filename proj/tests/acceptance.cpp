// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "chanest/config.hpp"
#include "chanest/data_aided.hpp"
#include "chanest/dlmmse.hpp"
#include "chanest/estimators.hpp"
#include "chanest/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace chanest;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

double elapsed(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<cmat> pilot_grams(const Scenario& scn, double noise_var)
{
    return std::vector<cmat>(static_cast<std::size_t>(scn.antennas()), scn.a_p.adjoint() * scn.a_p / noise_var);
}

// Mean and standard error of per-trial differences.
struct Paired {
    RunningStat diff;
    void add(double a, double b) { diff.add(a - b); }
};

Outcome oracle_awgn()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = desk_profile();
    Scenario scn = make_scenario(cfg);
    const std::vector<Estimator> est = {Estimator::LS, Estimator::CLS, Estimator::LLMMSE, Estimator::OLMMSE};
    for (double snr : {0.0, 10.0, 20.0}) {
        auto st = monte_carlo(scn, snr, est, {}, 2000, 101);
        for (std::size_t e : {0u, 2u, 3u}) {
            double an = analytic_mse(scn, est[e], snr);
            double z = (st[e].mean - an) / st[e].stderr_mean();
            o.detail << " " << estimator_name(est[e]) << "@" << snr << "dB z=" << std::round(z * 100) / 100;
            o.require(std::abs(z) <= 3.0, estimator_name(est[e]) + " outside 3 stderr");
        }
    }
    double secs = elapsed(t0);
    o.detail << " (" << std::round(secs) << " s)";
    o.require(secs <= 300.0, "runtime above 5 min");
    return o;
}

Outcome convergence()
{
    Outcome o;
    ExperimentConfig cfg = desk_profile();
    Scenario scn = make_scenario(cfg);
    const double snr = 0.0;
    DlmmseOptions opt;
    opt.iterations = 3;
    opt.trace_iterations = true;
    DlmmsePlan plan(scn.geometry, scn.stats, pilot_grams(scn, noise_variance_for(snr)), opt);
    TrialContext ctx;
    ctx.plan = &plan;
    const std::vector<Estimator> est = {Estimator::LLMMSE, Estimator::OLMMSE, Estimator::DLMMSE};
    RunningStat l, opt_st;
    std::vector<RunningStat> rounds(4);
    double worst_zero = 0.0;
    for (int t = 0; t < 2000; ++t) {
        TrialResult r = run_trial(scn, snr, est, split_seed(202, 0, static_cast<std::uint64_t>(t)), ctx);
        if (!r.ok) {
            o.require(false, "trial failed: " + r.error);
            continue;
        }
        l.add(r.sq_err[0]);
        opt_st.add(r.sq_err[1]);
        for (int d = 0; d <= 3; ++d)
            rounds[d].add(r.dlmmse_rounds[d]);
        worst_zero = std::max(worst_zero, std::abs(r.dlmmse_rounds[0] - r.sq_err[0]) / r.sq_err[0]);
    }
    double rel0 = std::abs(rounds[0].mean - l.mean) / l.mean;
    o.detail << " D0/L rel diff=" << rel0 << " (worst trial " << worst_zero << ")";
    o.require(rel0 <= 1e-9, "D=0 differs from L-LMMSE");
    for (int d = 1; d <= 3; ++d) {
        o.detail << " D" << d << "=" << rounds[d].mean;
        o.require(rounds[d].mean <= rounds[d - 1].mean + rounds[d - 1].stderr_mean(), "MSE increases at D=" + std::to_string(d));
    }
    double gap = rounds[3].mean / opt_st.mean - 1.0;
    o.detail << " O=" << opt_st.mean << " gap=" << std::round(gap * 1000) / 10 << "% (design "
             << std::round((plan.design_mse(3) / analytic_mse(scn, Estimator::OLMMSE, snr) - 1.0) * 1000) / 10 << "%)";
    o.require(gap <= 0.10, "D=3 more than 10% above O-LMMSE");
    return o;
}

Outcome uncorrelated()
{
    Outcome o;
    ExperimentConfig cfg = desk_profile();
    Scenario scn = make_scenario(cfg, cmat::Identity(36, 36));
    const double snr = 0.0;
    double an_o = analytic_mse(scn, Estimator::OLMMSE, snr);
    double an_l = analytic_mse(scn, Estimator::LLMMSE, snr);
    o.detail << " analytic rel diff=" << std::abs(an_o - an_l) / an_l;
    o.require(std::abs(an_o - an_l) <= 1e-12 * an_l, "analytic O and L differ");

    DlmmseOptions opt;
    opt.iterations = 3;
    opt.trace_iterations = true;
    DlmmsePlan plan(scn.geometry, scn.stats, pilot_grams(scn, noise_variance_for(snr)), opt);
    TrialContext ctx;
    ctx.plan = &plan;
    RunningStat l, ol;
    std::vector<RunningStat> rounds(4);
    for (int t = 0; t < 1000; ++t) {
        TrialResult r = run_trial(scn, snr, {Estimator::LLMMSE, Estimator::OLMMSE, Estimator::DLMMSE},
                                  split_seed(303, 0, static_cast<std::uint64_t>(t)), ctx);
        l.add(r.sq_err[0]);
        ol.add(r.sq_err[1]);
        for (int d = 0; d <= 3; ++d)
            rounds[d].add(r.dlmmse_rounds[d]);
    }
    o.detail << " empirical O=" << ol.mean << " L=" << l.mean;
    o.require(std::abs(ol.mean - l.mean) <= 2.0 * l.stderr_mean(), "empirical O and L differ beyond 2 stderr");
    for (int d = 1; d <= 3; ++d) {
        o.require(std::abs(rounds[d].mean - rounds[0].mean) <= 2.0 * rounds[0].stderr_mean(),
                  "iteration changes the error beyond noise");
        o.require(std::abs(plan.design_mse(d) - plan.design_mse(0)) <= 1e-9 * plan.design_mse(0),
                  "design MSE changes with iterations");
    }
    o.detail << " D3=" << rounds[3].mean;
    return o;
}

Outcome cls_identity()
{
    Outcome o;
    ExperimentConfig cfg = desk_profile();
    Scenario scn = make_scenario(cfg);
    o.require(analytic_mse(scn, Estimator::CLS, 10.0) == analytic_mse(scn, Estimator::LS, 10.0), "analytic differ");
    double max_diff = 0.0;
    for (int t = 0; t < 2000; ++t) {
        TrialResult r = run_trial(scn, 10.0, {Estimator::LS, Estimator::CLS}, split_seed(404, 0, static_cast<std::uint64_t>(t)), {});
        max_diff = std::max(max_diff, std::abs(r.sq_err[0] - r.sq_err[1]));
    }
    o.detail << " max paired difference=" << max_diff;
    o.require(max_diff == 0.0, "paired difference not exactly zero");
    return o;
}

Outcome moments()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = desk_profile();
    cfg.lambdas = {0.05, 0.1, 0.2, 0.3};
    cfg.beta = 2.0;
    cfg.gamma_o = 2.0;
    cfg.gamma_m = 5.0;
    for (const MomentRow& m : interference_moment_table(cfg, 100000, 505)) {
        double se = std::sqrt(m.analytic_var / static_cast<double>(m.samples));
        double rel = m.empirical_var / m.analytic_var - 1.0;
        o.detail << " lambda=" << m.lambda << " |mean|/se=" << std::round(m.empirical_mean / se * 100) / 100
                 << " var err=" << std::round(rel * 1000) / 10 << "%";
        o.require(m.empirical_mean <= 3.0 * se, "mean beyond 3 stderr");
        o.require(std::abs(rel) <= 0.05, "variance beyond 5%");
    }
    double secs = elapsed(t0);
    o.detail << " (" << std::round(secs * 10) / 10 << " s)";
    o.require(secs <= 120.0, "runtime above 2 min");
    return o;
}

Outcome contamination()
{
    Outcome o;
    ExperimentConfig cfg = desk_profile();
    Scenario scn = make_scenario(cfg);
    const std::vector<Estimator> est = {Estimator::LS, Estimator::LLMMSE, Estimator::OLMMSE};
    auto run = [&](double lambda, double snr) {
        TrialContext ctx;
        ctx.interference = cfg.ppp(lambda);
        return monte_carlo(scn, snr, est, ctx, 2000, 606);
    };
    double s2 = interference_moments(cfg.ppp(0.1)).variance;
    for (double snr : {0.0, 10.0, 20.0, 30.0}) {
        auto st = run(0.1, snr);
        for (std::size_t e = 0; e < est.size(); ++e) {
            double an = analytic_mse(scn, est[e], snr, s2);
            double rel = st[e].mean / an - 1.0;
            o.detail << " " << estimator_name(est[e]) << "@" << snr << "=" << std::round(rel * 1000) / 10 << "%";
            o.require(std::abs(rel) <= 0.10, estimator_name(est[e]) + " beyond 10% at " + std::to_string(int(snr)) + " dB");
        }
    }
    const rvec& deltas = scn.stats.eigenvalues_tap();
    double limits[3] = {mse_ls_pc_limit(36, s2, deltas), mse_llmmse_pc_limit(36, deltas, s2),
                        mse_olmmse_pc_limit(scn.stats.r_array().trace().real(), deltas, s2)};
    auto floor40 = run(0.1, 40.0);
    for (std::size_t e = 0; e < est.size(); ++e) {
        double rel = floor40[e].mean / limits[e] - 1.0;
        o.detail << " floor " << estimator_name(est[e]) << "=" << std::round(rel * 1000) / 10 << "%";
        o.require(std::abs(rel) <= 0.15, estimator_name(est[e]) + " 40 dB not within 15% of the limit");
    }
    std::vector<double> prev_emp(3, 0.0), prev_an(3, 0.0);
    for (double lam : {0.01, 0.1, 0.5}) {
        auto st = run(lam, 20.0);
        double sl = interference_moments(cfg.ppp(lam)).variance;
        for (std::size_t e = 0; e < est.size(); ++e) {
            double an = analytic_mse(scn, est[e], 20.0, sl);
            o.require(st[e].mean >= prev_emp[e] && an >= prev_an[e], estimator_name(est[e]) + " decreases in lambda");
            prev_emp[e] = st[e].mean;
            prev_an[e] = an;
        }
    }
    return o;
}

Outcome data_aided()
{
    Outcome o;
    ExperimentConfig cfg = desk_profile();
    const double snr = 20.0;
    const int trials = 200;
    Scenario full = make_scenario(cfg);
    ExperimentConfig half_cfg = cfg;
    half_cfg.n_pilots = cfg.n_pilots / 2;
    Scenario half = make_scenario(half_cfg);
    DlmmsePlan plan_full(full.geometry, full.stats, pilot_grams(full, noise_variance_for(snr)), DlmmseOptions{});
    TrialContext ctx_full;
    ctx_full.plan = &plan_full;
    TrialContext ctx_half;
    Paired gain;
    RunningStat dad, dl, dad_half;
    for (int t = 0; t < trials; ++t) {
        std::uint64_t seed = split_seed(707, 0, static_cast<std::uint64_t>(t));
        TrialResult a = run_trial(full, snr, {Estimator::DAD, Estimator::DLMMSE}, seed, ctx_full);
        TrialResult b = run_trial(half, snr, {Estimator::DAD}, seed, ctx_half);
        if (!a.ok || !b.ok) {
            o.require(false, "trial failed");
            continue;
        }
        dad.add(a.sq_err[0]);
        dl.add(a.sq_err[1]);
        gain.add(a.sq_err[0], a.sq_err[1]);
        dad_half.add(b.sq_err[0]);
    }
    o.detail << " DAD=" << dad.mean << " D-LMMSE=" << dl.mean << " paired diff=" << gain.diff.mean << " +- "
             << gain.diff.stderr_mean() << " DAD(K/2)=" << dad_half.mean;
    o.require(gain.diff.mean + 3.0 * gain.diff.stderr_mean() < 0.0, "DAD not significantly below D-LMMSE");
    o.require(dad_half.mean <= 1.25 * dl.mean, "DAD with K/2 pilots more than 25% above D-LMMSE with K");
    return o;
}

Outcome complexity()
{
    Outcome o;
    ExperimentConfig cfg = desk_profile();
    auto pts = time_estimators(cfg, {4, 6, 8, 10}, 5);
    double prev = 0.0;
    for (const TimingPoint& p : pts) {
        double ratio = p.olmmse_seconds / p.dlmmse_seconds;
        o.detail << " R=" << p.antennas << " ratio=" << std::round(ratio * 1000) / 1000;
        o.require(ratio > prev, "ratio not increasing at R=" + std::to_string(p.antennas));
        prev = ratio;
    }
    return o;
}

Outcome properties()
{
    Outcome o;
    // Correlation: PSD, unit diagonal, translation invariance on 4x4.
    ExperimentConfig cfg = desk_profile();
    ArrayGeometry g4 = cfg.geometry;
    g4.m_rows = g4.g_cols = 4;
    cmat r = build_r_array(g4);
    bool unit = true;
    for (int i = 0; i < 16; ++i)
        unit = unit && std::abs(r(i, i) - 1.0) < 1e-12;
    o.require(is_hermitian(r, 1e-12) && min_eigenvalue(r) >= -1e-10 && unit, "correlation not PSD/unit diagonal");
    double shift = 0.0;
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b)
            for (int c = 0; c < 16; ++c) {
                int dm = g4.row_of(b) - g4.row_of(a), dg = g4.col_of(b) - g4.col_of(a);
                int pm = g4.row_of(c) + dm, pg = g4.col_of(c) + dg;
                if (pm < 0 || pm >= 4 || pg < 0 || pg >= 4)
                    continue;
                shift = std::max(shift, std::abs(r(a, b) - r(c, g4.index(pm, pg))));
            }
    o.require(shift < 1e-14, "translation invariance");

    // Message economy and determinism of the distributed estimator.
    Scenario scn = make_scenario(cfg);
    DlmmsePlan plan(scn.geometry, scn.stats, pilot_grams(scn, 1.0), DlmmseOptions{});
    std::vector<cvec> stats(36, cvec::Ones(scn.taps()));
    DlmmseResult res = plan.run(stats);
    bool economy = res.max_message_values == 2u * scn.taps() && res.min_message_values == 2u * scn.taps();
    for (const auto& round : res.sent_per_node)
        for (int n = 0; n < 36; ++n)
            economy = economy && round[n] == plan.neighborhoods().neighbors[n].size();
    o.require(economy, "message economy");
    TrialContext ctx;
    ctx.plan = &plan;
    auto all = std::vector<Estimator>{Estimator::LS, Estimator::LLMMSE, Estimator::OLMMSE, Estimator::DLMMSE, Estimator::DAD};
    TrialResult t1 = run_trial(scn, 0.0, all, 9, ctx), t2 = run_trial(scn, 0.0, all, 9, ctx);
    o.require(t1.ok && t1.sq_err == t2.sq_err, "trial determinism");

    const auto& nb = plan.neighborhoods();
    std::vector<NodeState> st;
    for (int n = 0; n < 36; ++n)
        st.push_back(local_estimation_step(cvec::Random(16), scn.a_p, scn.stats.composite_subset(nb.composite[n]), 1.0,
                                           nb.composite[n]));
    const int c = scn.geometry.index(2, 2);
    std::vector<PartialMessage> msgs;
    std::vector<PartialMatrices> parts;
    for (int j : nb.neighbors[c]) {
        msgs.push_back(make_message(st[j], c));
        parts.push_back(make_partial_matrices(st[j], nb.composite[c], c, 1e-6));
    }
    NodeState ref = update_step(st[c], msgs, parts);
    std::mt19937 shuffle_rng(3);
    std::vector<std::size_t> order(msgs.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    bool same = true;
    for (int rep = 0; rep < 10; ++rep) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        std::vector<PartialMessage> m2;
        std::vector<PartialMatrices> p2;
        for (std::size_t i : order) {
            m2.push_back(msgs[i]);
            p2.push_back(parts[i]);
        }
        NodeState out = update_step(st[c], m2, p2);
        same = same && out.h_w == ref.h_w && out.p_mat == ref.p_mat;
    }
    o.require(same, "delivery order changes the update");

    // Reliability: decisions and metric survive a common scaling of Y and H.
    auto qam = qam_constellation(16);
    Rng rng = make_rng(10, 0, 0);
    bool invariant = true;
    for (int i = 0; i < 1000; ++i) {
        cplx h = complex_normal(rng), alpha = complex_normal(rng) + 0.1;
        cplx y = h * qam[i % 16] + complex_normal(rng, 0.05);
        cvec x1(1), h1(1), x2(1), h2(1);
        x1(0) = y / h;
        h1(0) = h;
        x2(0) = (alpha * y) / (alpha * h);
        h2(0) = alpha * h;
        auto s1 = select_reliable(x1, h1, {0}, 0.05, qam);
        auto s2 = select_reliable(x2, h2, {0}, 0.05 * std::norm(alpha), qam);
        invariant = invariant && nearest_symbol(x1(0), qam) == nearest_symbol(x2(0), qam) && s1.indices == s2.indices;
        if (!s1.metric.empty() && !s2.metric.empty())
            invariant = invariant && std::abs(std::log(s1.metric[0]) - std::log(s2.metric[0])) <= 1e-9 * std::abs(std::log(s1.metric[0])) + 1e-12;
    }
    o.require(invariant, "reliability scaling invariance");
    o.detail << " correlation, message economy, determinism, reliability invariance checked";
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence (AWGN)", oracle_awgn},
        {2, "D-LMMSE convergence", convergence},
        {3, "uncorrelated reduction", uncorrelated},
        {4, "C-LS identity", cls_identity},
        {5, "interference moments", moments},
        {6, "pilot-contamination MSE", contamination},
        {7, "data-aided gain", data_aided},
        {8, "complexity trend", complexity},
        {9, "property suites", properties},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail << " exception: " << ex.what();
        }
        std::cout << "criterion " << c.id << " " << c.name << ": " << (o.pass ? "PASS" : "FAIL") << " |"
                  << o.detail.str() << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failed ? 1 : 0;
}
