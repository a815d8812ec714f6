// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/harness.hpp"

#include "chanest/data_aided.hpp"
#include "chanest/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

namespace chanest {

std::string estimator_name(Estimator e)
{
    switch (e) {
    case Estimator::LS: return "ls";
    case Estimator::CLS: return "c-ls";
    case Estimator::LLMMSE: return "l-lmmse";
    case Estimator::OLMMSE: return "o-lmmse";
    case Estimator::DLMMSE: return "d-lmmse";
    case Estimator::DAD: return "dad-lmmse";
    }
    return "unknown";
}

Scenario make_scenario(const ExperimentConfig& cfg, std::optional<cmat> r_array)
{
    cfg.validate();
    OfdmConfig ofdm;
    ofdm.n_subcarriers = cfg.n_subcarriers;
    ofdm.n_pilots = cfg.n_pilots;
    ofdm.qam_order = cfg.qam_order;
    PilotPattern pilots = make_pilot_pattern(ofdm);
    cmat a_p = build_observation_matrix(ofdm, pilots, cfg.l_taps);
    std::vector<int> all(cfg.n_subcarriers);
    for (int k = 0; k < cfg.n_subcarriers; ++k)
        all[k] = k;
    cmat cfr_rows = observation_rows(cfg.n_subcarriers, all, std::vector<cplx>(all.size(), 1.0), cfg.l_taps);
    cmat ra = r_array ? std::move(*r_array) : build_r_array(cfg.geometry);
    if (ra.rows() != cfg.geometry.antenna_count())
        throw std::invalid_argument("make_scenario: spatial correlation does not match the array size");
    return Scenario{cfg,
                    cfg.geometry,
                    ChannelStats(std::move(ra), build_r_tap(cfg.l_taps, cfg.decay)),
                    std::move(pilots),
                    std::move(a_p),
                    std::move(cfr_rows),
                    qam_constellation(cfg.qam_order)};
}

double noise_variance_for(double snr_db)
{
    return std::pow(10.0, -snr_db / 10.0);
}

namespace {

enum Stream : std::uint64_t { kChannel = 1, kPilotNoise = 2, kInterference = 3, kDataSymbols = 4, kDataNoise = 5 };

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<cvec> pilot_statistics(const cvec& y_all, const cmat& a_p, double noise_var)
{
    Eigen::Index k = a_p.rows();
    std::size_t r = static_cast<std::size_t>(y_all.size() / k);
    std::vector<cvec> s(r);
    for (std::size_t i = 0; i < r; ++i)
        s[i] = a_p.adjoint() * y_all.segment(static_cast<Eigen::Index>(i) * k, k) / noise_var;
    return s;
}

} // namespace

TrialResult run_trial(const Scenario& scn, double snr_db, const std::vector<Estimator>& estimators,
                      std::uint64_t trial_seed, const TrialContext& ctx)
{
    const int r = scn.antennas();
    const int l = scn.taps();
    const Eigen::Index k = scn.a_p.rows();
    const double noise_var = noise_variance_for(snr_db);

    Rng rng_h = make_rng(trial_seed, kChannel, 0);
    cvec h = sample_channel(scn.stats, rng_h);

    Rng rng_w = make_rng(trial_seed, kPilotNoise, 0);
    cvec y_all(r * k);
    for (int i = 0; i < r; ++i)
        y_all.segment(i * k, k) = synthesize_rx(h.segment(i * l, l), scn.a_p, noise_var, std::nullopt, rng_w);

    double sigma_i2 = 0.0;
    if (ctx.interference) {
        Rng rng_i = make_rng(trial_seed, kInterference, 0);
        y_all += synthesize_pilot_interference(scn.stats, scn.a_p, *ctx.interference, rng_i, ctx.synthesis);
        sigma_i2 = interference_moments(*ctx.interference).variance;
    }

    TrialResult out;
    out.sq_err.assign(estimators.size(), 0.0);
    out.seconds.assign(estimators.size(), 0.0);
    try {
        for (std::size_t e = 0; e < estimators.size(); ++e) {
            auto start = std::chrono::steady_clock::now();
            cvec est;
            switch (estimators[e]) {
            case Estimator::LS: {
                est.resize(r * l);
                for (int i = 0; i < r; ++i)
                    est.segment(i * l, l) = ls_estimate(y_all.segment(i * k, k), scn.a_p);
                break;
            }
            case Estimator::CLS:
                est = cls_estimate(y_all, scn.a_p);
                break;
            case Estimator::LLMMSE:
                est = llmmse_estimate_all(y_all, scn.a_p, scn.stats.r_tap(), noise_var, sigma_i2);
                break;
            case Estimator::OLMMSE:
                est = olmmse_estimate(y_all, scn.a_p, scn.stats, noise_var, sigma_i2, OlmmseRoute::Auto, false).h_hat;
                break;
            case Estimator::DLMMSE: {
                if (!ctx.plan)
                    throw std::logic_error("run_trial: distributed estimator needs a plan");
                if (sigma_i2 > 0.0)
                    throw std::logic_error("run_trial: distributed estimator assumes white noise");
                DlmmseResult res = ctx.plan->run(pilot_statistics(y_all, scn.a_p, noise_var));
                est = res.h_hat;
                for (const cvec& it : res.per_iteration)
                    out.dlmmse_rounds.push_back((h - it).squaredNorm());
                break;
            }
            case Estimator::DAD: {
                if (sigma_i2 > 0.0)
                    throw std::logic_error("run_trial: data-aided estimator assumes white noise");
                int n = scn.cfg.n_subcarriers;
                std::vector<int> data = data_indices(n, scn.pilots.indices);
                Rng rng_x = make_rng(trial_seed, kDataSymbols, 0);
                std::vector<cplx> tx(static_cast<std::size_t>(n));
                for (int c : data)
                    tx[static_cast<std::size_t>(c)] = scn.constellation[static_cast<std::size_t>(
                        uniform01(rng_x) * scn.constellation.size()) % scn.constellation.size()];
                for (std::size_t i = 0; i < scn.pilots.indices.size(); ++i)
                    tx[static_cast<std::size_t>(scn.pilots.indices[i])] = scn.pilots.symbols[i];
                std::vector<cvec> rx(static_cast<std::size_t>(r));
                for (int i = 0; i < r; ++i) {
                    Rng rng_d = make_rng(trial_seed, kDataNoise, static_cast<std::uint64_t>(i));
                    rx[i] = synthesize_ofdm_symbol(scn.cfr_rows * h.segment(i * l, l), tx, noise_var, rng_d);
                    // Pilot carriers carry exactly the pilot observations seen by the other estimators.
                    for (std::size_t p = 0; p < scn.pilots.indices.size(); ++p)
                        rx[i](scn.pilots.indices[p]) = y_all(i * k + static_cast<Eigen::Index>(p));
                }
                est = run_dad_lmmse(rx, scn.pilots, n, scn.geometry, scn.stats, noise_var, scn.constellation,
                                    ctx.dad_options)
                          .estimate.h_hat;
                break;
            }
            }
            out.seconds[e] = seconds_since(start);
            out.sq_err[e] = (h - est).squaredNorm();
        }
    } catch (const std::exception& ex) {
        out.ok = false;
        out.error = ex.what();
    }
    return out;
}

void RunningStat::add(double x)
{
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
}

double RunningStat::stderr_mean() const
{
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

const MseRow* MseReport::find(const std::string& estimator, double sweep) const
{
    for (const MseRow& row : rows)
        if (row.estimator == estimator && row.sweep == sweep)
            return &row;
    return nullptr;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvTable to_table(const MseReport& report)
{
    CsvTable t;
    t.header = {report.sweep_name, "estimator", "empirical_mse", "analytic_mse", "stderr", "seconds"};
    for (const MseRow& row : report.rows)
        t.rows.push_back({format_number(row.sweep), row.estimator, format_number(row.empirical),
                          format_number(row.analytic), format_number(row.stderr_mse), format_number(row.seconds)});
    return t;
}

std::string csv_text(const CsvTable& table)
{
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.header);
    for (const auto& row : table.rows)
        line(row);
    return out;
}

void emit_csv(const CsvTable& table, const std::string& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    f << csv_text(table);
    if (!f)
        throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<MomentRow> interference_moment_table(const ExperimentConfig& cfg, std::size_t samples,
                                                 std::uint64_t seed)
{
    std::vector<MomentRow> out;
    for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        PppScenario scn = cfg.ppp(cfg.lambdas[i]);
        InterferenceMoments m = interference_moments(scn);
        Rng rng = make_rng(seed, kInterference, i);
        cplx sum = 0.0;
        std::vector<cplx> draws(samples);
        for (std::size_t s = 0; s < samples; ++s) {
            draws[s] = sample_tone_interference(scn, rng);
            sum += draws[s];
        }
        cplx mean = sum / static_cast<double>(samples);
        double ss = 0.0;
        for (const cplx& d : draws)
            ss += std::norm(d - mean);
        double var = samples > 1 ? ss / static_cast<double>(samples - 1) : 0.0;
        out.push_back({cfg.lambdas[i], m.mean, std::abs(mean), m.variance, var, samples});
    }
    return out;
}

CsvTable to_table(const std::vector<MomentRow>& rows)
{
    CsvTable t;
    t.header = {"lambda", "analytic_mean", "empirical_mean", "analytic_var", "empirical_var"};
    for (const MomentRow& r : rows)
        t.rows.push_back({format_number(r.lambda), format_number(r.analytic_mean), format_number(r.empirical_mean),
                          format_number(r.analytic_var), format_number(r.empirical_var)});
    return t;
}

double analytic_mse(const Scenario& scn, Estimator e, double snr_db, double sigma_i2)
{
    int k = scn.cfg.n_pilots;
    // The closed forms need A^H A = K E_x I with E_x = 1.
    double c = gram_scale(scn.a_p);
    if (c < 0.0 || std::abs(c - k) > 1e-9 * k)
        return std::numeric_limits<double>::quiet_NaN();
    double rho = 1.0 / noise_variance_for(snr_db);
    int r = scn.antennas();
    int l = scn.taps();
    const rvec& deltas = scn.stats.eigenvalues_tap();
    const rvec& etas = scn.stats.eigenvalues_array();
    switch (e) {
    case Estimator::LS:
    case Estimator::CLS:
        return sigma_i2 > 0.0 ? mse_ls_pc(r, l, rho, k, sigma_i2, deltas) : mse_ls_awgn(r, l, rho, k);
    case Estimator::LLMMSE:
        return sigma_i2 > 0.0 ? mse_llmmse_pc(r, deltas, rho, k, sigma_i2) : mse_llmmse_awgn(r, deltas, rho, k);
    case Estimator::OLMMSE:
        return sigma_i2 > 0.0 ? mse_olmmse_pc(etas, deltas, rho, k, sigma_i2) : mse_olmmse_awgn(etas, deltas, rho, k);
    default:
        return std::numeric_limits<double>::quiet_NaN();
    }
}

std::vector<RunningStat> monte_carlo(const Scenario& scn, double snr_db, const std::vector<Estimator>& estimators,
                                     const TrialContext& ctx, int trials, std::uint64_t seed, std::size_t* discarded)
{
    std::vector<RunningStat> stats(estimators.size());
    std::size_t dropped = 0;
    for (int t = 0; t < trials; ++t) {
        TrialResult res = run_trial(scn, snr_db, estimators, split_seed(seed, 0, static_cast<std::uint64_t>(t)), ctx);
        if (!res.ok) {
            ++dropped;
            std::cerr << "trial " << t << " discarded: " << res.error << '\n';
            continue;
        }
        for (std::size_t e = 0; e < estimators.size(); ++e) {
            stats[e].add(res.sq_err[e]);
            stats[e].seconds += res.seconds[e];
        }
    }
    if (discarded)
        *discarded = dropped;
    return stats;
}

namespace {

DlmmsePlan pilot_plan(const Scenario& scn, double noise_var, const DlmmseOptions& opt)
{
    cmat gram = scn.a_p.adjoint() * scn.a_p / noise_var;
    return DlmmsePlan(scn.geometry, scn.stats, std::vector<cmat>(static_cast<std::size_t>(scn.antennas()), gram), opt);
}

DlmmseOptions config_options(const ExperimentConfig& cfg)
{
    DlmmseOptions opt;
    opt.iterations = cfg.dlmmse_d;
    opt.a_weight = cfg.dlmmse_a;
    return opt;
}

MseRow make_row(double sweep, Estimator e, const RunningStat& st, double analytic)
{
    MseRow row;
    row.sweep = sweep;
    row.estimator = estimator_name(e);
    row.empirical = st.mean;
    row.analytic = analytic;
    row.stderr_mse = st.stderr_mean();
    row.seconds = st.n ? st.seconds / static_cast<double>(st.n) : 0.0;
    row.trials = st.n;
    return row;
}

// Rows for every estimator at one sweep point.
void sweep_point(MseReport& report, double sweep, const Scenario& scn, double snr_db,
                 const std::vector<Estimator>& est, const TrialContext& ctx, int trials, std::uint64_t seed,
                 double sigma_i2)
{
    auto stats = monte_carlo(scn, snr_db, est, ctx, trials, seed);
    for (std::size_t e = 0; e < est.size(); ++e) {
        double an = analytic_mse(scn, est[e], snr_db, sigma_i2);
        if (est[e] == Estimator::DLMMSE && ctx.plan && ctx.plan->has_maps())
            an = ctx.plan->design_mse();
        report.rows.push_back(make_row(sweep, est[e], stats[e], an));
    }
}

ExperimentOutput preset_iterations(const ExperimentConfig& cfg)
{
    constexpr int kMaxRounds = 6;
    Scenario scn = make_scenario(cfg);
    double snr = cfg.snr_db.front();
    DlmmseOptions opt = config_options(cfg);
    opt.iterations = kMaxRounds;
    opt.trace_iterations = true;
    DlmmsePlan plan = pilot_plan(scn, noise_variance_for(snr), opt);
    TrialContext ctx;
    ctx.plan = &plan;
    const std::vector<Estimator> est = {Estimator::LLMMSE, Estimator::OLMMSE, Estimator::DLMMSE};
    std::vector<RunningStat> base(est.size());
    std::vector<RunningStat> rounds(kMaxRounds + 1);
    for (int t = 0; t < cfg.trials; ++t) {
        TrialResult res = run_trial(scn, snr, est, split_seed(cfg.seed, 0, static_cast<std::uint64_t>(t)), ctx);
        if (!res.ok) {
            std::cerr << "trial " << t << " discarded: " << res.error << '\n';
            continue;
        }
        for (std::size_t e = 0; e < est.size(); ++e) {
            base[e].add(res.sq_err[e]);
            base[e].seconds += res.seconds[e];
        }
        for (int d = 0; d <= kMaxRounds; ++d) {
            rounds[d].add(res.dlmmse_rounds[d]);
            rounds[d].seconds += res.seconds[2];
        }
    }
    MseReport report;
    report.sweep_name = "d";
    for (int d = 0; d <= kMaxRounds; ++d) {
        report.rows.push_back(make_row(d, Estimator::DLMMSE, rounds[d], plan.design_mse(d)));
        report.rows.push_back(make_row(d, Estimator::LLMMSE, base[0], analytic_mse(scn, Estimator::LLMMSE, snr)));
        report.rows.push_back(make_row(d, Estimator::OLMMSE, base[1], analytic_mse(scn, Estimator::OLMMSE, snr)));
    }
    ExperimentOutput out;
    out.main = to_table(report);
    out.reports.push_back(std::move(report));
    return out;
}

ExperimentOutput preset_awgn(const ExperimentConfig& cfg)
{
    const std::vector<Estimator> est = {Estimator::LS,     Estimator::CLS,    Estimator::LLMMSE,
                                        Estimator::OLMMSE, Estimator::DLMMSE, Estimator::DAD};
    auto run_point = [&](MseReport& report, double sweep, const Scenario& scn, double snr) {
        DlmmsePlan plan = pilot_plan(scn, noise_variance_for(snr), config_options(scn.cfg));
        TrialContext ctx;
        ctx.plan = &plan;
        ctx.dad_options = config_options(scn.cfg);
        sweep_point(report, sweep, scn, snr, est, ctx, scn.cfg.trials, scn.cfg.seed, 0.0);
    };
    Scenario scn = make_scenario(cfg);
    MseReport by_snr;
    by_snr.sweep_name = "snr_db";
    for (double snr : cfg.snr_db)
        run_point(by_snr, snr, scn, snr);

    MseReport by_k;
    by_k.sweep_name = "k";
    constexpr double kPilotSweepSnr = 20.0;
    std::set<int> ks;
    for (int k : {cfg.n_pilots / 2, cfg.n_pilots, cfg.n_pilots * 2})
        if (k >= cfg.l_taps && k <= cfg.n_subcarriers)
            ks.insert(k);
    for (int k : ks) {
        ExperimentConfig ck = cfg;
        ck.n_pilots = k;
        run_point(by_k, k, make_scenario(ck), kPilotSweepSnr);
    }
    ExperimentOutput out;
    out.main = to_table(by_snr);
    out.extra.emplace_back("_pilots", to_table(by_k));
    out.reports.push_back(std::move(by_snr));
    out.reports.push_back(std::move(by_k));
    return out;
}

ExperimentOutput preset_moments(const ExperimentConfig& cfg)
{
    if (cfg.lambdas.empty())
        throw std::invalid_argument("preset 3 needs at least one ppp.lambda value");
    constexpr std::size_t kToneSamples = 100000;
    ExperimentOutput out;
    out.moments = interference_moment_table(cfg, kToneSamples, cfg.seed);
    out.main = to_table(out.moments);
    return out;
}

ExperimentOutput preset_contamination(const ExperimentConfig& cfg)
{
    if (cfg.lambdas.empty())
        throw std::invalid_argument("preset 4 needs a ppp.lambda interference scenario");
    const std::vector<Estimator> est = {Estimator::LS, Estimator::LLMMSE, Estimator::OLMMSE};
    Scenario scn = make_scenario(cfg);
    auto run_point = [&](MseReport& report, double sweep, double snr, double lambda) {
        TrialContext ctx;
        ctx.interference = cfg.ppp(lambda);
        double s2 = interference_moments(*ctx.interference).variance;
        sweep_point(report, sweep, scn, snr, est, ctx, cfg.trials, cfg.seed, s2);
    };
    MseReport by_snr;
    by_snr.sweep_name = "snr_db";
    for (double snr : cfg.snr_db)
        run_point(by_snr, snr, snr, cfg.lambdas.front());
    MseReport by_lambda;
    by_lambda.sweep_name = "lambda";
    std::vector<double> lams = cfg.lambdas;
    std::sort(lams.begin(), lams.end());
    for (double lam : lams)
        run_point(by_lambda, lam, cfg.snr_db.back(), lam);
    ExperimentOutput out;
    out.main = to_table(by_snr);
    out.extra.emplace_back("_lambda", to_table(by_lambda));
    out.reports.push_back(std::move(by_snr));
    out.reports.push_back(std::move(by_lambda));
    return out;
}

ExperimentOutput preset_runtime(const ExperimentConfig& cfg)
{
    const std::vector<int> sides = {4, 6, 8, 10};
    std::vector<TimingPoint> times = time_estimators(cfg, sides);
    MseReport report;
    report.sweep_name = "r";
    double snr = cfg.snr_db.front();
    for (std::size_t i = 0; i < sides.size(); ++i) {
        ExperimentConfig c = cfg;
        c.geometry.m_rows = c.geometry.g_cols = sides[i];
        Scenario scn = make_scenario(c);
        DlmmseOptions opt = config_options(c);
        opt.output = OutputRule::Local;
        DlmmsePlan plan = pilot_plan(scn, noise_variance_for(snr), opt);
        TrialContext ctx;
        ctx.plan = &plan;
        const std::vector<Estimator> est = {Estimator::OLMMSE, Estimator::DLMMSE};
        auto st = monte_carlo(scn, snr, est, ctx, cfg.trials, cfg.seed);
        MseRow o = make_row(scn.antennas(), Estimator::OLMMSE, st[0], analytic_mse(scn, Estimator::OLMMSE, snr));
        o.seconds = times[i].olmmse_seconds;
        MseRow d = make_row(scn.antennas(), Estimator::DLMMSE, st[1], std::numeric_limits<double>::quiet_NaN());
        d.seconds = times[i].dlmmse_seconds;
        report.rows.push_back(o);
        report.rows.push_back(d);
    }
    ExperimentOutput out;
    out.main = to_table(report);
    out.reports.push_back(std::move(report));
    return out;
}

} // namespace

std::vector<TimingPoint> time_estimators(const ExperimentConfig& cfg, const std::vector<int>& sides, int reps)
{
    std::vector<TimingPoint> out;
    double snr = cfg.snr_db.front();
    double noise_var = noise_variance_for(snr);
    for (int side : sides) {
        ExperimentConfig c = cfg;
        c.geometry.m_rows = c.geometry.g_cols = side;
        Scenario scn = make_scenario(c);
        Rng rng = make_rng(cfg.seed, 7, static_cast<std::uint64_t>(side));
        int r = scn.antennas();
        int l = scn.taps();
        Eigen::Index k = scn.a_p.rows();
        cvec h = sample_channel(scn.stats, rng);
        cvec y_all(r * k);
        for (int i = 0; i < r; ++i)
            y_all.segment(i * k, k) = synthesize_rx(h.segment(i * l, l), scn.a_p, noise_var, std::nullopt, rng);
        DlmmseOptions opt = config_options(c);
        opt.output = OutputRule::Local;
        cmat gram = scn.a_p.adjoint() * scn.a_p / noise_var;
        volatile double sink = 0.0;
        TimingPoint tp;
        tp.antennas = r;
        tp.olmmse_seconds = median_seconds([&] {
            auto est = olmmse_estimate(y_all, scn.a_p, scn.stats, noise_var, 0.0, OlmmseRoute::Dense, false);
            sink = sink + est.h_hat(0).real();
        }, reps);
        tp.dlmmse_seconds = median_seconds([&] {
            DlmmsePlan plan(scn.geometry, scn.stats, std::vector<cmat>(static_cast<std::size_t>(r), gram), opt);
            auto res = plan.run(pilot_statistics(y_all, scn.a_p, noise_var));
            sink = sink + res.h_hat(0).real();
        }, reps);
        out.push_back(tp);
    }
    return out;
}

ExperimentOutput run_experiment(int preset, const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentOutput out;
    switch (preset) {
    case 1: out = preset_iterations(cfg); break;
    case 2: out = preset_awgn(cfg); break;
    case 3: return preset_moments(cfg);
    case 4: out = preset_contamination(cfg); break;
    case 5: return preset_runtime(cfg);
    default: throw std::invalid_argument("unknown preset " + std::to_string(preset) + " (expected 1..5)");
    }
    if (!cfg.record_timings) {
        for (MseReport& r : out.reports)
            for (MseRow& row : r.rows)
                row.seconds = std::numeric_limits<double>::quiet_NaN();
        out.main = to_table(out.reports.at(0));
        for (std::size_t i = 0; i < out.extra.size(); ++i)
            out.extra[i].second = to_table(out.reports.at(i + 1));
    }
    return out;
}

namespace {

void check_rows(const MseReport& report, const ExperimentConfig& cfg, std::vector<std::string>& bad)
{
    for (const MseRow& row : report.rows) {
        std::string where = report.sweep_name + "=" + format_number(row.sweep) + " " + row.estimator;
        if (!std::isfinite(row.empirical) || row.empirical < 0.0)
            bad.push_back(where + ": empirical MSE is not a finite non-negative number");
        if (row.trials < static_cast<std::size_t>(cfg.trials))
            bad.push_back(where + ": " + std::to_string(cfg.trials - static_cast<int>(row.trials))
                          + " trials discarded");
        bool closed_form = row.estimator == "ls" || row.estimator == "c-ls" || row.estimator == "l-lmmse"
            || row.estimator == "o-lmmse";
        if (closed_form && !std::isnan(row.analytic) && row.trials >= 1000
            && std::abs(row.empirical - row.analytic) > 3.0 * row.stderr_mse)
            bad.push_back(where + ": empirical " + format_number(row.empirical) + " differs from analytic "
                          + format_number(row.analytic) + " by more than 3 standard errors");
    }
}

} // namespace

std::vector<std::string> check_experiment(int preset, const ExperimentOutput& out, const ExperimentConfig& cfg)
{
    std::vector<std::string> bad;
    for (const MseReport& r : out.reports)
        check_rows(r, cfg, bad);
    if (preset == 1) {
        const MseReport& r = out.reports.at(0);
        const MseRow* d0 = r.find("d-lmmse", 0);
        const MseRow* ll = r.find("l-lmmse", 0);
        if (!d0 || !ll || std::abs(d0->empirical - ll->empirical) > 1e-9 * ll->empirical)
            bad.push_back("d=0 distributed MSE does not equal the localized LMMSE MSE");
        for (int d = 1; d <= 6; ++d) {
            const MseRow* prev = r.find("d-lmmse", d - 1);
            const MseRow* cur = r.find("d-lmmse", d);
            if (prev && cur && cur->empirical > prev->empirical + prev->stderr_mse)
                bad.push_back("distributed MSE increases from d=" + std::to_string(d - 1) + " to d=" + std::to_string(d));
        }
    } else if (preset == 2) {
        for (const MseReport& r : out.reports)
            for (const MseRow& row : r.rows)
                if (row.estimator == "c-ls") {
                    const MseRow* ls = r.find("ls", row.sweep);
                    if (!ls || ls->empirical != row.empirical)
                        bad.push_back("centralized LS differs from LS at " + r.sweep_name + "=" + format_number(row.sweep));
                }
    } else if (preset == 3) {
        for (const MomentRow& m : out.moments) {
            double se = std::sqrt(m.analytic_var / static_cast<double>(m.samples));
            if (m.empirical_mean > 3.0 * se)
                bad.push_back("lambda=" + format_number(m.lambda) + ": interference mean exceeds 3 standard errors");
            if (std::abs(m.empirical_var / m.analytic_var - 1.0) > 0.05)
                bad.push_back("lambda=" + format_number(m.lambda) + ": interference variance off by more than 5%");
        }
    } else if (preset == 4) {
        const MseReport& r = out.reports.at(1);
        for (const char* name : {"ls", "l-lmmse", "o-lmmse"}) {
            const MseRow* prev = nullptr;
            for (const MseRow& row : r.rows) {
                if (row.estimator != name)
                    continue;
                if (prev && (row.analytic < prev->analytic || row.empirical + row.stderr_mse < prev->empirical))
                    bad.push_back(std::string(name) + ": MSE decreases with lambda at " + format_number(row.sweep));
                prev = &row;
            }
        }
    } else if (preset == 5) {
        const MseReport& r = out.reports.at(0);
        double last = 0.0;
        for (const MseRow& row : r.rows) {
            if (row.estimator != "o-lmmse")
                continue;
            const MseRow* d = r.find("d-lmmse", row.sweep);
            double ratio = d && d->seconds > 0.0 ? row.seconds / d->seconds : 0.0;
            if (!(ratio > last))
                bad.push_back("runtime ratio does not grow at r=" + format_number(row.sweep));
            last = ratio;
        }
    }
    return bad;
}

} // namespace chanest
