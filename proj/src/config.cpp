// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chanest {

void ExperimentConfig::validate() const
{
    geometry.validate();
    if (l_taps < 1 || n_pilots < l_taps || n_pilots > n_subcarriers)
        throw std::invalid_argument("config: need L <= K <= N");
    if (qam_order != 4 && qam_order != 16 && qam_order != 64)
        throw std::invalid_argument("config: ofdm.qam must be 4, 16 or 64");
    if (!(decay > 0.0))
        throw std::invalid_argument("config: channel.decay must be positive");
    if (snr_db.empty())
        throw std::invalid_argument("config: noise.snr_db must not be empty");
    if (trials < 1)
        throw std::invalid_argument("config: mc.trials must be at least 1");
    if (dlmmse_d < 0)
        throw std::invalid_argument("config: dlmmse.d must be non-negative");
    if (!(dlmmse_a > 0.0 && dlmmse_a < 1.0))
        throw std::invalid_argument("config: dlmmse.a must lie in (0, 1)");
    for (double lam : lambdas)
        ppp(lam).validate();
}

PppScenario ExperimentConfig::ppp(double lambda) const
{
    PppScenario s;
    s.lambda = lambda;
    s.gamma_o = gamma_o;
    s.gamma_m = gamma_m;
    s.beta = beta;
    return s;
}

namespace {

ArrayGeometry table_geometry(int m, int g)
{
    ArrayGeometry geom;
    geom.m_rows = m;
    geom.g_cols = g;
    geom.dx = 0.3;
    geom.dy = 0.5;
    geom.phi = M_PI / 3.0;
    geom.theta = 3.0 * M_PI / 8.0;
    geom.sigma = M_PI / 12.0;
    geom.xi = M_PI / 36.0;
    return geom;
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    std::string t = trim(text);
    if (t == "inf" || t == "infinity")
        return std::numeric_limits<double>::infinity();
    // "pi/3"-style angles are convenient in configs.
    auto slash = t.find('/');
    auto base = [&](const std::string& part) {
        std::string p = trim(part);
        double scale = 1.0;
        auto pos = p.find("pi");
        if (pos != std::string::npos) {
            std::string coef = trim(p.substr(0, pos) + p.substr(pos + 2));
            if (!coef.empty() && coef.back() == '*')
                coef.pop_back();
            if (!coef.empty() && coef.front() == '*')
                coef.erase(coef.begin());
            scale = M_PI;
            p = coef.empty() ? "1" : coef;
        }
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(p, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad number for " + key + ": '" + text + "'");
        }
        if (used != p.size())
            throw std::invalid_argument("config: bad number for " + key + ": '" + text + "'");
        return v * scale;
    };
    if (slash == std::string::npos)
        return base(t);
    return base(t.substr(0, slash)) / base(t.substr(slash + 1));
}

long long parse_int(const std::string& key, const std::string& text)
{
    std::string t = trim(text);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw std::invalid_argument("config: bad integer for " + key + ": '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(parse_double(key, item));
    return out;
}

} // namespace

ExperimentConfig desk_profile()
{
    ExperimentConfig cfg;
    cfg.geometry = table_geometry(6, 6);
    return cfg;
}

ExperimentConfig paper_profile()
{
    ExperimentConfig cfg;
    cfg.geometry = table_geometry(10, 10);
    cfg.n_subcarriers = 256;
    cfg.n_pilots = 32;
    cfg.l_taps = 8;
    cfg.snr_db = {0.0, 10.0, 20.0, 30.0};
    return cfg;
}

ExperimentConfig profile_by_name(const std::string& name)
{
    if (name == "desk")
        return desk_profile();
    if (name == "paper")
        return paper_profile();
    throw std::invalid_argument("unknown profile '" + name + "' (expected desk or paper)");
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text)
{
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto as_int = [](int& field) {
        return Setter([&field](const std::string& k, const std::string& v) {
            field = static_cast<int>(parse_int(k, v));
        });
    };
    auto as_double = [](double& field) {
        return Setter([&field](const std::string& k, const std::string& v) { field = parse_double(k, v); });
    };
    auto as_list = [](std::vector<double>& field) {
        return Setter([&field](const std::string& k, const std::string& v) { field = parse_list(k, v); });
    };
    const std::map<std::string, Setter> setters = {
        {"array.m", as_int(cfg.geometry.m_rows)},
        {"array.g", as_int(cfg.geometry.g_cols)},
        {"array.dx", as_double(cfg.geometry.dx)},
        {"array.dy", as_double(cfg.geometry.dy)},
        {"array.phi", as_double(cfg.geometry.phi)},
        {"array.theta", as_double(cfg.geometry.theta)},
        {"array.sigma", as_double(cfg.geometry.sigma)},
        {"array.xi", as_double(cfg.geometry.xi)},
        {"ofdm.n", as_int(cfg.n_subcarriers)},
        {"ofdm.k", as_int(cfg.n_pilots)},
        {"ofdm.qam", as_int(cfg.qam_order)},
        {"channel.l", as_int(cfg.l_taps)},
        {"channel.decay", as_double(cfg.decay)},
        {"noise.snr_db", as_list(cfg.snr_db)},
        {"ppp.lambda", as_list(cfg.lambdas)},
        {"ppp.gamma_o", as_double(cfg.gamma_o)},
        {"ppp.gamma_m", as_double(cfg.gamma_m)},
        {"ppp.beta", as_double(cfg.beta)},
        {"mc.trials", as_int(cfg.trials)},
        {"dlmmse.d", as_int(cfg.dlmmse_d)},
        {"dlmmse.a", as_double(cfg.dlmmse_a)},
        {"seed", [&cfg](const std::string& k, const std::string& v) {
             long long s = parse_int(k, v);
             if (s < 0)
                 throw std::invalid_argument("config: seed must be non-negative");
             cfg.seed = static_cast<std::uint64_t>(s);
         }},
    };

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        it->second(key, value);
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str());
}

} // namespace chanest
