// SPDX-License-Identifier: Apache-2.0
//
// leoce - channel estimation toolkit for LEO satellite massive MIMO OFDM uplinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Flat `key = value` scenario configuration. Lines starting with '#' are
// comments; list-valued keys take comma-separated values. Unknown keys and
// malformed values are errors.

#include "leoce/channel.hpp"
#include "leoce/common.hpp"
#include "leoce/satgeo.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace leoce {

struct ScenarioConfig {
    // geometry and link budget
    double earth_radius_km = 6378.0;
    double altitude_km = 1000.0;
    double fc_ghz = 2.0;
    double bandwidth_mhz = 20.0;
    double noise_temp_k = 290.0;
    double g_sat_dbi = 7.0;
    double g_ut_dbi = 0.0;
    double iono_loss_db = 2.0;
    double shadow_sigma_db = 0.0;
    double theta_max_deg = 30.0;

    // array, OFDM and channel model
    int mx = 8;
    int my = 8;
    double dx_lambda = 1.0;
    double dy_lambda = 1.0;
    int nc = 512;
    int np = 128;
    int rp = 192;
    int ng = 36;
    double delta_f_khz = 60.0;
    std::vector<int> mu_d = {2};
    double pdp_decay_taps = 2.0; // in base-resolution taps
    int q_per_tap = 1;
    int truth_mu_d = 8;          // refining factor of the grid truth paths are drawn on

    // pilots
    std::vector<int> num_pilots = {14};
    int zc_root = 1;
    std::vector<std::string> allocation = {"greedy", "random"};
    std::string greedy_order = "index";

    // estimators
    std::vector<std::string> estimator = {"mmse", "tsce"};

    // experiment
    std::vector<int> num_uts = {48};
    double p_dbw_min = 0.0;
    double p_dbw_max = 20.0;
    double p_dbw_step = 5.0;
    int trials = 100;
    std::uint64_t seed = 1;
    int threads = 0; // 0 = hardware concurrency

    OrbitParams orbit() const { return {earth_radius_km, altitude_km}; }

    ArrayGeometry array() const { return {mx, my, dx_lambda, dy_lambda}; }

    OFDMGrid ofdm() const { return {nc, np, rp, ng, delta_f_khz * 1e3}; }

    LinkBudget link(double p_dbw = 0.0) const
    {
        LinkBudget lb;
        lb.tx_power_w = std::pow(10.0, p_dbw / 10.0);
        lb.noise_temp_k = noise_temp_k;
        lb.bandwidth_hz = bandwidth_mhz * 1e6;
        lb.num_subcarriers = nc;
        lb.sat_gain_dbi = g_sat_dbi;
        lb.ut_gain_dbi = g_ut_dbi;
        lb.iono_loss_db = iono_loss_db;
        lb.carrier_hz = fc_ghz * 1e9;
        return lb;
    }

    double theta_max() const { return theta_max_deg * kPi / 180.0; }

    std::vector<double> p_dbw_points() const
    {
        std::vector<double> pts;
        if (p_dbw_step > 0.0) {
            const int n = static_cast<int>(std::floor((p_dbw_max - p_dbw_min) / p_dbw_step + 1e-9)) + 1;
            for (int i = 0; i < n; ++i)
                pts.push_back(p_dbw_min + i * p_dbw_step);
        } else {
            pts.push_back(p_dbw_min);
        }
        return pts;
    }

    void validate() const
    {
        orbit().validate();
        link().validate();
        ofdm().validate();
        if (!(theta_max_deg > 0.0 && theta_max_deg < 90.0))
            throw ConfigError("theta_max_deg must lie in (0, 90)");
        if (mx < 1 || my < 1)
            throw ConfigError("mx and my must be positive");
        if (!(pdp_decay_taps > 0.0))
            throw ConfigError("pdp_decay_taps must be positive");
        if (q_per_tap < 1 || truth_mu_d < 1)
            throw ConfigError("q_per_tap and truth_mu_d must be positive");
        if (trials < 1)
            throw ConfigError("trials must be at least 1");
        if (p_dbw_max < p_dbw_min || p_dbw_step < 0.0)
            throw ConfigError("power range is empty");
        if (mu_d.empty() || num_pilots.empty() || num_uts.empty() || allocation.empty() || estimator.empty())
            throw ConfigError("list-valued keys must not be empty");
        for (int v : mu_d)
            if (v < 1)
                throw ConfigError("mu_d must be a positive integer");
        for (int k : num_uts)
            for (int s : num_pilots)
                if (s < 1 || k < s)
                    throw ConfigError("num_uts must be at least num_pilots");
        for (const auto &a : allocation)
            if (a != "greedy" && a != "random")
                throw ConfigError("allocation must be greedy or random, got '" + a + "'");
        for (const auto &e : estimator)
            if (e != "mmse" && e != "tsce" && e != "low_snr_ref" && e != "high_snr_ref")
                throw ConfigError("unknown estimator '" + e + "'");
        if (greedy_order != "index" && greedy_order != "beta")
            throw ConfigError("greedy_order must be index or beta");
        if (threads < 0)
            throw ConfigError("threads must be nonnegative");
    }

    void set(const std::string &key, const std::string &value);
};

namespace detail {

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string &v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

template <class T> T parse_number(const std::string &key, const std::string &text)
{
    const std::string t = trim(text);
    T v{};
    const char *b = t.data();
    const char *e = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (t.empty() || ec != std::errc() || ptr != e)
        throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
    return v;
}

template <class T> std::vector<T> parse_list(const std::string &key, const std::string &text)
{
    std::vector<T> out;
    for (const auto &item : split_list(text))
        out.push_back(parse_number<T>(key, item));
    return out;
}

} // namespace detail

inline void ScenarioConfig::set(const std::string &key, const std::string &value)
{
    using detail::parse_list;
    using detail::parse_number;
    using Setter = std::function<void(const std::string &)>;
    const std::map<std::string, Setter> table = {
        {"earth_radius_km", [&](const std::string &v) { earth_radius_km = parse_number<double>(key, v); }},
        {"altitude_km", [&](const std::string &v) { altitude_km = parse_number<double>(key, v); }},
        {"fc_ghz", [&](const std::string &v) { fc_ghz = parse_number<double>(key, v); }},
        {"bandwidth_mhz", [&](const std::string &v) { bandwidth_mhz = parse_number<double>(key, v); }},
        {"noise_temp_k", [&](const std::string &v) { noise_temp_k = parse_number<double>(key, v); }},
        {"g_sat_dbi", [&](const std::string &v) { g_sat_dbi = parse_number<double>(key, v); }},
        {"g_ut_dbi", [&](const std::string &v) { g_ut_dbi = parse_number<double>(key, v); }},
        {"iono_loss_db", [&](const std::string &v) { iono_loss_db = parse_number<double>(key, v); }},
        {"shadow_sigma_db", [&](const std::string &v) { shadow_sigma_db = parse_number<double>(key, v); }},
        {"theta_max_deg", [&](const std::string &v) { theta_max_deg = parse_number<double>(key, v); }},
        {"mx", [&](const std::string &v) { mx = parse_number<int>(key, v); }},
        {"my", [&](const std::string &v) { my = parse_number<int>(key, v); }},
        {"dx_lambda", [&](const std::string &v) { dx_lambda = parse_number<double>(key, v); }},
        {"dy_lambda", [&](const std::string &v) { dy_lambda = parse_number<double>(key, v); }},
        {"nc", [&](const std::string &v) { nc = parse_number<int>(key, v); }},
        {"np", [&](const std::string &v) { np = parse_number<int>(key, v); }},
        {"rp", [&](const std::string &v) { rp = parse_number<int>(key, v); }},
        {"ng", [&](const std::string &v) { ng = parse_number<int>(key, v); }},
        {"delta_f_khz", [&](const std::string &v) { delta_f_khz = parse_number<double>(key, v); }},
        {"mu_d", [&](const std::string &v) { mu_d = parse_list<int>(key, v); }},
        {"pdp_decay_taps", [&](const std::string &v) { pdp_decay_taps = parse_number<double>(key, v); }},
        {"q_per_tap", [&](const std::string &v) { q_per_tap = parse_number<int>(key, v); }},
        {"truth_mu_d", [&](const std::string &v) { truth_mu_d = parse_number<int>(key, v); }},
        {"num_pilots", [&](const std::string &v) { num_pilots = parse_list<int>(key, v); }},
        {"zc_root", [&](const std::string &v) { zc_root = parse_number<int>(key, v); }},
        {"allocation", [&](const std::string &v) { allocation = detail::split_list(v); }},
        {"greedy_order", [&](const std::string &v) { greedy_order = detail::trim(v); }},
        {"estimator", [&](const std::string &v) { estimator = detail::split_list(v); }},
        {"num_uts", [&](const std::string &v) { num_uts = parse_list<int>(key, v); }},
        {"p_dbw_min", [&](const std::string &v) { p_dbw_min = parse_number<double>(key, v); }},
        {"p_dbw_max", [&](const std::string &v) { p_dbw_max = parse_number<double>(key, v); }},
        {"p_dbw_step", [&](const std::string &v) { p_dbw_step = parse_number<double>(key, v); }},
        {"trials", [&](const std::string &v) { trials = parse_number<int>(key, v); }},
        {"seed", [&](const std::string &v) { seed = parse_number<std::uint64_t>(key, v); }},
        {"threads", [&](const std::string &v) { threads = parse_number<int>(key, v); }},
    };
    const auto it = table.find(key);
    if (it == table.end())
        throw ConfigError("unknown configuration key '" + key + "'");
    it->second(value);
}

inline ScenarioConfig parse_config(std::istream &in, ScenarioConfig cfg = {})
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        try {
            cfg.set(key, line.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file '" + path + "'");
    return parse_config(in);
}

} // namespace leoce
