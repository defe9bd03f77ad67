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

// Monte-Carlo harness: user populations, per-trial ground truth, the NMSE
// metric, the flop model and parameter sweeps.

#include "leoce/config.hpp"
#include "leoce/mmse.hpp"
#include "leoce/references.hpp"
#include "leoce/tsce.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

namespace leoce {

// ----- metrics ------------------------------------------------------------

// sum_k ||d_k - est_k||^2 / sum_k ||d_k||^2 for one realization.
inline double nmse(const std::vector<CVec> &truth, const std::vector<CVec> &est)
{
    if (truth.size() != est.size())
        throw DimensionError("nmse: truth and estimate differ in user count");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (truth[k].size() != est[k].size())
            throw DimensionError("nmse: vector length mismatch");
        num += (truth[k] - est[k]).squaredNorm();
        den += truth[k].squaredNorm();
    }
    if (!(den > 0.0))
        throw DomainError("nmse: ground truth carries zero power");
    return num / den;
}

struct FlopCount {
    double mmse = 0.0;
    double tsce = 0.0;

    double ratio() const { return mmse / tsce; }
};

// Leading-order operation counts with unit constants.
inline FlopCount flop_model(double m, double k, double np, double npe, double nd, double s_count)
{
    if (!(m > 0 && k > 0 && np > 0 && npe > 0 && nd > 0 && s_count > 0))
        throw DomainError("flop_model: all sizes must be positive");
    const double fft = k * npe * std::log2(npe);
    FlopCount f;
    f.mmse = k * m * np + fft + k * k * k * nd * nd * nd;
    f.tsce = s_count * m * m * m + k * m * m + k * m * np + k * np * np + fft;
    return f;
}

// ----- population and ground truth ----------------------------------------

struct UTPopulation {
    std::vector<UTGeometry> geometry;
    std::vector<double> shadow_db;
    std::vector<double> betas;
    std::vector<CVec> steering;

    int size() const { return static_cast<int>(betas.size()); }

    UTPopulation head(int k) const
    {
        if (k > size())
            throw ParameterError("UTPopulation::head: not enough users");
        UTPopulation p;
        p.geometry.assign(geometry.begin(), geometry.begin() + k);
        p.shadow_db.assign(shadow_db.begin(), shadow_db.begin() + k);
        p.betas.assign(betas.begin(), betas.begin() + k);
        p.steering.assign(steering.begin(), steering.begin() + k);
        return p;
    }
};

// Draws K user positions uniformly over the coverage disc, with log-normal
// shadowing of the configured spread (drawn even when the spread is zero).
inline UTPopulation sample_population(const ScenarioConfig &cfg, int k)
{
    Rng rng = make_rng(cfg.seed, Stream::population);
    const OrbitParams orbit = cfg.orbit();
    const LinkBudget lb = cfg.link();
    const ArrayGeometry arr = cfg.array();
    std::normal_distribution<double> shadow(0.0, 1.0);
    UTPopulation pop;
    for (int i = 0; i < k; ++i) {
        const SpaceAngle xi = sample_space_angle(rng, cfg.theta_max());
        const UTGeometry geo = ut_geometry(xi, orbit);
        const double z = shadow(rng);
        const double sh = cfg.shadow_sigma_db > 0.0 ? cfg.shadow_sigma_db * z : 0.0;
        pop.geometry.push_back(geo);
        pop.shadow_db.push_back(sh);
        pop.betas.push_back(large_scale_beta(geo, lb, sh));
        pop.steering.push_back(array_response(arr, xi));
    }
    return pop;
}

// One Monte-Carlo realization: off-grid paths for every user and the noise.
struct TrialRealization {
    std::vector<CVec> d_true;
    CMat noise;
};

struct TruthModel {
    DelayGrid grid;
    PDP pdp;
    PathOptions paths;
};

inline TruthModel truth_model(const ScenarioConfig &cfg)
{
    TruthModel t;
    t.grid = delay_grid(cfg.ofdm(), cfg.truth_mu_d);
    t.pdp = exp_pdp_on_grid(t.grid, cfg.pdp_decay_taps);
    t.paths.q_per_tap = cfg.q_per_tap;
    return t;
}

inline TrialRealization draw_trial(const ScenarioConfig &cfg, const TruthModel &truth, const UTPopulation &pop,
                                   double sigma2, std::uint64_t trial, std::uint64_t p_index)
{
    Rng rng = make_rng(cfg.seed, Stream::trial, {trial, p_index});
    TrialRealization r;
    for (int k = 0; k < pop.size(); ++k) {
        const PathSet ps = sample_paths(rng, truth.pdp, truth.grid, pop.betas[static_cast<std::size_t>(k)], truth.paths);
        r.d_true.push_back(true_dp(ps, truth.grid));
    }
    r.noise = sample_noise(rng, cfg.array().m(), cfg.np, sigma2);
    return r;
}

// ----- scenario assembly --------------------------------------------------

inline Allocation make_allocation(const ScenarioConfig &cfg, const UTPopulation &pop, const std::string &kind,
                                  int s_count)
{
    if (kind == "greedy") {
        const WeightGraph wg = weight_graph(pop.betas, pop.steering);
        const GreedyOrder order = cfg.greedy_order == "beta" ? GreedyOrder::beta_descending : GreedyOrder::index;
        return greedy_allocate(wg, s_count, order, &pop.betas);
    }
    if (kind == "random") {
        Rng rng = make_rng(cfg.seed, Stream::allocation,
                           {static_cast<std::uint64_t>(pop.size()), static_cast<std::uint64_t>(s_count)});
        return random_allocate(rng, pop.size(), s_count);
    }
    throw ConfigError("unknown allocation '" + kind + "'");
}

inline EstimationProblem make_problem(const ScenarioConfig &cfg, const UTPopulation &pop, const Allocation &alloc,
                                      int mu_d, int s_count, double p_tx, double sigma2)
{
    const DelayGrid grid = delay_grid(cfg.ofdm(), mu_d);
    const PilotSet pilots = build_pilot_set(grid, s_count, zadoff_chu(cfg.np, cfg.zc_root));
    return make_problem(grid, pilots, alloc, pop.steering, pop.betas, exp_pdp_on_grid(grid, cfg.pdp_decay_taps),
                        p_tx, sigma2);
}

inline std::unique_ptr<Estimator> make_estimator(const std::string &tag, EstimationProblem problem)
{
    if (tag == "mmse")
        return std::make_unique<MmseEstimator>(std::move(problem));
    if (tag == "tsce") {
        TsceOptions opt;
        opt.analytic_mse = false;
        return std::make_unique<TsceEstimator>(std::move(problem), opt);
    }
    if (tag == "low_snr_ref")
        return std::make_unique<LowSnrReference>(std::move(problem));
    if (tag == "high_snr_ref")
        return std::make_unique<HighSnrReference>(std::move(problem));
    throw ConfigError("unknown estimator '" + tag + "'");
}

// ----- parallel trials ----------------------------------------------------

inline int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, n) on up to `threads` workers. The first
// exception is rethrown after all workers stop.
template <class Body> void parallel_for(int n, int threads, Body body)
{
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err)
                        err = std::current_exception();
                    next.store(n);
                }
            }
        });
    for (auto &th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

struct TrialStats {
    double mean = 0.0;
    double stddev = 0.0;
};

// Mean and sample standard deviation, accumulated in index order.
inline TrialStats summarize(const std::vector<double> &v)
{
    TrialStats s;
    if (v.empty())
        return s;
    for (double x : v)
        s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double acc = 0.0;
        for (double x : v)
            acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(v.size() - 1));
    }
    return s;
}

// NMSE of `est` on each trial, with truth and noise shared across every
// estimator evaluated at the same (trial, power index).
inline std::vector<double> run_trials(const ScenarioConfig &cfg, const TruthModel &truth, const UTPopulation &full_pop,
                                      const Estimator &est, const EstimationProblem &problem, std::uint64_t p_index,
                                      int threads)
{
    std::vector<double> out(static_cast<std::size_t>(cfg.trials));
    const int k = problem.k();
    parallel_for(cfg.trials, threads, [&](int t) {
        const TrialRealization r = draw_trial(cfg, truth, full_pop, problem.sigma2, static_cast<std::uint64_t>(t), p_index);
        const std::vector<CVec> d(r.d_true.begin(), r.d_true.begin() + k);
        CMat y = received_signal(problem.steering, d, problem.pilots, problem.alloc, problem.p_tx) + r.noise;
        const EstimateReport rep = est.estimate(make_rx(problem.pilots, std::move(y)));
        out[static_cast<std::size_t>(t)] = nmse(d, rep.d_p_hat);
    });
    return out;
}

// ----- sweep --------------------------------------------------------------

struct SweepRow {
    double p_dbw = 0.0;
    std::string estimator;
    std::string allocation;
    int mu_d = 0;
    int s_count = 0;
    int k_count = 0;
    double nmse_avg = 0.0;
    double nmse_std = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::string error;
};

struct SweepOptions {
    bool record_timing = false; // otherwise wall_ms is written as 0
    std::function<void(const SweepRow &)> progress;
};

inline std::vector<SweepRow> run_sweep(const ScenarioConfig &cfg, const SweepOptions &opt = {})
{
    cfg.validate();
    const int threads = resolve_threads(cfg.threads);
    const int k_max = *std::max_element(cfg.num_uts.begin(), cfg.num_uts.end());
    const UTPopulation full_pop = sample_population(cfg, k_max);
    const TruthModel truth = truth_model(cfg);
    const double sigma2 = noise_variance(cfg.link());

    std::map<std::tuple<std::string, int, int>, Allocation> allocations;
    std::vector<SweepRow> rows;
    const auto powers = cfg.p_dbw_points();
    for (std::size_t pi = 0; pi < powers.size(); ++pi) {
        const double p_dbw = powers[pi];
        const double p_tx = std::pow(10.0, p_dbw / 10.0);
        for (int mu : cfg.mu_d)
            for (int s : cfg.num_pilots)
                for (int k : cfg.num_uts)
                    for (const auto &alloc_kind : cfg.allocation)
                        for (const auto &est_tag : cfg.estimator) {
                            SweepRow row;
                            row.p_dbw = p_dbw;
                            row.estimator = est_tag;
                            row.allocation = alloc_kind;
                            row.mu_d = mu;
                            row.s_count = s;
                            row.k_count = k;
                            row.seed = cfg.seed;
                            const auto t0 = std::chrono::steady_clock::now();
                            try {
                                const UTPopulation pop = full_pop.head(k);
                                const auto akey = std::make_tuple(alloc_kind, s, k);
                                auto it = allocations.find(akey);
                                if (it == allocations.end())
                                    it = allocations.emplace(akey, make_allocation(cfg, pop, alloc_kind, s)).first;
                                const EstimationProblem prob = make_problem(cfg, pop, it->second, mu, s, p_tx, sigma2);
                                const auto est = make_estimator(est_tag, prob);
                                const auto v = run_trials(cfg, truth, full_pop, *est, prob, pi, threads);
                                const TrialStats st = summarize(v);
                                row.nmse_avg = st.mean;
                                row.nmse_std = st.stddev;
                                row.trials = cfg.trials;
                            } catch (const Error &e) {
                                row.nmse_avg = std::numeric_limits<double>::quiet_NaN();
                                row.nmse_std = std::numeric_limits<double>::quiet_NaN();
                                row.trials = 0;
                                row.error = e.what();
                            }
                            if (opt.record_timing)
                                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                            if (opt.progress)
                                opt.progress(row);
                            rows.push_back(std::move(row));
                        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow &a, const SweepRow &b) {
        return std::tie(a.p_dbw, a.estimator, a.allocation, a.mu_d, a.s_count, a.k_count) <
               std::tie(b.p_dbw, b.estimator, b.allocation, b.mu_d, b.s_count, b.k_count);
    });
    return rows;
}

// ----- output -------------------------------------------------------------

inline std::string format_number(double v, const char *fmt = "%.10g")
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

inline void write_sweep_csv(std::ostream &os, const std::vector<SweepRow> &rows)
{
    os << "p_dbw,estimator,allocation,mu_d,s,k,nmse_avg,nmse_std,trials,seed,wall_ms\n";
    for (const auto &r : rows)
        os << format_number(r.p_dbw) << ',' << r.estimator << ',' << r.allocation << ',' << r.mu_d << ','
           << r.s_count << ',' << r.k_count << ',' << format_number(r.nmse_avg, "%.12e") << ','
           << format_number(r.nmse_std, "%.12e") << ',' << r.trials << ',' << r.seed << ','
           << format_number(r.wall_ms, "%.3f") << '\n';
}

// gnuplot script with inline data blocks: NMSE (dB) against P (dBW), one
// series per (estimator, allocation, mu_d, S, K).
inline void write_plot_script(std::ostream &os, const std::vector<SweepRow> &rows, const std::string &title)
{
    std::map<std::string, std::vector<const SweepRow *>> series;
    for (const auto &r : rows)
        if (r.trials > 0)
            series[r.estimator + " " + r.allocation + " mu_d=" + std::to_string(r.mu_d) + " S=" +
                   std::to_string(r.s_count) + " K=" + std::to_string(r.k_count)]
                .push_back(&r);
    int idx = 0;
    std::vector<std::string> names;
    for (const auto &[name, pts] : series) {
        os << "$s" << idx << " << EOD\n";
        for (const SweepRow *r : pts)
            os << format_number(r->p_dbw) << ' ' << format_number(10.0 * std::log10(r->nmse_avg), "%.6f") << '\n';
        os << "EOD\n";
        names.push_back(name);
        ++idx;
    }
    os << "set title '" << title << "'\n"
       << "set xlabel 'P (dBW)'\nset ylabel 'NMSE (dB)'\nset grid\nset key outside right\n";
    if (names.empty()) {
        os << "# no data\n";
        return;
    }
    os << "plot ";
    for (int i = 0; i < idx; ++i)
        os << (i ? ", \\\n     " : "") << "$s" << i << " with linespoints title '" << names[static_cast<std::size_t>(i)] << "'";
    os << '\n';
}

struct ComplexityRow {
    int np = 0;
    FlopCount flops;
};

// Flop model over a list of pilot lengths with the other sizes taken from
// the configuration (first list entries).
inline std::vector<ComplexityRow> complexity_table(const ScenarioConfig &cfg, const std::vector<int> &np_list)
{
    std::vector<ComplexityRow> out;
    const int mu = cfg.mu_d.front();
    const double m = cfg.array().m();
    const double k = cfg.num_uts.front();
    const double s = cfg.num_pilots.front();
    for (int np : np_list) {
        if (np < 1)
            throw ConfigError("complexity: pilot lengths must be positive");
        const long ld = (static_cast<long>(np) * cfg.ng + cfg.nc - 1) / cfg.nc;
        const double nd = static_cast<double>(mu * ld);
        const double npe = static_cast<double>(mu) * np;
        out.push_back({np, flop_model(m, k, np, npe, nd, s)});
    }
    return out;
}

inline void write_complexity_csv(std::ostream &os, const std::vector<ComplexityRow> &rows)
{
    os << "np,mmse_flops,tsce_flops,ratio\n";
    for (const auto &r : rows)
        os << r.np << ',' << format_number(r.flops.mmse, "%.6e") << ',' << format_number(r.flops.tsce, "%.6e") << ','
           << format_number(r.flops.ratio(), "%.6e") << '\n';
}

inline void write_allocation_csv(std::ostream &os, const Allocation &a)
{
    os << "ut_index,pilot_index\n";
    for (int k = 0; k < a.k_count(); ++k)
        os << k << ',' << a.pilot_of[static_cast<std::size_t>(k)] << '\n';
}

} // namespace leoce
