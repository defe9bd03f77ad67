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

#include "leoce/leoce.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace leoce;

namespace {

struct CommonOptions {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::string estimator;
    std::string allocation;
    std::string mu_d;
    int trials = 0;
    int threads = -1;
};

void add_common(CLI::App *cmd, CommonOptions &o)
{
    cmd->add_option("--config", o.config, "Scenario configuration file (key = value)");
    cmd->add_option("--seed", o.seed, "Base seed, overrides the configuration");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--estimator", o.estimator, "Comma-separated estimators: mmse, tsce, low_snr_ref, high_snr_ref");
    cmd->add_option("--allocation", o.allocation, "Comma-separated allocations: greedy, random");
    cmd->add_option("--mu-d", o.mu_d, "Comma-separated delay refining factors");
    cmd->add_option("--trials", o.trials, "Monte-Carlo trials per point")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

ScenarioConfig resolve(const CommonOptions &o, CLI::App *cmd)
{
    ScenarioConfig cfg = o.config.empty() ? ScenarioConfig{} : load_config(o.config);
    if (cmd->count("--seed"))
        cfg.set("seed", std::to_string(o.seed));
    if (!o.estimator.empty())
        cfg.set("estimator", o.estimator);
    if (!o.allocation.empty())
        cfg.set("allocation", o.allocation);
    if (!o.mu_d.empty())
        cfg.set("mu_d", o.mu_d);
    if (o.trials > 0)
        cfg.trials = o.trials;
    if (o.threads >= 0)
        cfg.threads = o.threads;
    cfg.validate();
    return cfg;
}

std::ofstream open_output(const std::string &dir, const std::string &name)
{
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream os(path);
    if (!os)
        throw Error("cannot write '" + path.string() + "'");
    std::cerr << "writing " << path.string() << '\n';
    return os;
}

int k_of(const ScenarioConfig &cfg) { return cfg.num_uts.front(); }

void cmd_scenario(const ScenarioConfig &cfg, const std::string &out)
{
    const UTPopulation pop = sample_population(cfg, *std::max_element(cfg.num_uts.begin(), cfg.num_uts.end()));
    auto os = open_output(out, "scenario.csv");
    os << "ut_index,xi_x,xi_y,nadir_deg,elevation_deg,slant_km,shadow_db,beta\n";
    for (int k = 0; k < pop.size(); ++k) {
        const UTGeometry &g = pop.geometry[static_cast<std::size_t>(k)];
        os << k << ',' << format_number(g.xi.x, "%.12e") << ',' << format_number(g.xi.y, "%.12e") << ','
           << format_number(g.nadir * 180.0 / kPi, "%.9f") << ',' << format_number(g.elevation * 180.0 / kPi, "%.9f")
           << ',' << format_number(g.slant_distance_km, "%.6f") << ','
           << format_number(pop.shadow_db[static_cast<std::size_t>(k)], "%.6f") << ','
           << format_number(pop.betas[static_cast<std::size_t>(k)], "%.12e") << '\n';
    }
    std::cout << "users " << pop.size() << ", noise variance " << format_number(noise_variance(cfg.link()), "%.6e")
              << " W\n";
}

void cmd_allocate(const ScenarioConfig &cfg, const std::string &out)
{
    const int k = k_of(cfg);
    const int s = cfg.num_pilots.front();
    const UTPopulation pop = sample_population(cfg, k);
    const WeightGraph wg = weight_graph(pop.betas, pop.steering);
    for (const auto &kind : cfg.allocation) {
        const Allocation a = make_allocation(cfg, pop, kind, s);
        auto os = open_output(out, "allocation_" + kind + ".csv");
        write_allocation_csv(os, a);
        std::cout << kind << ": K=" << k << " S=" << s << " cut " << format_number(cut_value(wg, a), "%.6e")
                  << " intra " << format_number(intra_weight(wg, a), "%.6e") << " of total "
                  << format_number(total_weight(wg), "%.6e") << '\n';
    }
}

// Per-user NMSE at one operating point: the first power, mu_d, S and K of
// the configuration, for every requested estimator and allocation.
void cmd_estimate(const ScenarioConfig &cfg, const std::string &out)
{
    const int k = k_of(cfg);
    const int s = cfg.num_pilots.front();
    const int mu = cfg.mu_d.front();
    const double p_dbw = cfg.p_dbw_min;
    const double p_tx = std::pow(10.0, p_dbw / 10.0);
    const double sigma2 = noise_variance(cfg.link());
    const UTPopulation pop = sample_population(cfg, k);
    const TruthModel truth = truth_model(cfg);
    const int threads = resolve_threads(cfg.threads);

    auto os = open_output(out, "estimate.csv");
    os << "estimator,allocation,ut_index,pilot_index,beta,nmse,analytic_mse_over_beta\n";
    for (const auto &kind : cfg.allocation) {
        const Allocation alloc = make_allocation(cfg, pop, kind, s);
        const EstimationProblem prob = make_problem(cfg, pop, alloc, mu, s, p_tx, sigma2);
        for (const auto &tag : cfg.estimator) {
            std::unique_ptr<Estimator> est;
            if (tag == "tsce")
                est = std::make_unique<TsceEstimator>(prob);
            else
                est = make_estimator(tag, prob);
            std::vector<RVec> err(static_cast<std::size_t>(cfg.trials)), pow(static_cast<std::size_t>(cfg.trials));
            std::vector<double> analytic;
            std::mutex mu_lock;
            parallel_for(cfg.trials, threads, [&](int t) {
                const TrialRealization r = draw_trial(cfg, truth, pop, sigma2, static_cast<std::uint64_t>(t), 0);
                CMat y = received_signal(prob.steering, r.d_true, prob.pilots, prob.alloc, p_tx) + r.noise;
                const EstimateReport rep = est->estimate(make_rx(prob.pilots, std::move(y)));
                RVec e(k), p(k);
                for (int u = 0; u < k; ++u) {
                    e[u] = (rep.d_p_hat[static_cast<std::size_t>(u)] - r.d_true[static_cast<std::size_t>(u)]).squaredNorm();
                    p[u] = r.d_true[static_cast<std::size_t>(u)].squaredNorm();
                }
                err[static_cast<std::size_t>(t)] = e;
                pow[static_cast<std::size_t>(t)] = p;
                if (t == 0) {
                    std::lock_guard<std::mutex> lock(mu_lock);
                    analytic = rep.per_ut_mse;
                }
            });
            RVec e_sum = RVec::Zero(k), p_sum = RVec::Zero(k);
            for (int t = 0; t < cfg.trials; ++t) {
                e_sum += err[static_cast<std::size_t>(t)];
                p_sum += pow[static_cast<std::size_t>(t)];
            }
            double total_e = 0.0, total_p = 0.0;
            for (int u = 0; u < k; ++u) {
                const double beta = pop.betas[static_cast<std::size_t>(u)];
                os << tag << ',' << kind << ',' << u << ',' << alloc.pilot_of[static_cast<std::size_t>(u)] << ','
                   << format_number(beta, "%.6e") << ',' << format_number(e_sum[u] / p_sum[u], "%.6e") << ','
                   << (analytic.empty() ? std::string("nan")
                                        : format_number(analytic[static_cast<std::size_t>(u)] / beta, "%.6e"))
                   << '\n';
                total_e += e_sum[u];
                total_p += p_sum[u];
            }
            std::cout << tag << " / " << kind << ": NMSE " << format_number(10.0 * std::log10(total_e / total_p), "%.3f")
                      << " dB at P = " << format_number(p_dbw) << " dBW\n";
        }
    }
}

int cmd_sweep(const ScenarioConfig &cfg, const std::string &out, bool timing)
{
    SweepOptions opt;
    opt.record_timing = timing;
    opt.progress = [](const SweepRow &r) {
        std::cerr << "P=" << format_number(r.p_dbw) << " " << r.estimator << "/" << r.allocation << " mu_d=" << r.mu_d
                  << " S=" << r.s_count << " K=" << r.k_count << ": ";
        if (r.error.empty())
            std::cerr << format_number(10.0 * std::log10(r.nmse_avg), "%.3f") << " dB\n";
        else
            std::cerr << "error: " << r.error << '\n';
    };
    const auto rows = run_sweep(cfg, opt);
    {
        auto os = open_output(out, "sweep.csv");
        write_sweep_csv(os, rows);
    }
    {
        auto os = open_output(out, "sweep.gp");
        write_plot_script(os, rows, "NMSE against transmit power");
    }
    int failures = 0;
    for (const auto &r : rows)
        failures += r.error.empty() ? 0 : 1;
    if (failures > 0) {
        auto os = open_output(out, "errors.txt");
        for (const auto &r : rows)
            if (!r.error.empty())
                os << "p_dbw=" << format_number(r.p_dbw) << ' ' << r.estimator << ' ' << r.allocation
                   << " mu_d=" << r.mu_d << " s=" << r.s_count << " k=" << r.k_count << ": " << r.error << '\n';
        std::cerr << failures << " of " << rows.size() << " rows failed, see errors.txt\n";
    }
    return 0;
}

void cmd_complexity(const ScenarioConfig &cfg, const std::string &out, const std::vector<int> &np_list)
{
    const auto rows = complexity_table(cfg, np_list);
    auto os = open_output(out, "complexity.csv");
    write_complexity_csv(os, rows);
    for (const auto &r : rows)
        std::cout << "np=" << r.np << " ratio " << format_number(r.flops.ratio(), "%.3e") << '\n';
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"leoce: channel estimation for LEO satellite massive MIMO OFDM uplinks"};
    app.require_subcommand(1);

    CommonOptions o;
    bool timing = false;
    std::vector<int> np_list = {32, 64, 128, 256, 512, 1024, 2048};

    CLI::App *scenario = app.add_subcommand("scenario", "Sample user positions and dump geometry and gains");
    CLI::App *allocate = app.add_subcommand("allocate", "Assign pilots and dump the allocation");
    CLI::App *estimate = app.add_subcommand("estimate", "Per-user NMSE at a single operating point");
    CLI::App *sweep = app.add_subcommand("sweep", "NMSE sweep over transmit power");
    CLI::App *complexity = app.add_subcommand("complexity", "Flop model over pilot lengths");
    for (CLI::App *c : {scenario, allocate, estimate, sweep, complexity})
        add_common(c, o);
    sweep->add_flag("--timing", timing, "Record wall-clock time per row (output is no longer reproducible)");
    complexity->add_option("--np-list", np_list, "Pilot lengths")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*scenario)
            cmd_scenario(resolve(o, scenario), o.out);
        else if (*allocate)
            cmd_allocate(resolve(o, allocate), o.out);
        else if (*estimate)
            cmd_estimate(resolve(o, estimate), o.out);
        else if (*sweep)
            return cmd_sweep(resolve(o, sweep), o.out, timing);
        else if (*complexity)
            cmd_complexity(resolve(o, complexity), o.out, np_list);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
