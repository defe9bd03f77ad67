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

// Statistical description of one uplink pilot slot, the received pilot
// signal and the common estimate report.

#include "leoce/channel.hpp"
#include "leoce/common.hpp"
#include "leoce/pilots.hpp"
#include "leoce/random.hpp"
#include "leoce/transforms.hpp"

#include <string>
#include <vector>

namespace leoce {

// Everything an estimator may know: geometry, allocation and second-order
// statistics. Never the realization.
struct EstimationProblem {
    DelayGrid grid;
    PilotSet pilots;
    Allocation alloc;
    std::vector<CVec> steering;
    std::vector<double> betas;
    PDP pdp;                  // common profile on `grid`
    std::vector<RVec> omegas; // per-UT tap powers; beta_k * gamma unless overridden
    double p_tx = 1.0;
    double sigma2 = 1.0;

    int k() const { return static_cast<int>(steering.size()); }
    int m() const { return steering.empty() ? 0 : static_cast<int>(steering.front().size()); }
    int phase_of(int k) const
    {
        return pilots.phases[static_cast<std::size_t>(alloc.pilot_of[static_cast<std::size_t>(k)])];
    }
    const RVec &omega(int k) const { return omegas[static_cast<std::size_t>(k)]; }
    const CVec &g(int k) const { return steering[static_cast<std::size_t>(k)]; }

    void validate() const
    {
        const int kk = k();
        if (kk < 1)
            throw DimensionError("EstimationProblem: no users");
        if (static_cast<int>(betas.size()) != kk || static_cast<int>(omegas.size()) != kk)
            throw DimensionError("EstimationProblem: per-UT statistics differ in count");
        for (const auto &g : steering)
            if (g.size() != m())
                throw DimensionError("EstimationProblem: steering vectors differ in length");
        for (const auto &o : omegas)
            if (o.size() != grid.nd)
                throw DimensionError("EstimationProblem: tap-power vector length differs from nd");
        if (pdp.size() != grid.nd)
            throw DimensionError("EstimationProblem: PDP length differs from nd");
        if (pilots.npe != grid.npe || pilots.nd != grid.nd || pilots.np != grid.np)
            throw DimensionError("EstimationProblem: pilot set built for another grid");
        alloc.validate(kk);
        if (alloc.s_count() != pilots.s_count)
            throw DimensionError("EstimationProblem: allocation and pilot set differ in S");
        if (!(p_tx > 0.0))
            throw ParameterError("EstimationProblem: transmit power must be positive");
        if (!(sigma2 > 0.0))
            throw ParameterError("EstimationProblem: noise variance must be positive");
    }
};

inline EstimationProblem make_problem(const DelayGrid &grid, const PilotSet &pilots, const Allocation &alloc,
                                      std::vector<CVec> steering, std::vector<double> betas, const PDP &pdp,
                                      double p_tx, double sigma2)
{
    EstimationProblem p;
    p.grid = grid;
    p.pilots = pilots;
    p.alloc = alloc;
    p.steering = std::move(steering);
    p.betas = std::move(betas);
    p.pdp = pdp;
    for (double b : p.betas)
        p.omegas.push_back(build_rt(b, pdp));
    p.p_tx = p_tx;
    p.sigma2 = sigma2;
    p.validate();
    return p;
}

// ----- received signal ----------------------------------------------------

struct RxPilotSignal {
    CMat y;         // M x np
    CMat derotated; // column n scaled by conj(base[n])
};

inline CMat sample_noise(Rng &rng, int m, int np, double sigma2)
{
    CMat z(m, np);
    for (int n = 0; n < np; ++n)
        for (int i = 0; i < m; ++i)
            z(i, n) = complex_gaussian(rng, sigma2);
    return z;
}

inline RxPilotSignal make_rx(const PilotSet &pilots, CMat y)
{
    RxPilotSignal rx;
    rx.y = std::move(y);
    rx.derotated = rx.y * pilots.base.conjugate().asDiagonal();
    return rx;
}

// Y = sum_k sqrt(P/np) g_k (d_true,k .* x_{s_k})^T + noise.
inline CMat received_signal(const std::vector<CVec> &steering, const std::vector<CVec> &d_true,
                            const PilotSet &pilots, const Allocation &alloc, double p_tx)
{
    if (steering.size() != d_true.size() || static_cast<int>(steering.size()) != alloc.k_count())
        throw DimensionError("received_signal: per-UT inputs differ in count");
    if (steering.empty())
        throw DimensionError("received_signal: no users");
    const Eigen::Index m = steering.front().size();
    const double amp = std::sqrt(p_tx / pilots.np);
    std::vector<CVec> sym(static_cast<std::size_t>(pilots.s_count));
    for (int s = 0; s < pilots.s_count; ++s)
        sym[static_cast<std::size_t>(s)] = pilots.symbols(s);

    CMat y = CMat::Zero(m, pilots.np);
    for (std::size_t k = 0; k < steering.size(); ++k) {
        if (steering[k].size() != m || d_true[k].size() != pilots.np)
            throw DimensionError("received_signal: inconsistent vector lengths");
        const CVec row = amp * d_true[k].cwiseProduct(sym[static_cast<std::size_t>(alloc.pilot_of[k])]);
        y.noalias() += steering[k] * row.transpose();
    }
    return y;
}

inline RxPilotSignal synthesize_rx(const std::vector<UTChannel> &channels, const PilotSet &pilots,
                                   const Allocation &alloc, double p_tx, double sigma2, Rng &rng)
{
    if (sigma2 < 0.0)
        throw ParameterError("synthesize_rx: noise variance must be nonnegative");
    std::vector<CVec> g, d;
    for (const auto &c : channels) {
        g.push_back(c.g);
        d.push_back(c.d_true);
    }
    CMat y = received_signal(g, d, pilots, alloc, p_tx);
    if (sigma2 > 0.0)
        y += sample_noise(rng, static_cast<int>(y.rows()), static_cast<int>(y.cols()), sigma2);
    return make_rx(pilots, std::move(y));
}

// ----- estimate report ----------------------------------------------------

struct EstimateReport {
    std::string estimator_tag;
    std::vector<CVec> d_t_hat; // per UT, length nd
    std::vector<CVec> d_p_hat; // per UT, length np, = F_0 d_t_hat
    std::vector<double> per_ut_mse; // analytic, empty when unavailable
};

inline EstimateReport finish_report(std::string tag, const DelayGrid &grid, std::vector<CVec> d_t,
                                    std::vector<double> mse = {})
{
    EstimateReport r;
    r.estimator_tag = std::move(tag);
    r.d_p_hat.reserve(d_t.size());
    for (const auto &d : d_t)
        r.d_p_hat.push_back(fs_apply(grid, 0, d));
    r.d_t_hat = std::move(d_t);
    r.per_ut_mse = std::move(mse);
    return r;
}

// The interface the Monte-Carlo harness drives. Implementations precompute
// all statistics-dependent state at construction and are safe to call
// concurrently afterwards.
class Estimator {
public:
    virtual ~Estimator() = default;
    virtual std::string tag() const = 0;
    virtual EstimateReport estimate(const RxPilotSignal &rx) const = 0;
};

inline void check_rx(const EstimationProblem &p, const RxPilotSignal &rx)
{
    if (rx.derotated.rows() != p.m() || rx.derotated.cols() != p.grid.np)
        throw DimensionError("estimate: received matrix is " + std::to_string(rx.derotated.rows()) + "x" +
                             std::to_string(rx.derotated.cols()) + ", expected " + std::to_string(p.m()) + "x" +
                             std::to_string(p.grid.np));
}

} // namespace leoce
