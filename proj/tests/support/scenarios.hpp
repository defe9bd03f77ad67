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

// Small hand-built estimation problems shared by the unit and acceptance tests.

#include "leoce/leoce.hpp"

#include <vector>

namespace scenarios {

using namespace leoce;

struct SmallSpec {
    int mx = 2, my = 2;
    int k = 2;
    int s = 1;
    int np = 16;
    int nc = 64;
    int ng = 8; // ld = np * ng / nc
    int rp = 0;
    int mu_d = 1;
    double decay = 1.0;
    double p_tx = 1.0;
    double sigma2 = 0.1;
    double beta_spread = 1.0; // betas drawn in [1, beta_spread]
    bool dft_angles = false;  // co-pilot users on mutually orthogonal DFT beams
    std::uint64_t seed = 1;
};

inline OFDMGrid ofdm_of(const SmallSpec &sp)
{
    OFDMGrid o;
    o.nc = sp.nc;
    o.np = sp.np;
    o.rp = sp.rp;
    o.ng = sp.ng;
    o.delta_f = 60e3;
    return o;
}

// Space angles on the DFT grid of an mx x my array with unit spacing, all
// inside the disc of radius 0.5; distinct angles give orthogonal beams.
inline std::vector<SpaceAngle> dft_angles(int mx, int my)
{
    std::vector<SpaceAngle> out;
    for (int i = -mx / 2; i < mx / 2; ++i)
        for (int j = -my / 2; j < my / 2; ++j) {
            const SpaceAngle a{static_cast<double>(i) / mx, static_cast<double>(j) / my};
            if (a.radius_sq() <= 0.25 + 1e-12)
                out.push_back(a);
        }
    return out;
}

inline EstimationProblem small_problem(const SmallSpec &sp)
{
    Rng rng(sp.seed);
    const DelayGrid grid = delay_grid(ofdm_of(sp), sp.mu_d);
    const PilotSet pilots = build_pilot_set(grid, sp.s, zadoff_chu(sp.np, 1));
    std::vector<int> pilot_of;
    for (int k = 0; k < sp.k; ++k)
        pilot_of.push_back(k % sp.s);
    const Allocation alloc = Allocation::from_assignment(pilot_of, sp.s);

    const ArrayGeometry arr{sp.mx, sp.my, 1.0, 1.0};
    std::vector<CVec> steering;
    std::vector<double> betas;
    const auto grid_angles = dft_angles(sp.mx, sp.my);
    for (int k = 0; k < sp.k; ++k) {
        SpaceAngle xi;
        if (sp.dft_angles) {
            // users on one pilot take distinct grid beams
            xi = grid_angles[static_cast<std::size_t>((k * 7 + 3) % static_cast<int>(grid_angles.size()))];
        } else {
            xi = sample_space_angle(rng, 0.5);
        }
        steering.push_back(array_response(arr, xi));
        betas.push_back(1.0 + (sp.beta_spread - 1.0) * uniform01(rng));
    }
    return make_problem(grid, pilots, alloc, steering, betas, exp_pdp_on_grid(grid, sp.decay), sp.p_tx, sp.sigma2);
}

// Channel realization drawn from the estimator's own prior (on-grid taps).
struct Realization {
    std::vector<CVec> d_t;
    std::vector<CVec> d_p;
    CMat derotated;
    RxPilotSignal rx;
};

inline Realization draw(const EstimationProblem &p, Rng &rng, bool noise = true)
{
    Realization r;
    for (int k = 0; k < p.k(); ++k) {
        CVec a(p.grid.nd);
        for (int l = 0; l < p.grid.nd; ++l)
            a[l] = complex_gaussian(rng, p.omega(k)[l]);
        r.d_t.push_back(a);
        r.d_p.push_back(fs_apply(p.grid, 0, a));
    }
    CMat y = received_signal(p.steering, r.d_p, p.pilots, p.alloc, p.p_tx);
    if (noise)
        y += sample_noise(rng, p.m(), p.grid.np, p.sigma2);
    r.rx = make_rx(p.pilots, std::move(y));
    r.derotated = r.rx.derotated;
    return r;
}

} // namespace scenarios
