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

// Ground-truth channel synthesis and the angle-delay representation:
// UPA steering vectors, the refined delay grid, path sampling, the true
// pilot-subcarrier response and its on-grid projection.

#include "leoce/common.hpp"
#include "leoce/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace leoce {

struct ArrayGeometry {
    int mx = 8;
    int my = 8;
    double dx_wl = 1.0;
    double dy_wl = 1.0;

    int m() const { return mx * my; }
};

struct OFDMGrid {
    int nc = 512;
    int np = 128;
    int rp = 0;
    int ng = 36;
    double delta_f = 60e3; // Hz

    double ts() const { return 1.0 / (static_cast<double>(nc) * delta_f); }
    double tg() const { return static_cast<double>(ng) * ts(); }

    void validate() const
    {
        if (nc <= 0 || np <= 0 || rp < 0 || ng <= 0 || !(delta_f > 0.0))
            throw ParameterError("OFDMGrid: sizes and spacing must be positive");
        if (rp + np > nc)
            throw ParameterError("OFDMGrid: pilot band rp + np exceeds nc");
        if (ng >= nc)
            throw ParameterError("OFDMGrid: cyclic prefix must be shorter than the symbol");
    }
};

// Refined delay grid. Carries the pilot-band parameters it was built from so
// that the transforms below need nothing else.
struct DelayGrid {
    int mu_d = 1;
    int ld = 0;  // base grid size ceil(np*ng/nc)
    int nd = 0;  // mu_d * ld
    int npe = 0; // mu_d * np
    int np = 0;
    int rp = 0;
    double delta_f = 0.0;
    double tg = 0.0;
    std::vector<double> tau; // nd grid delays, tau[l] = l / (npe * delta_f)

    double tau_at(int l) const { return static_cast<double>(l) / (static_cast<double>(npe) * delta_f); }

    // Delay interval owned by tap l, clipped to the cyclic prefix. Empty
    // when the grid extends beyond tg and the tap starts past it.
    std::pair<double, double> interval(int l) const { return {tau_at(l), std::min(tau_at(l + 1), tg)}; }
};

inline DelayGrid delay_grid(const OFDMGrid &ofdm, int mu_d)
{
    ofdm.validate();
    if (mu_d < 1)
        throw DomainError("delay_grid: refining factor must be a positive integer");
    DelayGrid g;
    g.mu_d = mu_d;
    const long num = static_cast<long>(ofdm.np) * ofdm.ng;
    g.ld = static_cast<int>((num + ofdm.nc - 1) / ofdm.nc);
    g.nd = mu_d * g.ld;
    g.npe = mu_d * ofdm.np;
    g.np = ofdm.np;
    g.rp = ofdm.rp;
    g.delta_f = ofdm.delta_f;
    g.tg = ofdm.tg();
    g.tau.resize(static_cast<std::size_t>(g.nd));
    for (int l = 0; l < g.nd; ++l)
        g.tau[static_cast<std::size_t>(l)] = g.tau_at(l);
    return g;
}

// ----- power delay profile ------------------------------------------------

struct PDP {
    RVec gamma;

    int size() const { return static_cast<int>(gamma.size()); }

    // Mean over the active taps, the lower end of the combiner bracket.
    double active_mean(double rel_threshold = 1e-6) const
    {
        const double thr = rel_threshold * gamma.maxCoeff();
        int n = 0;
        double s = 0.0;
        for (Eigen::Index l = 0; l < gamma.size(); ++l)
            if (gamma[l] >= thr && gamma[l] > 0.0) {
                s += gamma[l];
                ++n;
            }
        return s / n;
    }
};

inline PDP normalized_pdp(RVec gamma)
{
    if (gamma.size() == 0 || (gamma.array() < 0.0).any())
        throw DomainError("PDP: taps must be nonnegative and non-empty");
    const double s = gamma.sum();
    if (!(s > 0.0))
        throw DomainError("PDP: total power must be positive");
    return {gamma / s};
}

// gamma_l proportional to exp(-l / decay_taps), l = 0..nd-1.
inline PDP exp_pdp(int nd, double decay_taps)
{
    if (nd < 1 || !(decay_taps > 0.0))
        throw DomainError("exp_pdp: need nd >= 1 and decay_taps > 0");
    RVec g(nd);
    for (int l = 0; l < nd; ++l)
        g[l] = std::exp(-static_cast<double>(l) / decay_taps);
    return normalized_pdp(g);
}

// Exponential profile with the decay given in base-resolution taps. Summing
// the fine taps of a refined grid reproduces the coarser profile exactly.
inline PDP exp_pdp_on_grid(const DelayGrid &grid, double decay_base_taps)
{
    return exp_pdp(grid.nd, decay_base_taps * grid.mu_d);
}

// omega_l = beta * gamma_l, the diagonal of the tap correlation matrix.
inline RVec build_rt(double beta, const PDP &pdp) { return beta * pdp.gamma; }

// ----- array response -----------------------------------------------------

inline CVec ula_response(int n, double spacing_wl, double x)
{
    CVec a(n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        const double ph = -2.0 * kPi * spacing_wl * m * x;
        a[m] = cplx(s * std::cos(ph), s * std::sin(ph));
    }
    return a;
}

// g = a_mx(xi_x) kron a_my(xi_y), unit norm.
inline CVec array_response(const ArrayGeometry &geom, const SpaceAngle &xi)
{
    if (geom.mx < 1 || geom.my < 1)
        throw ParameterError("array_response: antenna counts must be positive");
    const CVec ax = ula_response(geom.mx, geom.dx_wl, xi.x);
    const CVec ay = ula_response(geom.my, geom.dy_wl, xi.y);
    CVec g(geom.m());
    for (int i = 0; i < geom.mx; ++i)
        g.segment(i * geom.my, geom.my) = ax[i] * ay;
    return g;
}

// |sin(pi x) / sin(pi x / n)|, with the removable singularities filled in.
inline double dirichlet_kernel(double x, int n)
{
    const double xr = std::round(x);
    if (std::abs(x - xr) < 1e-12) {
        const long k = static_cast<long>(xr);
        return (k % n == 0) ? static_cast<double>(n) : 0.0;
    }
    return std::abs(std::sin(kPi * x) / std::sin(kPi * x / n));
}

// ----- paths --------------------------------------------------------------

struct PathSet {
    std::vector<cplx> gains;
    std::vector<double> delays; // seconds, within [0, tg)

    std::size_t size() const { return gains.size(); }
};

struct PathOptions {
    int q_per_tap = 1;
    bool on_grid = false;           // place every path at its tap's grid delay
    double activity_threshold = 1e-6; // relative to max(gamma)
};

// Paths for one user on `grid`: q paths per active tap, delays uniform inside
// the tap interval, gains i.i.d. circular Gaussian with per-tap power beta*gamma_l.
inline PathSet sample_paths(Rng &rng, const PDP &pdp, const DelayGrid &grid, double beta, const PathOptions &opt)
{
    if (opt.q_per_tap < 1)
        throw DomainError("sample_paths: q_per_tap must be at least 1");
    if (pdp.size() != grid.nd)
        throw DimensionError("sample_paths: PDP length differs from the grid size");

    PathSet ps;
    const double thr = opt.activity_threshold * pdp.gamma.maxCoeff();
    const double var = beta / static_cast<double>(opt.q_per_tap);
    for (int l = 0; l < grid.nd; ++l) {
        const double gl = pdp.gamma[l];
        if (gl < thr || gl <= 0.0)
            continue;
        const auto [lo, hi] = grid.interval(l);
        if (!(hi > lo))
            continue;
        for (int q = 0; q < opt.q_per_tap; ++q) {
            const double t = opt.on_grid ? lo : lo + (hi - lo) * uniform01(rng);
            ps.delays.push_back(t);
            ps.gains.push_back(complex_gaussian(rng, var * gl));
        }
    }
    return ps;
}

inline PathSet sample_paths(Rng &rng, const PDP &pdp, const DelayGrid &grid, double beta, int q_per_tap)
{
    PathOptions opt;
    opt.q_per_tap = q_per_tap;
    return sample_paths(rng, pdp, grid, beta, opt);
}

// d_p[n] = sum_q a_q exp(-j 2 pi (rp + n) delta_f tau_q).
inline CVec true_dp(const PathSet &paths, const DelayGrid &grid)
{
    CVec d = CVec::Zero(grid.np);
    for (std::size_t q = 0; q < paths.size(); ++q) {
        const double u = grid.delta_f * paths.delays[q];
        for (int n = 0; n < grid.np; ++n) {
            double cyc = static_cast<double>(grid.rp + n) * u;
            cyc -= std::floor(cyc);
            const double ph = -2.0 * kPi * cyc;
            d[n] += paths.gains[q] * cplx(std::cos(ph), std::sin(ph));
        }
    }
    return d;
}

inline int tap_of_delay(double delay, const DelayGrid &grid)
{
    const double u = delay * static_cast<double>(grid.npe) * grid.delta_f;
    const double r = std::round(u);
    const double idx = (std::abs(u - r) < 1e-9) ? r : std::floor(u);
    return static_cast<int>(idx);
}

// alpha_l = sum of path gains whose delay falls inside tap interval l.
inline CVec adc_project(const PathSet &paths, const DelayGrid &grid)
{
    CVec a = CVec::Zero(grid.nd);
    for (std::size_t q = 0; q < paths.size(); ++q) {
        const int l = tap_of_delay(paths.delays[q], grid);
        if (l < 0 || l >= grid.nd)
            throw DomainError("adc_project: path delay outside the delay grid");
        a[l] += paths.gains[q];
    }
    return a;
}

// Entry (n, l) = exp(-j 2 pi (rp + n)(phi + l) / npe): rows rp..rp+np-1 and
// columns phi..phi+nd-1 of the unnormalized npe-point DFT matrix.
inline CMat partial_dft(const DelayGrid &grid, int phi = 0)
{
    CMat f(grid.np, grid.nd);
    for (int l = 0; l < grid.nd; ++l)
        for (int n = 0; n < grid.np; ++n)
            f(n, l) = unit_phase(static_cast<std::int64_t>(grid.rp + n) * (phi + l), grid.npe);
    return f;
}

// ----- per-user ground truth ---------------------------------------------

struct UTChannel {
    SpaceAngle xi;
    double beta = 0.0;
    CVec g;       // steering vector, length M
    PathSet paths;
    CVec d_true;  // length np
    CVec d_adc;   // length nd on the estimation grid
    RVec omega;   // beta * gamma on the estimation grid
};

} // namespace leoce
