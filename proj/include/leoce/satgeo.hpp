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

// Satellite to user-terminal geometry and the link budget.

#include "leoce/common.hpp"
#include "leoce/random.hpp"

#include <cmath>

namespace leoce {

struct OrbitParams {
    double earth_radius_km = 6378.0;
    double altitude_km = 1000.0;

    double orbit_radius_km() const { return earth_radius_km + altitude_km; }

    void validate() const
    {
        if (!(earth_radius_km > 0.0) || !(altitude_km > 0.0))
            throw ParameterError("OrbitParams: earth radius and altitude must be positive");
    }
};

struct UTGeometry {
    SpaceAngle xi;
    double nadir = 0.0;             // rad
    double elevation = 0.0;         // rad
    double slant_distance_km = 0.0; // km
};

struct LinkBudget {
    double tx_power_w = 1.0;
    double noise_temp_k = 290.0;
    double bandwidth_hz = 20e6;
    int num_subcarriers = 512;
    double sat_gain_dbi = 7.0;
    double ut_gain_dbi = 0.0;
    double iono_loss_db = 2.0;
    double carrier_hz = 2e9;

    void validate() const
    {
        if (!(tx_power_w > 0.0) || !(noise_temp_k > 0.0) || !(bandwidth_hz > 0.0) || num_subcarriers <= 0 ||
            !(carrier_hz > 0.0))
            throw ParameterError("LinkBudget: physical quantities must be strictly positive");
    }
};

// Uniform sample on the disc of radius sin(theta_max) in the space-angle plane.
// Polar inverse-CDF: r = sin(theta_max) * sqrt(u1), phase = 2 pi u2. Consumes
// exactly two uniforms per call.
inline SpaceAngle sample_space_angle(Rng &rng, double theta_max)
{
    if (!(theta_max > 0.0) || !(theta_max < kPi / 2.0))
        throw DomainError("sample_space_angle: theta_max must lie in (0, pi/2)");
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sin(theta_max) * std::sqrt(u1);
    const double ph = 2.0 * kPi * u2;
    return {r * std::cos(ph), r * std::sin(ph)};
}

inline UTGeometry ut_geometry(const SpaceAngle &xi, const OrbitParams &orbit)
{
    orbit.validate();
    const double r2 = xi.radius_sq();
    if (!(r2 < 1.0))
        throw DomainError("ut_geometry: space angle must lie strictly inside the unit disc");

    UTGeometry g;
    g.xi = xi;
    g.nadir = std::acos(std::sqrt(1.0 - r2));

    const double re = orbit.earth_radius_km;
    const double h = orbit.altitude_km;
    const double c = orbit.orbit_radius_km() / re * std::sin(g.nadir);
    if (c > 1.0)
        throw GeometryError("ut_geometry: user terminal is below the horizon");
    g.elevation = std::acos(c);

    const double se = std::sin(g.elevation);
    g.slant_distance_km = std::sqrt(re * re * se * se + h * h + 2.0 * h * re) - re * se;
    return g;
}

// sigma^2 = k_B T_n B / N_c, per-subcarrier noise power in watts.
inline double noise_variance(const LinkBudget &lb)
{
    lb.validate();
    return kBoltzmann * lb.noise_temp_k * lb.bandwidth_hz / static_cast<double>(lb.num_subcarriers);
}

inline double free_space_pathloss_db(double distance_km, double carrier_hz)
{
    return 20.0 * std::log10(4.0 * kPi * distance_km * 1e3 * carrier_hz / kSpeedOfLight);
}

inline double large_scale_beta(const UTGeometry &geom, const LinkBudget &lb, double shadow_db)
{
    if (!(geom.slant_distance_km > 0.0))
        throw DomainError("large_scale_beta: slant distance must be positive");
    const double fspl = free_space_pathloss_db(geom.slant_distance_km, lb.carrier_hz);
    return db_to_linear(lb.sat_gain_dbi + lb.ut_gain_dbi - fspl - lb.iono_loss_db - shadow_db);
}

} // namespace leoce
