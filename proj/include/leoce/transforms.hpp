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

// Fast products with F_s, the np x nd block of the npe-point DFT whose
// entries are exp(-j 2 pi (rp + n)(phi + l) / npe). F_0 is the partial DFT
// that maps tap gains to the pilot-band response.

#include "leoce/channel.hpp"
#include "leoce/common.hpp"
#include "leoce/fft.hpp"

namespace leoce {

// Scatter a pilot-band vector onto its subcarriers (rp + n) mod npe.
inline CVec pad_pilot_band(const DelayGrid &grid, const CVec &z)
{
    if (z.size() != grid.np)
        throw DimensionError("pad_pilot_band: vector length differs from np");
    CVec buf = CVec::Zero(grid.npe);
    for (int n = 0; n < grid.np; ++n)
        buf[(grid.rp + n) % grid.npe] = z[n];
    return buf;
}

// npe-point inverse transform (1/npe scaled) of the padded vector, taps phi..phi+nd-1.
inline CVec windowed_ifft(const DelayGrid &grid, int phi, const CVec &z)
{
    const CVec t = ifft(pad_pilot_band(grid, z));
    CVec out(grid.nd);
    for (int l = 0; l < grid.nd; ++l)
        out[l] = t[(phi + l) % grid.npe];
    return out;
}

// F_s^H z = npe * windowed_ifft.
inline CVec fs_adjoint(const DelayGrid &grid, int phi, const CVec &z)
{
    return static_cast<double>(grid.npe) * windowed_ifft(grid, phi, z);
}

// F_s d.
inline CVec fs_apply(const DelayGrid &grid, int phi, const CVec &d)
{
    if (d.size() != grid.nd)
        throw DimensionError("fs_apply: vector length differs from nd");
    CVec buf = CVec::Zero(grid.npe);
    for (int l = 0; l < grid.nd; ++l)
        buf[(phi + l) % grid.npe] += d[l];
    const CVec spec = fft(buf);
    CVec out(grid.np);
    for (int n = 0; n < grid.np; ++n)
        out[n] = spec[(grid.rp + n) % grid.npe];
    return out;
}

// c[delta] = sum_n exp(-j 2 pi (rp + n) delta / npe); the Gram matrix of the
// F_s blocks is (F_a^H F_b)(l, l') = c[(phi_b + l' - phi_a - l) mod npe].
inline CVec pilot_band_kernel(const DelayGrid &grid)
{
    CVec ind = CVec::Zero(grid.npe);
    for (int n = 0; n < grid.np; ++n)
        ind[(grid.rp + n) % grid.npe] = 1.0;
    return fft(ind);
}

} // namespace leoce
