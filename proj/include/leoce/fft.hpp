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

// Thin wrapper over Eigen's bundled FFT (kissfft backend, any length).
//
// Conventions (unnormalized forward, normalized inverse):
//   fft(x)[m]  = sum_n x[n] exp(-j 2 pi m n / N)
//   ifft(X)[n] = (1/N) sum_m X[m] exp(+j 2 pi n m / N)

#include "leoce/common.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace leoce {

namespace detail {
inline Eigen::FFT<double> &fft_engine()
{
    // kissfft caches twiddles per size; one engine per thread.
    thread_local Eigen::FFT<double> engine;
    return engine;
}
} // namespace detail

inline CVec fft(const CVec &x)
{
    if (x.size() <= 1) // kissfft does not handle length 1
        return x;
    std::vector<cplx> in(x.data(), x.data() + x.size()), out;
    detail::fft_engine().fwd(out, in);
    return Eigen::Map<CVec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

inline CVec ifft(const CVec &x)
{
    if (x.size() <= 1)
        return x;
    std::vector<cplx> in(x.data(), x.data() + x.size()), out;
    detail::fft_engine().inv(out, in);
    return Eigen::Map<CVec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

// Real input, full complex spectrum.
inline CVec fft(const RVec &x)
{
    return fft(CVec(x.cast<cplx>()));
}

} // namespace leoce
