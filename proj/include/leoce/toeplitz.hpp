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

// Hermitian Toeplitz matrices built from a spectral mask, and the normalized
// Levinson recursion that solves them in O(n^2).

#include "leoce/common.hpp"
#include "leoce/fft.hpp"

#include <cstdint>
#include <vector>

namespace leoce {

// T(m, k) = t[m - k] for m >= k and conj(t[k - m]) otherwise.
struct HermitianToeplitz {
    CVec t;

    int n() const { return static_cast<int>(t.size()); }

    cplx operator()(int m, int k) const { return m >= k ? t[m - k] : std::conj(t[k - m]); }

    CMat dense() const
    {
        CMat a(n(), n());
        for (int m = 0; m < n(); ++m)
            for (int k = 0; k < n(); ++k)
                a(m, k) = (*this)(m, k);
        return a;
    }

    CVec multiply(const CVec &x) const
    {
        if (x.size() != t.size())
            throw DimensionError("HermitianToeplitz::multiply: size mismatch");
        CVec y = CVec::Zero(n());
        for (int m = 0; m < n(); ++m) {
            cplx acc = 0.0;
            for (int k = 0; k < n(); ++k)
                acc += (*this)(m, k) * x[k];
            y[m] = acc;
        }
        return y;
    }
};

// t[m] = sum_n lambda[n] exp(-j 2 pi m n / N), m = 0..np-1, i.e. the first np
// outputs of one forward transform of the mask.
inline HermitianToeplitz toeplitz_from_spectrum(const RVec &lambda, int np)
{
    const Eigen::Index n = lambda.size();
    if (np < 1 || np > n)
        throw DimensionError("toeplitz_from_spectrum: need 1 <= np <= mask length");
    if ((lambda.array() < 0.0).any())
        throw DomainError("toeplitz_from_spectrum: spectral mask must be nonnegative");
    if (!(lambda.sum() > 0.0))
        throw SingularityError("toeplitz_from_spectrum: spectral mask is identically zero");
    const CVec spec = fft(lambda);
    HermitianToeplitz T;
    T.t = spec.head(np);
    T.t[0] = cplx(lambda.sum(), 0.0);
    return T;
}

struct LevinsonTrace {
    std::uint64_t multiplications = 0; // complex multiply count
    std::vector<cplx> reflections;     // alpha_1 .. alpha_{n-1}
    CVec yule_walker;                  // last computed y_m (solves L_m y = -r_m)
};

// Solves T s = b. T is normalized to L = T / t[0] with first column
// (1, rho_1, ..., rho_{n-1}); the solution x of L x = b is grown one order at a
// time alongside the Yule-Walker vector y (L_m y_m = -r_m), and s = x / t[0].
inline CVec levinson_solve(const HermitianToeplitz &T, const CVec &b, LevinsonTrace *trace = nullptr)
{
    const int n = T.n();
    if (n < 1 || b.size() != n)
        throw DimensionError("levinson_solve: right-hand side length differs from the matrix order");
    const double t0 = T.t[0].real();
    if (!(t0 > 0.0) || std::abs(T.t[0].imag()) > 1e-12 * std::abs(t0))
        throw NotPositiveDefiniteError(0, 0.0);

    constexpr double kBreakdown = 1.0 - 1e-14;
    const CVec rho = T.t / t0;
    std::uint64_t mults = 0;

    CVec x(n), y(n);
    x[0] = b[0];
    if (trace)
        trace->reflections.clear();

    double zeta = 1.0;
    cplx alpha = 0.0;
    if (n > 1) {
        alpha = -rho[1];
        if (std::abs(alpha) >= kBreakdown)
            throw NotPositiveDefiniteError(1, std::abs(alpha));
        y[0] = alpha;
        if (trace)
            trace->reflections.push_back(alpha);
    }

    for (int m = 1; m < n; ++m) {
        // x_{m+1} from x_m, y_m
        zeta *= (1.0 - std::norm(alpha));
        cplx acc = 0.0;
        for (int i = 0; i < m; ++i)
            acc += rho[i + 1] * x[m - 1 - i];
        const cplx mu = (b[m] - acc) / zeta;
        for (int i = 0; i < m; ++i)
            x[i] += mu * std::conj(y[m - 1 - i]);
        x[m] = mu;
        mults += 2u * static_cast<std::uint64_t>(m) + 1u;

        if (m > n - 2)
            break;

        // y_{m+1} from y_m
        cplx accy = 0.0;
        for (int i = 0; i < m; ++i)
            accy += rho[i + 1] * y[m - 1 - i];
        alpha = -(rho[m + 1] + accy) / zeta;
        if (std::abs(alpha) >= kBreakdown)
            throw NotPositiveDefiniteError(static_cast<std::size_t>(m + 1), std::abs(alpha));
        for (int i = 0, j = m - 1; i <= j; ++i, --j) {
            const cplx yi = y[i], yj = y[j];
            y[i] = yi + alpha * std::conj(yj);
            if (i != j)
                y[j] = yj + alpha * std::conj(yi);
        }
        y[m] = alpha;
        mults += 2u * static_cast<std::uint64_t>(m) + 1u;
        if (trace)
            trace->reflections.push_back(alpha);
    }

    if (trace) {
        trace->multiplications = mults + static_cast<std::uint64_t>(n);
        trace->yule_walker = y.head(n > 1 ? n - 1 : 0);
    }
    return x / t0;
}

} // namespace leoce
