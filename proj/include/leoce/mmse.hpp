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

// Joint linear MMSE estimation of all users' tap gains, and its large-np
// asymptotic error.

#include "leoce/problem.hpp"

#include <Eigen/Cholesky>

namespace leoce {

// The joint estimator d = (R A^H A + s2 I)^{-1} R A^H y is evaluated in the
// Hermitian form R^{1/2} H^{-1} R^{1/2} A^H y with H = R^{1/2} A^H A R^{1/2} + s2 I,
// valid also for taps with zero power. A^H A is assembled block by block from
// the pilot-band kernel without forming the K*M*np measurement matrix.
class MmseEstimator : public Estimator {
public:
    static constexpr Eigen::Index kMaxDimension = 8192;

    explicit MmseEstimator(EstimationProblem problem) : p_(std::move(problem))
    {
        p_.validate();
        const int k = p_.k();
        const int nd = p_.grid.nd;
        const Eigen::Index n = static_cast<Eigen::Index>(k) * nd;
        if (n > kMaxDimension)
            throw ParameterError("MmseEstimator: joint dimension K*nd = " + std::to_string(n) +
                                 " exceeds the dense limit " + std::to_string(kMaxDimension));

        RVec sq(n);
        for (int u = 0; u < k; ++u)
            sq.segment(static_cast<Eigen::Index>(u) * nd, nd) = p_.omega(u).cwiseSqrt();

        const CVec c = pilot_band_kernel(p_.grid);
        const int npe = p_.grid.npe;
        const double scale = p_.p_tx / p_.grid.np;
        CMat h(n, n);
        for (int a = 0; a < k; ++a)
            for (int b = a; b < k; ++b) {
                const cplx gab = scale * p_.g(a).dot(p_.g(b));
                const int dphi = p_.phase_of(b) - p_.phase_of(a);
                for (int l = 0; l < nd; ++l)
                    for (int lp = 0; lp < nd; ++lp) {
                        const int delta = ((dphi + lp - l) % npe + npe) % npe;
                        const Eigen::Index i = static_cast<Eigen::Index>(a) * nd + l;
                        const Eigen::Index j = static_cast<Eigen::Index>(b) * nd + lp;
                        const cplx v = gab * c[delta] * sq[i] * sq[j];
                        h(i, j) = v;
                        h(j, i) = std::conj(v);
                    }
            }
        for (Eigen::Index i = 0; i < n; ++i)
            h(i, i) = cplx(h(i, i).real() + p_.sigma2, 0.0);

        Eigen::LLT<CMat> llt(h);
        if (llt.info() != Eigen::Success)
            throw SingularityError("MmseEstimator: regularized Gram matrix is not positive definite");
        const CMat hinv = llt.solve(CMat::Identity(n, n));
        filter_ = sq.asDiagonal() * hinv * sq.asDiagonal();

        mse_.assign(static_cast<std::size_t>(k), 0.0);
        for (int u = 0; u < k; ++u)
            for (int l = 0; l < nd; ++l) {
                const Eigen::Index i = static_cast<Eigen::Index>(u) * nd + l;
                mse_[static_cast<std::size_t>(u)] += p_.sigma2 * sq[i] * sq[i] * hinv(i, i).real();
            }
    }

    std::string tag() const override { return "mmse"; }

    // A^H y, block k = sqrt(P/np) F_{s_k}^H (Y^T conj(g_k)).
    CVec matched_filter(const RxPilotSignal &rx) const
    {
        check_rx(p_, rx);
        const int nd = p_.grid.nd;
        const double amp = std::sqrt(p_.p_tx / p_.grid.np);
        CVec out(static_cast<Eigen::Index>(p_.k()) * nd);
        for (int u = 0; u < p_.k(); ++u) {
            const CVec z = rx.derotated.transpose() * p_.g(u).conjugate();
            out.segment(static_cast<Eigen::Index>(u) * nd, nd) = amp * fs_adjoint(p_.grid, p_.phase_of(u), z);
        }
        return out;
    }

    EstimateReport estimate(const RxPilotSignal &rx) const override
    {
        const CVec d = filter_ * matched_filter(rx);
        const int nd = p_.grid.nd;
        std::vector<CVec> dt;
        for (int u = 0; u < p_.k(); ++u)
            dt.push_back(d.segment(static_cast<Eigen::Index>(u) * nd, nd));
        return finish_report(tag(), p_.grid, std::move(dt), mse_);
    }

    // Analytic error trace((R A^H A / s2 + I)^{-1} R), split per UT.
    const std::vector<double> &per_ut_mse() const { return mse_; }
    double total_mse() const
    {
        double s = 0.0;
        for (double v : mse_)
            s += v;
        return s;
    }

    const EstimationProblem &problem() const { return p_; }

private:
    EstimationProblem p_;
    CMat filter_;
    std::vector<double> mse_;
};

struct AsymptoticJ {
    double j_asy = 0.0;
    double j_asy_min = 0.0;
};

// Large-np limit of the joint MMSE error. Taps decouple; users sharing a pilot
// couple through their steering Gram matrix C_s = G_s^H G_s at each tap.
inline AsymptoticJ asymptotic_J(const Allocation &alloc, const std::vector<RVec> &omegas,
                                const std::vector<CVec> &steering, double p_tx, double sigma2)
{
    alloc.validate(static_cast<int>(omegas.size()));
    if (steering.size() != omegas.size())
        throw DimensionError("asymptotic_J: omegas and steering differ in count");
    if (!(sigma2 > 0.0))
        throw ParameterError("asymptotic_J: noise variance must be positive");

    AsymptoticJ r;
    for (const auto &o : omegas)
        for (Eigen::Index l = 0; l < o.size(); ++l)
            r.j_asy_min += sigma2 * o[l] / (p_tx * o[l] + sigma2);

    const double snr = p_tx / sigma2;
    for (const auto &grp : alloc.groups) {
        const Eigen::Index ks = static_cast<Eigen::Index>(grp.size());
        if (ks == 0)
            continue;
        CMat c(ks, ks);
        for (Eigen::Index i = 0; i < ks; ++i)
            for (Eigen::Index j = 0; j < ks; ++j)
                c(i, j) = steering[static_cast<std::size_t>(grp[i])].dot(steering[static_cast<std::size_t>(grp[j])]);
        const Eigen::Index nd = omegas[static_cast<std::size_t>(grp[0])].size();
        for (Eigen::Index l = 0; l < nd; ++l) {
            RVec w(ks);
            for (Eigen::Index i = 0; i < ks; ++i)
                w[i] = omegas[static_cast<std::size_t>(grp[i])][l];
            // (snr * W C + I)^{-1} W == W^{1/2} (snr * W^{1/2} C W^{1/2} + I)^{-1} W^{1/2}
            const RVec s = w.cwiseSqrt();
            CMat h = snr * (s.asDiagonal() * c * s.asDiagonal());
            h.diagonal().array() += 1.0;
            const CMat hinv = h.llt().solve(CMat::Identity(ks, ks));
            for (Eigen::Index i = 0; i < ks; ++i)
                r.j_asy += w[i] * hinv(i, i).real();
        }
    }
    return r;
}

} // namespace leoce
