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

// Closed-form separable estimators that the MMSE solution reduces to at the
// two SNR extremes: a matched filter at low SNR and per-group zero forcing
// followed by tap-support masking at high SNR.

#include "leoce/problem.hpp"

namespace leoce {

// d_k = (sqrt(P/np) / s2) R_k F_{s_k}^H (Y^T conj(g_k)).
class LowSnrReference : public Estimator {
public:
    explicit LowSnrReference(EstimationProblem problem) : p_(std::move(problem)) { p_.validate(); }

    std::string tag() const override { return "low_snr_ref"; }

    EstimateReport estimate(const RxPilotSignal &rx) const override
    {
        check_rx(p_, rx);
        const double scale = std::sqrt(p_.p_tx / p_.grid.np) / p_.sigma2;
        std::vector<CVec> dt;
        for (int k = 0; k < p_.k(); ++k) {
            const CVec z = rx.derotated.transpose() * p_.g(k).conjugate();
            dt.push_back(scale * p_.omega(k).cast<cplx>().cwiseProduct(fs_adjoint(p_.grid, p_.phase_of(k), z)));
        }
        return finish_report(tag(), p_.grid, std::move(dt));
    }

private:
    EstimationProblem p_;
};

// d_k = (1 / sqrt(P np)) supp(gamma) F_{s_k}^H (Y^T conj(q_k)), with q_k the
// column of G_s C_s^{-1} belonging to UT k (zero forcing inside its group).
class HighSnrReference : public Estimator {
public:
    explicit HighSnrReference(EstimationProblem problem) : p_(std::move(problem))
    {
        p_.validate();
        q_.resize(static_cast<std::size_t>(p_.k()));
        for (const auto &grp : p_.alloc.groups) {
            const Eigen::Index ks = static_cast<Eigen::Index>(grp.size());
            if (ks == 0)
                continue;
            CMat g(p_.m(), ks);
            for (Eigen::Index i = 0; i < ks; ++i)
                g.col(i) = p_.g(grp[static_cast<std::size_t>(i)]);
            const CMat c = g.adjoint() * g;
            Eigen::FullPivLU<CMat> lu(c);
            lu.setThreshold(1e-10);
            if (!lu.isInvertible())
                throw SingularityError("HighSnrReference: co-pilot steering Gram matrix is singular");
            const CMat q = g * lu.inverse();
            for (Eigen::Index i = 0; i < ks; ++i)
                q_[static_cast<std::size_t>(grp[static_cast<std::size_t>(i)])] = q.col(i);
        }
        support_ = RVec::Zero(p_.grid.nd);
        for (int l = 0; l < p_.grid.nd; ++l)
            support_[l] = p_.pdp.gamma[l] > 0.0 ? 1.0 : 0.0;
    }

    std::string tag() const override { return "high_snr_ref"; }

    const CVec &zero_forcing_vector(int k) const { return q_[static_cast<std::size_t>(k)]; }

    EstimateReport estimate(const RxPilotSignal &rx) const override
    {
        check_rx(p_, rx);
        const double scale = 1.0 / std::sqrt(p_.p_tx * p_.grid.np);
        std::vector<CVec> dt;
        for (int k = 0; k < p_.k(); ++k) {
            const CVec z = rx.derotated.transpose() * q_[static_cast<std::size_t>(k)].conjugate();
            dt.push_back(scale * support_.cast<cplx>().cwiseProduct(fs_adjoint(p_.grid, p_.phase_of(k), z)));
        }
        return finish_report(tag(), p_.grid, std::move(dt));
    }

private:
    EstimationProblem p_;
    std::vector<CVec> q_;
    RVec support_;
};

} // namespace leoce
