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

// Two-stage channel estimation. Stage one collapses the antenna dimension
// with one regularized combiner per user; stage two is a per-user Toeplitz
// MMSE filter across the pilot subcarriers, solved with Levinson and mapped
// back to taps with one inverse FFT.

#include "leoce/problem.hpp"
#include "leoce/toeplitz.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>

namespace leoce {

// Eigen-decomposition of P * G_s diag(beta) G_s^H for one pilot group, shared
// by every user of the group.
struct GroupSpectrum {
    RVec eigenvalues;
    CMat eigenvectors;
};

inline GroupSpectrum group_spectrum(const EstimationProblem &p, int s)
{
    CMat q = CMat::Zero(p.m(), p.m());
    for (int i : p.alloc.groups[static_cast<std::size_t>(s)])
        q.noalias() += (p.p_tx * p.betas[static_cast<std::size_t>(i)]) * p.g(i) * p.g(i).adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(q);
    if (es.info() != Eigen::Success)
        throw SingularityError("group_spectrum: eigen-decomposition failed");
    return {es.eigenvalues().cwiseMax(0.0), es.eigenvectors()};
}

// Combiner w(v) = (Q + v I)^{-1} g expressed in the eigenbasis of Q, with the
// scalar functionals the regularizer equation needs.
class CombinerModel {
public:
    CombinerModel(const GroupSpectrum &spec, const CVec &g, const RVec &gamma, double sigma2)
        : lam_(spec.eigenvalues), u_(&spec.eigenvectors), c_(spec.eigenvectors.adjoint() * g), gamma_(gamma),
          sigma2_(sigma2)
    {
        c2_ = c_.cwiseAbs2();
        double s = 0.0;
        int n = 0;
        for (Eigen::Index l = 0; l < gamma_.size(); ++l)
            if (gamma_[l] > 0.0) {
                s += gamma_[l];
                ++n;
            }
        gamma_bar_ = s / n;
    }

    double lower() const { return sigma2_; }
    double upper() const { return sigma2_ / gamma_bar_; }
    double gamma_bar() const { return gamma_bar_; }

    // G(v) = w^H Q w and W(v) = ||w||^2.
    std::pair<double, double> gains(double v) const
    {
        double gk = 0.0, wk = 0.0;
        for (Eigen::Index i = 0; i < lam_.size(); ++i) {
            const double d = lam_[i] + v;
            const double a = c2_[i] / (d * d);
            gk += lam_[i] * a;
            wk += a;
        }
        return {gk, wk};
    }

    // F(v) = s2 (sum g^2 / A^2) / (sum g^3 / A^2) - v, A_l = G gamma_l + s2 W.
    double residual(double v) const
    {
        const auto [gk, wk] = gains(v);
        double num = 0.0, den = 0.0;
        for (Eigen::Index l = 0; l < gamma_.size(); ++l) {
            const double g = gamma_[l];
            if (g <= 0.0)
                continue;
            const double a = gk * g + sigma2_ * wk;
            const double a2 = a * a;
            num += g * g / a2;
            den += g * g * g / a2;
        }
        return sigma2_ * num / den - v;
    }

    CVec combiner(double v) const
    {
        return (*u_) * (c_.array() / (lam_.array() + v)).matrix();
    }

private:
    RVec lam_;
    const CMat *u_;
    CVec c_;
    RVec c2_;
    RVec gamma_;
    double sigma2_;
    double gamma_bar_ = 1.0;
};

struct RegularizerSolution {
    double v = 0.0;
    int iterations = 0;
    bool bisection_fallback = false;
};

inline double bisect_root(const std::function<double(double)> &f, double lo, double hi, int max_iter = 200)
{
    double flo = f(lo);
    if (flo <= 0.0)
        return lo;
    if (f(hi) >= 0.0)
        return hi;
    for (int i = 0; i < max_iter && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Newton on F with a central-difference slope, started mid-bracket and kept
// inside [s2, s2 / mean(gamma)]. Falls back to bisection when Newton stalls.
inline RegularizerSolution solve_regularizer(const CombinerModel &model, double sigma2, int max_iter = 50)
{
    RegularizerSolution sol;
    const double lo = model.lower();
    const double hi = model.upper();
    if (!(hi > lo * (1.0 + 1e-15))) {
        sol.v = lo;
        return sol;
    }
    const auto f = [&](double v) { return model.residual(v); };
    const double h = 1e-4 * sigma2;
    double v = 0.5 * (lo + hi);
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        sol.iterations = it;
        const double fv = f(v);
        if (std::abs(fv) < 1e-10 * sigma2) {
            converged = true;
            break;
        }
        const double slope = (f(v + h) - f(v - h)) / (2.0 * h);
        if (!std::isfinite(slope) || slope == 0.0)
            break;
        const double next = std::clamp(v - fv / slope, lo, hi);
        const double step = std::abs(next - v);
        v = next;
        if (step < 1e-10 * v) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        sol.bisection_fallback = true;
        v = bisect_root(f, lo, hi);
    }
    sol.v = std::clamp(v, lo, hi);
    return sol;
}

struct SpaceCombiner {
    CVec w;
    RegularizerSolution regularizer;
};

// Combiner of UT k on its own: w = (P G_s diag(beta) G_s^H + v I)^{-1} g_k with
// v solving the regularizer equation for the common profile.
inline SpaceCombiner space_combiner(int k, const EstimationProblem &p)
{
    if (!(p.sigma2 > 0.0))
        throw ParameterError("space_combiner: noise variance must be positive");
    const GroupSpectrum spec = group_spectrum(p, p.alloc.pilot_of[static_cast<std::size_t>(k)]);
    const CombinerModel model(spec, p.g(k), p.pdp.gamma, p.sigma2);
    SpaceCombiner out;
    out.regularizer = solve_regularizer(model, p.sigma2);
    out.w = model.combiner(out.regularizer.v);
    return out;
}

// Spectral mask whose pilot-band Toeplitz section is the covariance of
// y_w = Y^T conj(w): in window s, (P/np) (sum_{i in K_s} beta_i |w^H g_i|^2) gamma,
// plus s2 ||w||^2 / npe on every bin.
inline RVec spectral_mask(const EstimationProblem &p, const CVec &w)
{
    const DelayGrid &grid = p.grid;
    RVec lambda = RVec::Constant(grid.npe, p.sigma2 * w.squaredNorm() / grid.npe);
    for (int s = 0; s < p.alloc.s_count(); ++s) {
        double leak = 0.0;
        for (int i : p.alloc.groups[static_cast<std::size_t>(s)])
            leak += p.betas[static_cast<std::size_t>(i)] * std::norm(w.dot(p.g(i)));
        const double a = p.p_tx / grid.np * leak;
        const int phi = p.pilots.phases[static_cast<std::size_t>(s)];
        for (int l = 0; l < grid.nd; ++l)
            lambda[(phi + l) % grid.npe] += a * p.pdp.gamma[l];
    }
    return lambda;
}

// MSE of the two-stage estimate of UT k for an arbitrary combiner w:
// trace(R_k) - (P/np)|w^H g_k|^2 sum_l omega_l^2 [F_s^H T^{-1} F_s]_ll.
inline double two_stage_mse(const EstimationProblem &p, int k, const CVec &w, const HermitianToeplitz &t)
{
    const RVec &omega = p.omega(k);
    const CMat fs = partial_dft(p.grid, p.phase_of(k));
    double red = 0.0;
    for (int l = 0; l < p.grid.nd; ++l) {
        if (omega[l] == 0.0)
            continue;
        const CVec col = fs.col(l);
        red += omega[l] * omega[l] * col.dot(levinson_solve(t, col)).real();
    }
    return omega.sum() - p.p_tx / p.grid.np * std::norm(w.dot(p.g(k))) * red;
}

inline double two_stage_mse(const EstimationProblem &p, int k, const CVec &w)
{
    return two_stage_mse(p, k, w, toeplitz_from_spectrum(spectral_mask(p, w), p.grid.np));
}

struct TsceUserState {
    CVec w;
    double v = 0.0;
    bool bisection_fallback = false;
    cplx g_inner;          // w^H g_k
    RVec lambda;           // spectral mask, length npe
    HermitianToeplitz toeplitz;
    cplx c_scale;          // sqrt(P np) mu_d g^H w
    double j_wk = 0.0;     // analytic MSE of this user's two-stage estimate
    double j_wk_asy = 0.0; // its large-np limit
};

struct TsceOptions {
    bool analytic_mse = true;
};

class TsceEstimator : public Estimator {
public:
    explicit TsceEstimator(EstimationProblem problem, TsceOptions opt = {}) : p_(std::move(problem))
    {
        p_.validate();
        check_windows();
        std::vector<GroupSpectrum> spectra;
        for (int s = 0; s < p_.alloc.s_count(); ++s)
            spectra.push_back(group_spectrum(p_, s));
        for (int k = 0; k < p_.k(); ++k)
            users_.push_back(build_user(k, spectra[static_cast<std::size_t>(p_.alloc.pilot_of[static_cast<std::size_t>(k)])], opt));
    }

    std::string tag() const override { return "tsce"; }

    const TsceUserState &user(int k) const { return users_[static_cast<std::size_t>(k)]; }
    const EstimationProblem &problem() const { return p_; }

    // y_{w,k} = Y^T conj(w_k), Levinson solve against T_{w,k}, then
    // d_k = C_k R_k window_{s_k}(ifft(pad(x))).
    EstimateReport estimate(const RxPilotSignal &rx) const override
    {
        check_rx(p_, rx);
        std::vector<CVec> dt;
        std::vector<double> mse;
        for (int k = 0; k < p_.k(); ++k) {
            const auto &u = users_[static_cast<std::size_t>(k)];
            const CVec yw = rx.derotated.transpose() * u.w.conjugate();
            const CVec x = levinson_solve(u.toeplitz, yw);
            const CVec win = windowed_ifft(p_.grid, p_.phase_of(k), x);
            dt.push_back(u.c_scale * p_.omega(k).cast<cplx>().cwiseProduct(win));
            mse.push_back(u.j_wk);
        }
        return finish_report(tag(), p_.grid, std::move(dt), std::move(mse));
    }

private:
    void check_windows() const
    {
        std::vector<int> owner(static_cast<std::size_t>(p_.grid.npe), -1);
        for (int s = 0; s < p_.pilots.s_count; ++s)
            for (int l = 0; l < p_.grid.nd; ++l) {
                auto &o = owner[static_cast<std::size_t>((p_.pilots.phases[static_cast<std::size_t>(s)] + l) % p_.grid.npe)];
                if (o >= 0)
                    throw ConfigError("TsceEstimator: pilot tap windows overlap");
                o = s;
            }
    }

    TsceUserState build_user(int k, const GroupSpectrum &spec, const TsceOptions &opt) const
    {
        const DelayGrid &grid = p_.grid;
        const RVec &gamma = p_.pdp.gamma;
        TsceUserState u;

        const CombinerModel model(spec, p_.g(k), gamma, p_.sigma2);
        const RegularizerSolution sol = solve_regularizer(model, p_.sigma2);
        u.v = sol.v;
        u.bisection_fallback = sol.bisection_fallback;
        u.w = model.combiner(u.v);
        u.g_inner = u.w.dot(p_.g(k));
        u.c_scale = std::sqrt(p_.p_tx * grid.np) * static_cast<double>(grid.mu_d) * std::conj(u.g_inner);

        u.lambda = spectral_mask(p_, u.w);
        u.toeplitz = toeplitz_from_spectrum(u.lambda, grid.np);

        const double beta = p_.betas[static_cast<std::size_t>(k)];
        const double gi2 = std::norm(u.g_inner);
        const auto [gk, wk] = model.gains(u.v);
        double acc = 0.0;
        for (int l = 0; l < grid.nd; ++l)
            if (gamma[l] > 0.0)
                acc += gamma[l] * gamma[l] / (gk * gamma[l] + p_.sigma2 * wk);
        u.j_wk_asy = beta - p_.p_tx * beta * beta * gi2 * acc;

        if (opt.analytic_mse)
            u.j_wk = two_stage_mse(p_, k, u.w, u.toeplitz);
        return u;
    }

    EstimationProblem p_;
    std::vector<TsceUserState> users_;
};

} // namespace leoce
