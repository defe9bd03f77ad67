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

// Phase-shift pilots on a Zadoff-Chu base, the user interference graph and
// pilot allocation (greedy max-S-cut and a random baseline).

#include "leoce/channel.hpp"
#include "leoce/common.hpp"
#include "leoce/random.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace leoce {

inline CVec zadoff_chu(int np, int root)
{
    if (np < 1)
        throw ParameterError("zadoff_chu: length must be positive");
    if (std::gcd(root, np) != 1)
        throw ParameterError("zadoff_chu: root " + std::to_string(root) + " is not coprime with length " +
                             std::to_string(np));
    // exp(-j pi root k / np) == unit_phase(root * k, 2 np)
    const std::int64_t den = 2LL * np;
    const std::int64_t r = ((root % den) + den) % den;
    CVec x(np);
    for (std::int64_t n = 0; n < np; ++n) {
        const std::int64_t k = (np % 2 == 0) ? (n * n) % den : (n * (n + 1)) % den;
        x[n] = unit_phase(r * k, den);
    }
    return x;
}

struct PilotSet {
    int s_count = 0;
    std::vector<int> phases; // phi_s
    CVec base;               // unit-modulus base sequence, length np
    int npe = 0;
    int nd = 0;
    int np = 0;
    int rp = 0;

    // Per-subcarrier pilot symbol of pilot s: base[n] * exp(-j 2 pi phi_s (rp + n) / npe).
    CVec symbols(int s) const
    {
        CVec x(np);
        for (int n = 0; n < np; ++n)
            x[n] = base[n] * unit_phase(static_cast<std::int64_t>(phases[static_cast<std::size_t>(s)]) * (rp + n), npe);
        return x;
    }
};

inline int max_pilots(const DelayGrid &grid) { return grid.npe / grid.nd; }

inline PilotSet build_pilot_set(const DelayGrid &grid, int s_count, const CVec &base)
{
    if (s_count < 1)
        throw ParameterError("build_pilot_set: need at least one pilot");
    if (s_count > max_pilots(grid))
        throw CapacityError("build_pilot_set: " + std::to_string(s_count) + " pilots exceed the capacity " +
                            std::to_string(max_pilots(grid)) + " of the delay grid");
    if (base.size() != grid.np)
        throw DimensionError("build_pilot_set: base sequence length differs from np");
    if (((base.array().abs() - 1.0).abs() > 1e-12).any())
        throw ParameterError("build_pilot_set: base sequence must have unit modulus");

    PilotSet p;
    p.s_count = s_count;
    p.base = base;
    p.npe = grid.npe;
    p.nd = grid.nd;
    p.np = grid.np;
    p.rp = grid.rp;
    for (int s = 0; s < s_count; ++s)
        p.phases.push_back(s * grid.nd);
    return p;
}

// ----- allocation ---------------------------------------------------------

struct Allocation {
    std::vector<std::vector<int>> groups; // groups[s] = UTs sharing pilot s, ascending
    std::vector<int> pilot_of;            // pilot_of[k] = s

    int s_count() const { return static_cast<int>(groups.size()); }
    int k_count() const { return static_cast<int>(pilot_of.size()); }

    static Allocation from_assignment(const std::vector<int> &pilot_of, int s_count)
    {
        Allocation a;
        a.pilot_of = pilot_of;
        a.groups.assign(static_cast<std::size_t>(s_count), {});
        for (std::size_t k = 0; k < pilot_of.size(); ++k) {
            const int s = pilot_of[k];
            if (s < 0 || s >= s_count)
                throw ParameterError("Allocation: pilot index out of range");
            a.groups[static_cast<std::size_t>(s)].push_back(static_cast<int>(k));
        }
        return a;
    }

    void validate(int k_expected) const
    {
        if (k_count() != k_expected)
            throw DimensionError("Allocation: covers " + std::to_string(k_count()) + " UTs, expected " +
                                 std::to_string(k_expected));
        std::vector<int> seen(static_cast<std::size_t>(k_expected), 0);
        for (int s = 0; s < s_count(); ++s)
            for (int k : groups[static_cast<std::size_t>(s)]) {
                if (k < 0 || k >= k_expected || pilot_of[static_cast<std::size_t>(k)] != s)
                    throw ParameterError("Allocation: groups and pilot map disagree");
                ++seen[static_cast<std::size_t>(k)];
            }
        for (int c : seen)
            if (c != 1)
                throw ParameterError("Allocation: groups must partition the UTs");
    }
};

struct WeightGraph {
    RMat w;

    int size() const { return static_cast<int>(w.rows()); }
};

// W_ik = beta_i beta_k |g_i^H g_k|^2 with a zero diagonal.
inline WeightGraph weight_graph(const std::vector<double> &betas, const std::vector<CVec> &steering)
{
    if (betas.size() != steering.size())
        throw DimensionError("weight_graph: betas and steering vectors differ in count");
    const int k = static_cast<int>(betas.size());
    WeightGraph g;
    g.w = RMat::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double v = betas[static_cast<std::size_t>(i)] * betas[static_cast<std::size_t>(j)] *
                             std::norm(steering[static_cast<std::size_t>(i)].dot(steering[static_cast<std::size_t>(j)]));
            g.w(i, j) = v;
            g.w(j, i) = v;
        }
    return g;
}

inline double total_weight(const WeightGraph &g)
{
    return g.w.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().sum();
}

// Sum of edge weights with both ends inside the same group.
inline double intra_weight(const WeightGraph &g, const Allocation &a)
{
    double s = 0.0;
    for (const auto &grp : a.groups)
        for (std::size_t i = 0; i < grp.size(); ++i)
            for (std::size_t j = i + 1; j < grp.size(); ++j)
                s += g.w(grp[i], grp[j]);
    return s;
}

inline double cut_value(const WeightGraph &g, const Allocation &a)
{
    a.validate(g.size());
    double s = 0.0;
    for (int i = 0; i < g.size(); ++i)
        for (int j = i + 1; j < g.size(); ++j)
            if (a.pilot_of[static_cast<std::size_t>(i)] != a.pilot_of[static_cast<std::size_t>(j)])
                s += g.w(i, j);
    return s;
}

enum class GreedyOrder { index, beta_descending };

// Greedy max-S-cut. The first S UTs in visiting order seed one group each;
// every later UT joins the group minimising (intra-group weight + weight
// towards the group's members). Ties go to the smaller group, then to the
// smaller pilot index.
inline Allocation greedy_allocate(const WeightGraph &g, int s_count, GreedyOrder order = GreedyOrder::index,
                                  const std::vector<double> *betas = nullptr)
{
    const int k = g.size();
    if (s_count < 1 || k < s_count)
        throw ParameterError("greedy_allocate: need 1 <= S <= K (S = " + std::to_string(s_count) +
                             ", K = " + std::to_string(k) + ")");

    std::vector<int> visit(static_cast<std::size_t>(k));
    std::iota(visit.begin(), visit.end(), 0);
    if (order == GreedyOrder::beta_descending) {
        if (betas == nullptr || static_cast<int>(betas->size()) != k)
            throw ParameterError("greedy_allocate: beta ordering needs one beta per UT");
        std::stable_sort(visit.begin(), visit.end(),
                         [&](int a, int b) { return (*betas)[static_cast<std::size_t>(a)] > (*betas)[static_cast<std::size_t>(b)]; });
    }

    std::vector<int> pilot_of(static_cast<std::size_t>(k), -1);
    std::vector<double> intra(static_cast<std::size_t>(s_count), 0.0);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(s_count));
    for (int s = 0; s < s_count; ++s) {
        pilot_of[static_cast<std::size_t>(visit[static_cast<std::size_t>(s)])] = s;
        members[static_cast<std::size_t>(s)].push_back(visit[static_cast<std::size_t>(s)]);
    }

    for (int pos = s_count; pos < k; ++pos) {
        const int u = visit[static_cast<std::size_t>(pos)];
        int best = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        double best_link = 0.0;
        for (int s = 0; s < s_count; ++s) {
            double link = 0.0;
            for (int i : members[static_cast<std::size_t>(s)])
                link += g.w(i, u);
            const double cost = intra[static_cast<std::size_t>(s)] + link;
            const bool better = cost < best_cost ||
                                (cost == best_cost && members[static_cast<std::size_t>(s)].size() <
                                                          members[static_cast<std::size_t>(best)].size());
            if (better) {
                best = s;
                best_cost = cost;
                best_link = link;
            }
        }
        pilot_of[static_cast<std::size_t>(u)] = best;
        members[static_cast<std::size_t>(best)].push_back(u);
        intra[static_cast<std::size_t>(best)] += best_link;
    }
    return Allocation::from_assignment(pilot_of, s_count);
}

// Independent uniform assignment; empty groups are then filled by moving one
// UT out of the currently largest group (lowest pilot index on ties, its
// highest-index member moves).
inline Allocation random_allocate(Rng &rng, int k, int s_count)
{
    if (s_count < 1 || k < s_count)
        throw ParameterError("random_allocate: need 1 <= S <= K");
    std::uniform_int_distribution<int> pick(0, s_count - 1);
    std::vector<int> pilot_of(static_cast<std::size_t>(k));
    for (auto &p : pilot_of)
        p = pick(rng);

    Allocation a = Allocation::from_assignment(pilot_of, s_count);
    for (int s = 0; s < s_count; ++s) {
        if (!a.groups[static_cast<std::size_t>(s)].empty())
            continue;
        std::size_t largest = 0;
        for (std::size_t t = 1; t < a.groups.size(); ++t)
            if (a.groups[t].size() > a.groups[largest].size())
                largest = t;
        const int moved = a.groups[largest].back();
        a.groups[largest].pop_back();
        a.groups[static_cast<std::size_t>(s)].push_back(moved);
        a.pilot_of[static_cast<std::size_t>(moved)] = s;
    }
    return a;
}

} // namespace leoce
