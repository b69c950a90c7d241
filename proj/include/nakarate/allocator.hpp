// SPDX-License-Identifier: Apache-2.0
//
// nakarate: rate outage probability of OFDMA links over Nakagami-m channels
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


#ifndef NAKARATE_ALLOCATOR_HPP
#define NAKARATE_ALLOCATOR_HPP

// Outage-aware subcarrier allocation for a single-hop cell.
//
// Maximize sum_k sum_{n in C_k} b_sc log2(1 + p_n omega_kn / (n0 b_sc)) subject
// to every user's averaged-rate window probability being at least nu. The
// search is a deterministic heuristic:
//
//   1. greedy: every subcarrier goes to the user with the largest marginal
//      Shannon rate under an equal power split (ties: lowest user index);
//   2. repair: while some user misses its window, the most violating user
//      takes the subcarrier it values most from the user with the most slack
//      that can spare one, or hands one away when its mean rate overshoots
//      rho * r_min (at most N moves);
//   3. polish: steepest descent over single and paired reassignments, ranked
//      by total violation, then distance of each mean rate from its window,
//      then rate. It starts from the repaired plan, round robin, each user on
//      its strongest subcarrier alone, and fixed-seed random assignments;
//   4. power: equal split over assigned subcarriers, optionally water-filled.
//
// Feasibility is always re-checked on the final plan.

#include "nakarate/channel.hpp"
#include "nakarate/error.hpp"
#include "nakarate/ratestats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace nakarate::allocator {

using channel::AllocationSet;
using channel::SubcarrierChannel;

struct UserDemand {
    double r_min = 0.0;  // bits/s
    double rho = 1.0;
    double nu = 0.5;
    int T = 1;           // averaging window, frames

    void validate() const {
        nakarate::detail::require(r_min >= 0.0, "UserDemand: r_min must be >= 0");
        nakarate::detail::require(rho >= 1.0, "UserDemand: rho must be >= 1");
        nakarate::detail::require(nu > 0.0 && nu < 1.0, "UserDemand: nu must lie in (0, 1)");
        nakarate::detail::require(T >= 1, "UserDemand: T must be >= 1");
    }

    bool operator==(const UserDemand&) const = default;
};

/// Fading statistics of one (user, subcarrier) pair.
struct ChannelTemplate {
    double m = 1.0;
    double omega = 1.0;

    bool operator==(const ChannelTemplate&) const = default;
};

/// gains[k][n]: channel of user k on subcarrier n.
struct SubcarrierPool {
    std::vector<std::vector<ChannelTemplate>> gains;
    double n0 = 1.0;
    double b_sc = 1.0;

    std::size_t users() const { return gains.size(); }
    std::size_t subcarriers() const { return gains.empty() ? 0 : gains.front().size(); }

    void validate() const {
        nakarate::detail::require(!gains.empty(), "SubcarrierPool: at least one user is required");
        for (const auto& row : gains) {
            nakarate::detail::require(row.size() == subcarriers(),
                                      "SubcarrierPool: every user needs one template per subcarrier");
            for (const auto& g : row) {
                nakarate::detail::require(g.m > 0.0 && g.omega > 0.0,
                                          "SubcarrierPool: m and omega must be > 0");
            }
        }
        nakarate::detail::require(n0 > 0.0 && b_sc > 0.0, "SubcarrierPool: n0 and b_sc must be > 0");
    }

    bool operator==(const SubcarrierPool&) const = default;
};

struct AllocationPlan {
    std::vector<int> assignment;  // per subcarrier: user index, -1 when unassigned
    std::vector<double> powers;   // per subcarrier, watts
    double objective = 0.0;       // bits/s
    bool feasible = false;
    std::vector<double> slack;    // per user: constraint value - nu
};

struct AllocatorOptions {
    ratestats::AmcTable table = ratestats::ieee80216_table();
    bool water_filling = false;
    std::optional<long> t;  // evaluation frame; default 10 * T per user
};

inline double subcarrier_rate(const SubcarrierPool& pool, int user, std::size_t n, double p) {
    const double snr = p * pool.gains[static_cast<std::size_t>(user)][n].omega / (pool.n0 * pool.b_sc);
    return pool.b_sc * std::log1p(snr) / std::numbers::ln2;
}

/// Left-hand side of the window constraint for one user's allocation.
inline double evaluate_constraint(const UserDemand& user, const AllocationSet& alloc, long t,
                                  const ratestats::AmcTable& table = ratestats::ieee80216_table()) {
    user.validate();
    if (alloc.empty()) {
        return 0.0;
    }
    const ratestats::RatePmf pmf = ratestats::amc_pmf(alloc, table);
    return ratestats::window_probability(ratestats::avg_rate_stats(pmf, t, user.T), user.r_min, user.rho);
}

/// Channels of user k under the plan (zero-power subcarriers carry nothing).
inline AllocationSet user_allocation(const std::vector<int>& assignment, const std::vector<double>& powers,
                                     const SubcarrierPool& pool, int user) {
    std::vector<SubcarrierChannel> sc;
    for (std::size_t n = 0; n < assignment.size(); ++n) {
        if (assignment[n] == user && powers[n] > 0.0) {
            const ChannelTemplate& g = pool.gains[static_cast<std::size_t>(user)][n];
            sc.push_back({g.m, g.omega, powers[n], pool.n0, pool.b_sc});
        }
    }
    if (sc.empty()) {
        return {};
    }
    return AllocationSet(std::move(sc));
}

/// Recomputes the total Shannon rate from assignment and powers.
inline double plan_objective(const AllocationPlan& plan, const SubcarrierPool& pool) {
    double total = 0.0;
    for (std::size_t n = 0; n < plan.assignment.size(); ++n) {
        if (plan.assignment[n] >= 0 && n < plan.powers.size() && plan.powers[n] > 0.0) {
            total += subcarrier_rate(pool, plan.assignment[n], n, plan.powers[n]);
        }
    }
    return total;
}

/// Equal split of p_total over assigned subcarriers.
inline std::vector<double> equal_power(const std::vector<int>& assignment, double p_total) {
    const auto used = std::count_if(assignment.begin(), assignment.end(), [](int k) { return k >= 0; });
    std::vector<double> p(assignment.size(), 0.0);
    for (std::size_t n = 0; n < assignment.size(); ++n) {
        if (assignment[n] >= 0) {
            p[n] = p_total / static_cast<double>(used);
        }
    }
    return p;
}

/// Water-filling on the mean channel gains of the assigned subcarriers.
inline std::vector<double> water_fill(const std::vector<int>& assignment, const SubcarrierPool& pool,
                                      double p_total) {
    std::vector<std::pair<double, std::size_t>> floors;  // noise-to-gain level per subcarrier
    for (std::size_t n = 0; n < assignment.size(); ++n) {
        if (assignment[n] >= 0) {
            const double g = pool.gains[static_cast<std::size_t>(assignment[n])][n].omega;
            floors.emplace_back(pool.n0 * pool.b_sc / g, n);
        }
    }
    std::sort(floors.begin(), floors.end());
    std::vector<double> p(assignment.size(), 0.0);
    double level = 0.0;
    std::size_t active = floors.size();
    for (; active > 0; --active) {
        double sum = 0.0;
        for (std::size_t i = 0; i < active; ++i) {
            sum += floors[i].first;
        }
        level = (p_total + sum) / static_cast<double>(active);
        if (level > floors[active - 1].first) {
            break;
        }
    }
    for (std::size_t i = 0; i < active; ++i) {
        p[floors[i].second] = level - floors[i].first;
    }
    return p;
}

namespace detail {

inline long eval_frame(const UserDemand& u, const AllocatorOptions& opt) {
    return opt.t ? *opt.t : 10L * u.T;
}

inline std::vector<double> constraint_values(const std::vector<UserDemand>& users,
                                             const std::vector<int>& assignment,
                                             const std::vector<double>& powers,
                                             const SubcarrierPool& pool, const AllocatorOptions& opt) {
    std::vector<double> v(users.size(), 0.0);
    for (std::size_t k = 0; k < users.size(); ++k) {
        const AllocationSet alloc = user_allocation(assignment, powers, pool, static_cast<int>(k));
        v[k] = evaluate_constraint(users[k], alloc, eval_frame(users[k], opt), opt.table);
    }
    return v;
}

inline constexpr std::size_t pair_move_limit = 64;
inline constexpr int random_restarts = 16;
inline constexpr std::uint64_t restart_seed = 0x5ca0u;

/// Search order for assignments: total violation, then how far violating
/// users' mean rates sit outside their windows (in units of r_min, which
/// orders plateaus where the violation is flat), then objective.
struct SearchScore {
    double violation = std::numeric_limits<double>::infinity();
    double distance = 0.0;
    double objective = 0.0;

    bool better_than(const SearchScore& o) const {
        if (violation < o.violation - 1e-9) {
            return true;
        }
        if (violation > o.violation + 1e-9) {
            return false;
        }
        if (distance < o.distance - 1e-9) {
            return true;
        }
        return distance <= o.distance + 1e-9 && objective > o.objective * (1.0 + 1e-12);
    }
};

inline SearchScore score_assignment(const std::vector<UserDemand>& users, const SubcarrierPool& pool,
                                    double p_total, const AllocatorOptions& opt, const std::vector<int>& a) {
    if (std::none_of(a.begin(), a.end(), [](int k) { return k >= 0; })) {
        return {};
    }
    const std::vector<double> powers = equal_power(a, p_total);
    SearchScore sc{0.0, 0.0, plan_objective(AllocationPlan{a, powers, 0.0, false, {}}, pool)};
    for (std::size_t k = 0; k < users.size(); ++k) {
        const UserDemand& u = users[k];
        const AllocationSet alloc = user_allocation(a, powers, pool, static_cast<int>(k));
        if (alloc.empty()) {
            sc.violation += u.nu;
            sc.distance += 1.0;
            continue;
        }
        const ratestats::AvgRateStats st =
            ratestats::avg_rate_stats(ratestats::amc_pmf(alloc, opt.table), eval_frame(u, opt), u.T);
        const double gap = u.nu - ratestats::window_probability(st, u.r_min, u.rho);
        if (gap > 0.0) {
            sc.violation += gap;
            const double hi = u.rho * u.r_min;
            const double out = st.mu < u.r_min ? u.r_min - st.mu : (st.mu > hi ? st.mu - hi : 0.0);
            sc.distance += out / std::max(u.r_min, 1.0);
        }
    }
    return sc;
}

/// Steepest descent over single-subcarrier reassignments (a subcarrier may
/// also go idle), then pairs once singles stall.
inline std::vector<int> polish(const std::vector<UserDemand>& users, const SubcarrierPool& pool, double p_total,
                               const AllocatorOptions& opt, std::vector<int> assignment) {
    const std::size_t K = users.size();
    const std::size_t N = assignment.size();
    const int last = static_cast<int>(K);
    SearchScore current = score_assignment(users, pool, p_total, opt, assignment);
    for (std::size_t iter = 0; iter < 4 * N * (K + 1); ++iter) {
        std::vector<int> best_move;
        SearchScore best = current;
        auto consider = [&](std::vector<int> trial) {
            const SearchScore sc = score_assignment(users, pool, p_total, opt, trial);
            if (sc.better_than(best)) {
                best = sc;
                best_move = std::move(trial);
            }
        };
        for (std::size_t n = 0; n < N; ++n) {
            for (int k = -1; k < last; ++k) {
                if (k != assignment[n]) {
                    std::vector<int> trial = assignment;
                    trial[n] = k;
                    consider(std::move(trial));
                }
            }
        }
        // Pairs cost N^2 K^2 evaluations, so large pools stop at singles.
        if (best_move.empty() && N * (K + 1) <= pair_move_limit) {
            for (std::size_t n1 = 0; n1 < N; ++n1) {
                for (std::size_t n2 = n1 + 1; n2 < N; ++n2) {
                    for (int k1 = -1; k1 < last; ++k1) {
                        for (int k2 = -1; k2 < last; ++k2) {
                            if (k1 != assignment[n1] && k2 != assignment[n2]) {
                                std::vector<int> trial = assignment;
                                trial[n1] = k1;
                                trial[n2] = k2;
                                consider(std::move(trial));
                            }
                        }
                    }
                }
            }
        }
        if (best_move.empty()) {
            break;
        }
        assignment = std::move(best_move);
        current = best;
    }
    return assignment;
}

} // namespace detail

/// Each subcarrier to the user with the largest Shannon rate on it under an
/// equal split of p_total over all subcarriers. Ties go to the lowest index.
inline std::vector<int> greedy_assignment(const SubcarrierPool& pool, double p_total) {
    const std::size_t N = pool.subcarriers();
    const double p_eq = p_total / static_cast<double>(N);
    std::vector<int> assignment(N, 0);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t k = 1; k < pool.users(); ++k) {
            if (subcarrier_rate(pool, static_cast<int>(k), n, p_eq) >
                subcarrier_rate(pool, assignment[n], n, p_eq)) {
                assignment[n] = static_cast<int>(k);
            }
        }
    }
    return assignment;
}

/// Subcarrier n to user n mod K.
inline std::vector<int> round_robin_assignment(std::size_t users, std::size_t subcarriers) {
    std::vector<int> assignment(subcarriers);
    for (std::size_t n = 0; n < subcarriers; ++n) {
        assignment[n] = static_cast<int>(n % users);
    }
    return assignment;
}

/// Builds the plan for a fixed assignment: powers, objective, slacks, feasibility.
inline AllocationPlan finalize_plan(const std::vector<UserDemand>& users, const SubcarrierPool& pool,
                                    double p_total, std::vector<int> assignment,
                                    const AllocatorOptions& opt = {}) {
    AllocationPlan plan;
    plan.powers = opt.water_filling ? water_fill(assignment, pool, p_total) : equal_power(assignment, p_total);
    plan.assignment = std::move(assignment);
    const std::vector<double> values = detail::constraint_values(users, plan.assignment, plan.powers, pool, opt);
    plan.feasible = true;
    for (std::size_t k = 0; k < users.size(); ++k) {
        plan.slack.push_back(values[k] - users[k].nu);
        const bool admitted = std::any_of(plan.assignment.begin(), plan.assignment.end(), [&](int a) {
            return a == static_cast<int>(k);
        });
        plan.feasible = plan.feasible && admitted && plan.slack.back() >= 0.0;
    }
    plan.objective = plan_objective(plan, pool);
    return plan;
}

inline AllocationPlan sca_out_allocate(const std::vector<UserDemand>& users, const SubcarrierPool& pool,
                                       double p_total, const AllocatorOptions& opt = {}) {
    pool.validate();
    for (const auto& u : users) {
        u.validate();
    }
    const std::size_t K = users.size();
    const std::size_t N = pool.subcarriers();
    nakarate::detail::require(K >= 1, "sca_out_allocate: at least one user is required");
    nakarate::detail::require(pool.users() == K, "sca_out_allocate: pool rows must match the users");
    nakarate::detail::require(N >= K, "sca_out_allocate: need at least as many subcarriers as users");
    nakarate::detail::require(p_total > 0.0, "sca_out_allocate: p_total must be > 0");

    std::vector<int> assignment = greedy_assignment(pool, p_total);

    auto count = [&](int k) { return std::count(assignment.begin(), assignment.end(), k); };
    auto best_for = [&](int from, int to) {
        std::size_t pick = N;
        for (std::size_t n = 0; n < N; ++n) {
            if (assignment[n] == from &&
                (pick == N || pool.gains[static_cast<std::size_t>(to)][n].omega >
                                  pool.gains[static_cast<std::size_t>(to)][pick].omega)) {
                pick = n;
            }
        }
        return pick;
    };

    // Repair. A user can miss its window from below (too few subcarriers) or
    // from above (mean rate past rho r_min); the move direction follows.
    std::vector<int> best_assignment = assignment;
    double best_violation = std::numeric_limits<double>::infinity();
    double best_objective = 0.0;
    for (std::size_t iter = 0; iter <= N; ++iter) {
        const std::vector<double> powers = equal_power(assignment, p_total);
        const std::vector<double> value = detail::constraint_values(users, assignment, powers, pool, opt);
        double violation = 0.0;
        int worst = -1;
        double worst_gap = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double gap = users[k].nu - value[k];
            violation += std::max(gap, 0.0);
            if (gap > worst_gap) {
                worst_gap = gap;
                worst = static_cast<int>(k);
            }
        }
        const double objective = plan_objective(AllocationPlan{assignment, powers, 0.0, false, {}}, pool);
        if (violation < best_violation || (violation == best_violation && objective > best_objective)) {
            best_violation = violation;
            best_objective = objective;
            best_assignment = assignment;
        }
        if (worst < 0 || iter == N) {
            break;
        }
        const auto w = static_cast<std::size_t>(worst);
        bool over_served = false;
        if (count(worst) >= 2) {
            const AllocationSet mine = user_allocation(assignment, powers, pool, worst);
            const ratestats::AvgRateStats st = ratestats::avg_rate_stats(
                ratestats::amc_pmf(mine, opt.table), detail::eval_frame(users[w], opt), users[w].T);
            over_served = st.mu > users[w].rho * users[w].r_min;
        }
        int from = -1;
        int to = -1;
        if (over_served) {
            // Hand a subcarrier to the neediest other user.
            from = worst;
            for (std::size_t k = 0; k < K; ++k) {
                if (k != w && (to < 0 || value[k] - users[k].nu < value[static_cast<std::size_t>(to)] -
                                                                   users[static_cast<std::size_t>(to)].nu)) {
                    to = static_cast<int>(k);
                }
            }
        } else {
            to = worst;
            for (std::size_t k = 0; k < K; ++k) {
                const int d = static_cast<int>(k);
                if (d == worst || count(d) < 2) {
                    continue;
                }
                if (from < 0 || value[k] - users[k].nu > value[static_cast<std::size_t>(from)] -
                                                             users[static_cast<std::size_t>(from)].nu) {
                    from = d;
                }
            }
        }
        if (from < 0 || to < 0) {
            break;
        }
        assignment[best_for(from, to)] = to;
    }
    // Descend from the repaired plan, from two spread-out starts (round
    // robin; each user holding only its strongest subcarrier) and from a few
    // fixed-seed random assignments.
    std::vector<std::vector<int>> starts{std::move(best_assignment), round_robin_assignment(K, N),
                                         std::vector<int>(N, -1)};
    for (std::size_t k = 0; k < K; ++k) {
        std::size_t pick = N;
        for (std::size_t n = 0; n < N; ++n) {
            if (starts[2][n] < 0 && (pick == N || pool.gains[k][n].omega > pool.gains[k][pick].omega)) {
                pick = n;
            }
        }
        starts[2][pick] = static_cast<int>(k);
    }
    std::mt19937_64 rng(detail::restart_seed);
    for (int r = 0; r < detail::random_restarts; ++r) {
        std::vector<int> start(N);
        for (auto& a : start) {
            a = static_cast<int>(rng() % (K + 1)) - 1;
        }
        starts.push_back(std::move(start));
    }
    detail::SearchScore best;
    assignment.clear();
    for (auto& start : starts) {
        std::vector<int> candidate = detail::polish(users, pool, p_total, opt, std::move(start));
        const detail::SearchScore sc = detail::score_assignment(users, pool, p_total, opt, candidate);
        if (assignment.empty() || sc.better_than(best)) {
            best = sc;
            assignment = std::move(candidate);
        }
    }
    return finalize_plan(users, pool, p_total, std::move(assignment), opt);
}

} // namespace nakarate::allocator

#endif
