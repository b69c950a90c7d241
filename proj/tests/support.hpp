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


// Reference computations for the test suites. Everything here is built on
// Boost.Math and the standard library, never on nakarate's own numerics.

#ifndef NAKARATE_TESTS_SUPPORT_HPP
#define NAKARATE_TESTS_SUPPORT_HPP

#include "nakarate/allocator.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace testsupport {

struct GammaFactor {
    double shape;
    double scale;
};

namespace detail {

// Integrates g(t) against the Gamma(shape, scale) density over its bulk, in
// log coordinates so small shapes stay well resolved.
template <typename G>
double against_density(const GammaFactor& f, G&& g) {
    const double lo = boost::math::gamma_p_inv(f.shape, 1e-15) * f.scale;
    const double hi = boost::math::gamma_q_inv(f.shape, 1e-15) * f.scale;
    auto integrand = [&](double v) {
        const double t = std::exp(v);
        return boost::math::gamma_p_derivative(f.shape, t / f.scale) * (t / f.scale) * g(t);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, std::log(lo), std::log(hi),
                                                                        15, 1e-13);
}

inline double product_cdf(const std::vector<GammaFactor>& f, std::size_t from, double u) {
    if (u <= 0.0) {
        return 0.0;
    }
    if (from + 1 == f.size()) {
        return boost::math::gamma_p(f[from].shape, u / f[from].scale);
    }
    return against_density(f[from], [&](double t) { return product_cdf(f, from + 1, u / t); });
}

inline double product_pdf(const std::vector<GammaFactor>& f, std::size_t from, double u) {
    if (u <= 0.0) {
        return 0.0;
    }
    if (from + 1 == f.size()) {
        return boost::math::gamma_p_derivative(f[from].shape, u / f[from].scale) / f[from].scale;
    }
    return against_density(f[from], [&](double t) { return product_pdf(f, from + 1, u / t) / t; });
}

} // namespace detail

/// P(prod X_n <= u) for independent X_n ~ Gamma(shape, scale), by nested quadrature.
inline double gamma_product_cdf(const std::vector<GammaFactor>& f, double u) {
    return detail::product_cdf(f, 0, u);
}

inline double gamma_product_pdf(const std::vector<GammaFactor>& f, double u) {
    return detail::product_pdf(f, 0, u);
}

/// Sampling with the standard library's gamma distribution.
class ProductSampler {
public:
    ProductSampler(std::vector<GammaFactor> f, std::uint64_t seed) : f_(std::move(f)), rng_(seed) {}

    double operator()() {
        double p = 1.0;
        for (const auto& g : f_) {
            p *= std::gamma_distribution<double>(g.shape, g.scale)(rng_);
        }
        return p;
    }

private:
    std::vector<GammaFactor> f_;
    std::mt19937_64 rng_;
};

inline double uniform(std::mt19937_64& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

/// Two users sharing four subcarriers with random fading, demands and budget.
struct AllocationInstance {
    std::vector<nakarate::allocator::UserDemand> users;
    nakarate::allocator::SubcarrierPool pool;
    double p_total = 0.0;
};

inline AllocationInstance random_allocation_instance(std::mt19937_64& rng) {
    AllocationInstance inst;
    inst.pool.n0 = 1e-9;
    inst.pool.b_sc = 2.5e5;
    inst.pool.gains.assign(2, std::vector<nakarate::allocator::ChannelTemplate>(4));
    for (auto& row : inst.pool.gains) {
        for (auto& g : row) {
            const double m = uniform(rng, 0.5, 3.0);
            g = {m, uniform(rng, 0.2, 2.0)};
        }
    }
    constexpr int windows[3] = {20, 50, 100};
    inst.users.resize(2);
    for (auto& u : inst.users) {
        const double r_min = uniform(rng, 1e5, 6e5);
        const double rho = uniform(rng, 1.2, 3.0);
        const double nu = uniform(rng, 0.5, 0.95);
        u = {r_min, rho, nu, windows[rng() % 3]};
    }
    inst.p_total = uniform(rng, 4e-3, 8e-2);
    return inst;
}

/// Best feasible plan over every assignment of N subcarriers to K users or
/// to nobody, under the allocator's power policy. Empty when none is feasible.
inline std::optional<nakarate::allocator::AllocationPlan> exhaustive_best(const AllocationInstance& inst) {
    const std::size_t K = inst.users.size();
    const std::size_t N = inst.pool.subcarriers();
    std::size_t total = 1;
    for (std::size_t n = 0; n < N; ++n) {
        total *= K + 1;
    }
    std::optional<nakarate::allocator::AllocationPlan> best;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<int> a(N);
        std::size_t c = code;
        for (std::size_t n = 0; n < N; ++n) {
            a[n] = static_cast<int>(c % (K + 1)) - 1;
            c /= K + 1;
        }
        auto plan = nakarate::allocator::finalize_plan(inst.users, inst.pool, inst.p_total, std::move(a));
        if (plan.feasible && (!best || plan.objective > best->objective)) {
            best = std::move(plan);
        }
    }
    return best;
}

} // namespace testsupport

#endif
