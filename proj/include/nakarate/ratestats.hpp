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


#ifndef NAKARATE_RATESTATS_HPP
#define NAKARATE_RATESTATS_HPP

// Rate statistics under adaptive modulation and coding: the per-frame rate
// pmf induced by the effective-SNR law, the exponentially averaged rate and
// its normal approximation, and the probability that the averaged rate lands
// in the window [r_min, rho * r_min].

#include "nakarate/channel.hpp"
#include "nakarate/error.hpp"
#include "nakarate/outage.hpp"
#include "nakarate/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace nakarate::ratestats {

using channel::AllocationSet;

/// Seven SNR regions with their information bits per symbol. Below the first
/// threshold the rate is 0; the top region is unbounded.
struct AmcTable {
    std::array<double, 7> thresholds{};
    std::array<double, 7> bits{};
    bool thresholds_in_db = true;

    void validate() const {
        for (std::size_t i = 0; i < 7; ++i) {
            nakarate::detail::require(bits[i] > 0.0, "AmcTable: bits must be > 0");
            nakarate::detail::require(thresholds_in_db || thresholds[i] > 0.0,
                                      "AmcTable: linear thresholds must be > 0");
            if (i > 0) {
                nakarate::detail::require(thresholds[i] > thresholds[i - 1],
                                          "AmcTable: thresholds must be strictly ascending");
                nakarate::detail::require(bits[i] > bits[i - 1],
                                          "AmcTable: bits must be strictly ascending");
            }
        }
    }

    double linear_threshold(std::size_t i) const {
        return thresholds_in_db ? std::pow(10.0, thresholds[i] / 10.0) : thresholds[i];
    }

    bool operator==(const AmcTable&) const = default;
};

/// IEEE 802.16 modulation and coding schemes (required SNR in dB).
inline AmcTable ieee80216_table() {
    return {{6.4, 9.4, 11.2, 16.4, 18.2, 22.7, 24.4}, {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 4.5}, true};
}

/// Discrete per-frame rate law. support[0] = 0 carries the below-threshold mass.
struct RatePmf {
    std::vector<double> support;
    std::vector<double> probs;
    int clamped = 0;  // regions whose tiny negative mass was clamped to 0

    double mean() const {
        double s = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            s += support[i] * probs[i];
        }
        return s;
    }

    double variance() const {
        const double mu = mean();
        double s = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            s += (support[i] - mu) * (support[i] - mu) * probs[i];
        }
        return s;
    }
};

struct AvgRateStats {
    double mu = 0.0;
    double sigma = 0.0;
    long t = 0;
    int window = 1;
};

/// Cdf of the effective SNR Y - 1 at y >= 0.
inline double effective_snr_cdf(const AllocationSet& alloc, double y) {
    nakarate::detail::require(y >= 0.0, "effective_snr_cdf: y must be >= 0");
    return outage::allocation_cdf_estimate(alloc, 1.0 + y).value;
}

/// Rate pmf over the AMC regions. Rates are bits/symbol scaled by the
/// subcarrier symbol rate b_sc, i.e. bits/s.
inline RatePmf amc_pmf(const AllocationSet& alloc, const AmcTable& table = ieee80216_table()) {
    table.validate();
    const double b_sc = alloc.uniform_b_sc();
    std::array<double, 7> cdf{};
    std::array<double, 7> err{};
    for (std::size_t i = 0; i < 7; ++i) {
        const specfun::KernelResult k = outage::allocation_cdf_estimate(alloc, 1.0 + table.linear_threshold(i));
        cdf[i] = k.value;
        err[i] = k.abs_error_estimate;
    }
    RatePmf pmf;
    pmf.support.push_back(0.0);
    pmf.probs.push_back(cdf[0]);
    for (std::size_t i = 0; i < 7; ++i) {
        pmf.support.push_back(table.bits[i] * b_sc);
        const double upper = i + 1 < 7 ? cdf[i + 1] : 1.0;
        double p = upper - cdf[i];
        if (p < 0.0) {
            const double tol = err[i] + (i + 1 < 7 ? err[i + 1] : 0.0) + 1e-15;
            if (p < -tol) {
                throw EvaluationError("amc_pmf: negative region mass beyond the kernel error estimate");
            }
            p = 0.0;
            ++pmf.clamped;
        }
        pmf.probs.push_back(p);
    }
    return pmf;
}

/// R(t) = (1 - 1/T) R(t-1) + r(t) / T.
inline double exp_avg_update(double prev, double r_now, int T) {
    nakarate::detail::require(T >= 1, "exp_avg_update: T must be >= 1");
    const double w = 1.0 / T;
    return (1.0 - w) * prev + w * r_now;
}

/// Mean and standard deviation of R(t) started from R(-1) = 0 with
/// independent frames drawn from a stationary pmf.
inline AvgRateStats avg_rate_stats(const RatePmf& pmf, long t, int T) {
    nakarate::detail::require(T >= 1, "avg_rate_stats: T must be >= 1");
    nakarate::detail::require(t >= 0, "avg_rate_stats: t must be >= 0");
    const double q = 1.0 - 1.0 / T;
    const double n = static_cast<double>(t + 1);
    // (1/T) sum_{j=0}^{t} q^j  and  (1/T^2) sum_{j=0}^{t} q^{2j}
    const double mean_gain = 1.0 - std::pow(q, n);
    const double var_gain = T == 1 ? 1.0 : (1.0 - std::pow(q, 2.0 * n)) / ((1.0 - q * q) * T * T);
    const double var = std::max(pmf.variance(), 0.0);
    return {pmf.mean() * mean_gain, std::sqrt(var * var_gain), t, T};
}

/// Normal-approximation probability that R(t) lies in [r_min, rho r_min].
/// A zero sigma is a point mass: the result is the indicator of the window.
inline double window_probability(const AvgRateStats& stats, double r_min, double rho) {
    nakarate::detail::require(r_min >= 0.0, "window_probability: r_min must be >= 0");
    nakarate::detail::require(rho >= 1.0, "window_probability: rho must be >= 1");
    const double hi = rho * r_min;
    if (stats.sigma == 0.0) {
        return (stats.mu >= r_min && stats.mu <= hi) ? 1.0 : 0.0;
    }
    const double scale = std::numbers::sqrt2 * stats.sigma;
    const double v = 0.5 * (specfun::erf((hi - stats.mu) / scale) - specfun::erf((r_min - stats.mu) / scale));
    return std::clamp(v, 0.0, 1.0);
}

} // namespace nakarate::ratestats

#endif
