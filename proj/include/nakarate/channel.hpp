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


#ifndef NAKARATE_CHANNEL_HPP
#define NAKARATE_CHANNEL_HPP

#include "nakarate/error.hpp"
#include "nakarate/specfun.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace nakarate::channel {

/// One subcarrier of one link. h^2 ~ Gamma(m, omega/m); SNR = p h^2 / (n0 b_sc).
/// Units: watts, watts/Hz, Hz.
struct SubcarrierChannel {
    double m = 1.0;
    double omega = 1.0;
    double p = 0.0;
    double n0 = 1.0;
    double b_sc = 1.0;

    void validate() const {
        nakarate::detail::require(std::isfinite(m) && m > 0.0, "SubcarrierChannel: m must be > 0");
        nakarate::detail::require(std::isfinite(omega) && omega > 0.0,
                                  "SubcarrierChannel: omega must be > 0");
        nakarate::detail::require(std::isfinite(p) && p >= 0.0, "SubcarrierChannel: p must be >= 0");
        nakarate::detail::require(std::isfinite(n0) && n0 > 0.0, "SubcarrierChannel: n0 must be > 0");
        nakarate::detail::require(std::isfinite(b_sc) && b_sc > 0.0,
                                  "SubcarrierChannel: b_sc must be > 0");
        nakarate::detail::require(std::isfinite(mean_snr()), "SubcarrierChannel: mean SNR overflows");
    }

    double mean_snr() const { return p * omega / (n0 * b_sc); }

    bool operator==(const SubcarrierChannel&) const = default;
};

/// The subcarriers assigned to one user on one link.
class AllocationSet {
public:
    AllocationSet() = default;
    AllocationSet(std::initializer_list<SubcarrierChannel> sc)
        : AllocationSet(std::vector<SubcarrierChannel>(sc)) {}
    explicit AllocationSet(std::vector<SubcarrierChannel> sc) : subcarriers_(std::move(sc)) {
        nakarate::detail::require(!subcarriers_.empty(),
                                  "AllocationSet: the subcarrier set must be nonempty");
        for (const auto& c : subcarriers_) {
            c.validate();
        }
    }

    const std::vector<SubcarrierChannel>& subcarriers() const { return subcarriers_; }
    std::size_t size() const { return subcarriers_.size(); }
    bool empty() const { return subcarriers_.empty(); }
    const SubcarrierChannel& operator[](std::size_t i) const { return subcarriers_[i]; }

    /// Common subcarrier bandwidth; DomainError when subcarriers disagree.
    double uniform_b_sc() const {
        nakarate::detail::require(!subcarriers_.empty(), "AllocationSet: empty allocation");
        const double b = subcarriers_.front().b_sc;
        for (const auto& c : subcarriers_) {
            nakarate::detail::require(std::abs(c.b_sc - b) <= 1e-12 * b,
                                      "AllocationSet: mixed subcarrier bandwidths");
        }
        return b;
    }

    bool operator==(const AllocationSet&) const = default;

private:
    std::vector<SubcarrierChannel> subcarriers_;
};

/// Law of the Gamma product built from one allocation set: shapes m_n and
/// per-subcarrier scales S_n of chi_n ~ Gamma(m_n, S_n).
struct ProductGammaDist {
    specfun::ShapeVector shapes;
    std::vector<double> scales;
    double scale_product = 1.0;

    ProductGammaDist() = default;
    ProductGammaDist(specfun::ShapeVector m, std::vector<double> s)
        : shapes(std::move(m)), scales(std::move(s)) {
        nakarate::detail::require(scales.size() == shapes.size(),
                                  "ProductGammaDist: one scale per shape");
        for (double v : scales) {
            nakarate::detail::require(std::isfinite(v) && v > 0.0,
                                      "ProductGammaDist: scales must be > 0");
        }
        scale_product = std::accumulate(scales.begin(), scales.end(), 1.0, std::multiplies<>());
        nakarate::detail::require(std::isfinite(scale_product) && scale_product > 0.0,
                                  "ProductGammaDist: scale product out of range");
    }

    bool operator==(const ProductGammaDist&) const = default;
};

struct LinkConfig {
    double b_total = 0.0;       // B, Hz
    int n_subcarriers = 0;      // N
    double n0 = 0.0;            // W/Hz

    double b_sc() const { return b_total / n_subcarriers; }

    void validate() const {
        nakarate::detail::require(std::isfinite(b_total) && b_total > 0.0,
                                  "LinkConfig: bandwidth must be > 0");
        nakarate::detail::require(n_subcarriers > 0, "LinkConfig: subcarrier count must be > 0");
        nakarate::detail::require(std::isfinite(n0) && n0 > 0.0, "LinkConfig: n0 must be > 0");
    }

    bool operator==(const LinkConfig&) const = default;
};

/// Gamma scale of chi = SNR: p omega / (m n0 b_sc), so that E[chi] = m * scale.
inline double gamma_scale(const SubcarrierChannel& ch) {
    ch.validate();
    return ch.p * ch.omega / (ch.m * ch.n0 * ch.b_sc);
}

inline ProductGammaDist build_product_dist(const AllocationSet& alloc) {
    nakarate::detail::require(!alloc.empty(), "build_product_dist: empty allocation");
    std::vector<double> m;
    std::vector<double> s;
    m.reserve(alloc.size());
    s.reserve(alloc.size());
    for (const auto& c : alloc.subcarriers()) {
        m.push_back(c.m);
        s.push_back(gamma_scale(c));
    }
    return ProductGammaDist(specfun::ShapeVector(std::move(m)), std::move(s));
}

/// b_sc log2(y), bits/s.
inline double rate_from_y(double y, double b_sc) {
    nakarate::detail::require(y >= 1.0, "rate_from_y: y must be >= 1");
    nakarate::detail::require(b_sc > 0.0, "rate_from_y: b_sc must be > 0");
    return b_sc * std::log2(y);
}

/// 2^{r_min / b_sc}: the value of y at which the rate equals r_min.
inline double rate_threshold(double r_min, double b_sc) {
    nakarate::detail::require(r_min >= 0.0, "rate_threshold: r_min must be >= 0");
    nakarate::detail::require(b_sc > 0.0, "rate_threshold: b_sc must be > 0");
    return std::exp2(r_min / b_sc);
}

} // namespace nakarate::channel

#endif
