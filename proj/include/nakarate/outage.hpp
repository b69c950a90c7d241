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


#ifndef NAKARATE_OUTAGE_HPP
#define NAKARATE_OUTAGE_HPP

#include "nakarate/channel.hpp"
#include "nakarate/error.hpp"
#include "nakarate/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nakarate::outage {

using channel::AllocationSet;
using channel::ProductGammaDist;

/// Ordered per-hop allocations from the base station to the subscriber.
class HopPath {
public:
    HopPath() = default;
    HopPath(std::initializer_list<AllocationSet> hops) : HopPath(std::vector<AllocationSet>(hops)) {}
    explicit HopPath(std::vector<AllocationSet> hops) : hops_(std::move(hops)) {
        nakarate::detail::require(!hops_.empty(), "HopPath: at least one hop is required");
        for (const auto& h : hops_) {
            nakarate::detail::require(!h.empty(), "HopPath: every hop needs a nonempty allocation");
        }
    }

    const std::vector<AllocationSet>& hops() const { return hops_; }
    std::size_t size() const { return hops_.size(); }
    const AllocationSet& operator[](std::size_t i) const { return hops_[i]; }

    bool operator==(const HopPath&) const = default;

private:
    std::vector<AllocationSet> hops_;
};

struct OutageResult {
    double probability = 0.0;
    std::vector<double> per_hop;  // empty for a single hop
    double abs_error_estimate = 0.0;
};

/// Density of Y at y > 1: (y-1)^{-1} G_pdf((y-1)/prod S) / prod Gamma(m).
inline specfun::KernelResult product_pdf_estimate(const ProductGammaDist& dist, double y) {
    nakarate::detail::require(y > 1.0, "product_pdf: y must be > 1");
    const double u = y - 1.0;
    specfun::KernelResult k = specfun::meijer_pdf_kernel_normalized(u / dist.scale_product, dist.shapes);
    k.value /= u;
    k.abs_error_estimate /= u;
    return k;
}

inline double product_pdf(const ProductGammaDist& dist, double y) {
    return product_pdf_estimate(dist, y).value;
}

/// Distribution function of Y at y >= 1: G_cdf((y-1)/prod S) / prod Gamma(m).
inline specfun::KernelResult product_cdf_estimate(const ProductGammaDist& dist, double y) {
    nakarate::detail::require(y >= 1.0 && !std::isnan(y), "product_cdf: y must be >= 1");
    if (y == 1.0) {
        return {0.0, 0.0, specfun::Backend::ResidueSeries};
    }
    specfun::KernelResult k =
        specfun::meijer_cdf_kernel_normalized((y - 1.0) / dist.scale_product, dist.shapes);
    k.value = std::clamp(k.value, 0.0, 1.0);
    return k;
}

inline double product_cdf(const ProductGammaDist& dist, double y) {
    return product_cdf_estimate(dist, y).value;
}

/// Cdf of Y for an allocation at y >= 1. A silent subcarrier contributes the
/// constant factor 1; with no active subcarrier Y is 1 almost surely.
inline specfun::KernelResult allocation_cdf_estimate(const AllocationSet& alloc, double y) {
    nakarate::detail::require(!alloc.empty(), "allocation_cdf: empty allocation");
    nakarate::detail::require(y >= 1.0 && !std::isnan(y), "allocation_cdf: y must be >= 1");
    std::vector<channel::SubcarrierChannel> active;
    for (const auto& c : alloc.subcarriers()) {
        if (c.mean_snr() > 0.0) {
            active.push_back(c);
        }
    }
    if (active.empty()) {
        return {1.0, 0.0, specfun::Backend::ResidueSeries};
    }
    return product_cdf_estimate(channel::build_product_dist(AllocationSet(std::move(active))), y);
}

/// Probability that the allocation's rate is at or below r_min.
inline OutageResult single_hop_outage(const AllocationSet& alloc, double r_min) {
    nakarate::detail::require(r_min >= 0.0 && !std::isnan(r_min),
                              "single_hop_outage: r_min must be >= 0");
    nakarate::detail::require(!alloc.empty(), "single_hop_outage: empty allocation");
    const double b_sc = alloc.uniform_b_sc();
    if (r_min == 0.0) {
        return {};
    }
    const specfun::KernelResult k = allocation_cdf_estimate(alloc, channel::rate_threshold(r_min, b_sc));
    return {k.value, {}, k.abs_error_estimate};
}

/// Bottleneck outage of independent hops: 1 - prod(1 - P_i).
inline OutageResult combine_hops(std::vector<double> per_hop, std::vector<double> hop_errors = {}) {
    nakarate::detail::require(!per_hop.empty(), "combine_hops: at least one hop is required");
    double survive = 1.0;
    for (double p : per_hop) {
        nakarate::detail::require(p >= 0.0 && p <= 1.0, "combine_hops: probabilities must lie in [0, 1]");
        survive *= 1.0 - p;
    }
    // |d(1 - prod(1-p))/dp_i| <= 1, so errors add.
    double err = 0.0;
    for (double e : hop_errors) {
        err += e;
    }
    return {1.0 - survive, std::move(per_hop), err};
}

inline OutageResult multi_hop_outage(const HopPath& path, double r_min) {
    nakarate::detail::require(r_min >= 0.0 && !std::isnan(r_min),
                              "multi_hop_outage: r_min must be >= 0");
    nakarate::detail::require(path.size() > 0, "multi_hop_outage: empty path");
    std::vector<double> per_hop;
    std::vector<double> errors;
    per_hop.reserve(path.size());
    for (const auto& hop : path.hops()) {
        const OutageResult r = single_hop_outage(hop, r_min);
        per_hop.push_back(r.probability);
        errors.push_back(r.abs_error_estimate);
    }
    return combine_hops(std::move(per_hop), std::move(errors));
}

} // namespace nakarate::outage

#endif
