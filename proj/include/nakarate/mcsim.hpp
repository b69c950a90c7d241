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


#ifndef NAKARATE_MCSIM_HPP
#define NAKARATE_MCSIM_HPP

// Seedable Monte Carlo oracle for the closed forms.
//
// Frames are split into fixed blocks of `block_frames`; block b draws from its
// own generator seeded by (seed, b, stream tag). Blocks are farmed out to
// worker threads and reduced in block order, so a report depends only on the
// configuration, never on the thread count or scheduling.

#include "nakarate/channel.hpp"
#include "nakarate/error.hpp"
#include "nakarate/outage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace nakarate::mcsim {

using channel::AllocationSet;
using channel::SubcarrierChannel;
using outage::HopPath;

struct SimConfig {
    std::uint64_t seed = 0;
    std::int64_t n_frames = 100000;
    double frame_duration = 0.01;  // seconds
    unsigned threads = 0;          // 0: hardware concurrency

    void validate() const {
        nakarate::detail::require(n_frames >= 1, "SimConfig: n_frames must be >= 1");
        nakarate::detail::require(frame_duration > 0.0, "SimConfig: frame_duration must be > 0");
    }

    bool operator==(const SimConfig&) const = default;
};

struct SimReport {
    double empirical_outage = 0.0;
    double mean_rate = 0.0;  // bits/s
    double stderr_outage = 0.0;
    std::int64_t n_frames = 0;

    bool operator==(const SimReport&) const = default;
};

using Engine = std::mt19937_64;

inline constexpr std::int64_t block_frames = 1 << 14;

/// Generator for one block of one experiment.
inline Engine block_engine(std::uint64_t seed, std::uint64_t block, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                      static_cast<std::uint32_t>(tag)};
    return Engine(seq);
}

/// Uniform on (0, 1].
inline double uniform_open0(Engine& rng) {
    return 1.0 - std::generate_canonical<double, 53>(rng);
}

/// Exact Gamma(shape, scale) draw: Marsaglia-Tsang squeeze/rejection for
/// shape >= 1, boosted through Gamma(shape + 1) * U^{1/shape} below 1.
inline double sample_gamma(double shape, double scale, Engine& rng) {
    if (shape < 1.0) {
        const double u = uniform_open0(rng);
        return sample_gamma(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    std::normal_distribution<double> normal;
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open0(rng);
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v * scale;
        }
    }
}

/// One draw of the power gain H = h^2 ~ Gamma(m, omega/m).
inline double sample_nakagami_power(const SubcarrierChannel& ch, Engine& rng) {
    return sample_gamma(ch.m, ch.omega / ch.m, rng);
}

/// Shannon rate b_sc * sum log2(1 + SNR_n) of one frame, bits/s.
inline double sample_allocation_rate(const AllocationSet& alloc, Engine& rng) {
    double nats = 0.0;
    for (const auto& ch : alloc.subcarriers()) {
        const double snr = ch.p * sample_nakagami_power(ch, rng) / (ch.n0 * ch.b_sc);
        nats += ch.b_sc * std::log1p(snr);
    }
    return nats / std::numbers::ln2;
}

namespace detail {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

inline unsigned worker_count(const SimConfig& cfg, std::int64_t blocks) {
    unsigned n = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::int64_t>(n, blocks));
}

// Runs body(block_index, first_frame, frame_count, engine) -> Partial for
// every block and returns the partials in block order.
template <typename Partial, typename Body>
std::vector<Partial> run_blocks(const SimConfig& cfg, std::uint64_t tag, Body&& body) {
    cfg.validate();
    const std::int64_t blocks = (cfg.n_frames + block_frames - 1) / block_frames;
    std::vector<Partial> partials(static_cast<std::size_t>(blocks));
    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (std::int64_t b = next++; b < blocks; b = next++) {
            const std::int64_t first = b * block_frames;
            const std::int64_t count = std::min(block_frames, cfg.n_frames - first);
            Engine rng = block_engine(cfg.seed, static_cast<std::uint64_t>(b), tag);
            partials[static_cast<std::size_t>(b)] = body(first, count, rng);
        }
    };
    const unsigned workers = worker_count(cfg, blocks);
    if (workers <= 1) {
        work();
        return partials;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) {
        pool.emplace_back(work);
    }
    pool.clear();  // joins
    return partials;
}

inline constexpr std::uint64_t tag_rate = 0x7261746531ULL;
inline constexpr std::uint64_t tag_cdf = 0x6364663159ULL;
inline constexpr std::uint64_t tag_gamma_product = 0x6770726f64ULL;

struct OutagePartial {
    std::int64_t outages = 0;
    KahanSum rate;
};

} // namespace detail

/// Frame-by-frame bottleneck outage: every hop's channels are drawn
/// independently each frame, the route rate is the minimum hop rate, and a
/// frame is in outage when that rate is <= r_min.
inline SimReport simulate_multi_hop(const HopPath& path, double r_min, const SimConfig& cfg) {
    nakarate::detail::require(r_min >= 0.0, "simulate_multi_hop: r_min must be >= 0");
    nakarate::detail::require(path.size() > 0, "simulate_multi_hop: empty path");
    auto partials = detail::run_blocks<detail::OutagePartial>(
        cfg, detail::tag_rate, [&](std::int64_t, std::int64_t count, Engine& rng) {
            detail::OutagePartial part;
            for (std::int64_t f = 0; f < count; ++f) {
                double bottleneck = std::numeric_limits<double>::infinity();
                for (const auto& hop : path.hops()) {
                    bottleneck = std::min(bottleneck, sample_allocation_rate(hop, rng));
                }
                if (bottleneck <= r_min) {
                    ++part.outages;
                }
                part.rate.add(bottleneck);
            }
            return part;
        });
    std::int64_t outages = 0;
    detail::KahanSum rate;
    for (const auto& p : partials) {
        outages += p.outages;
        rate.add(p.rate.sum);
        rate.add(-p.rate.carry);
    }
    const double n = static_cast<double>(cfg.n_frames);
    const double phat = static_cast<double>(outages) / n;
    return {phat, rate.sum / n, std::sqrt(phat * (1.0 - phat) / n), cfg.n_frames};
}

inline SimReport simulate_single_hop(const AllocationSet& alloc, double r_min, const SimConfig& cfg) {
    return simulate_multi_hop(HopPath({alloc}), r_min, cfg);
}

/// Per-frame Shannon rates of one allocation, in frame order.
inline std::vector<double> frame_rates(const AllocationSet& alloc, const SimConfig& cfg) {
    auto partials = detail::run_blocks<std::vector<double>>(
        cfg, detail::tag_rate, [&](std::int64_t, std::int64_t count, Engine& rng) {
            std::vector<double> r(static_cast<std::size_t>(count));
            for (auto& v : r) {
                v = sample_allocation_rate(alloc, rng);
            }
            return r;
        });
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cfg.n_frames));
    for (const auto& p : partials) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

namespace detail {

template <typename Draw>
std::vector<double> empirical_cdf(std::span<const double> grid, const SimConfig& cfg,
                                  std::uint64_t tag, Draw&& draw) {
    nakarate::detail::require(std::is_sorted(grid.begin(), grid.end()),
                              "empirical_cdf: grid must be sorted ascending");
    auto partials = run_blocks<std::vector<std::int64_t>>(
        cfg, tag, [&](std::int64_t, std::int64_t count, Engine& rng) {
            std::vector<std::int64_t> hist(grid.size() + 1, 0);
            for (std::int64_t f = 0; f < count; ++f) {
                const double y = draw(rng);
                ++hist[static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), y) -
                                                grid.begin())];
            }
            return hist;
        });
    std::vector<double> out(grid.size(), 0.0);
    std::int64_t cumulative = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (const auto& p : partials) {
            cumulative += p[i];
        }
        out[i] = static_cast<double>(cumulative) / static_cast<double>(cfg.n_frames);
    }
    return out;
}

} // namespace detail

/// Empirical cdf of Y = prod(1 + SNR_n) at each grid point.
inline std::vector<double> empirical_cdf_y(const AllocationSet& alloc, std::span<const double> grid,
                                           const SimConfig& cfg) {
    return detail::empirical_cdf(grid, cfg, detail::tag_cdf, [&](Engine& rng) {
        double y = 1.0;
        for (const auto& ch : alloc.subcarriers()) {
            y *= 1.0 + ch.p * sample_nakagami_power(ch, rng) / (ch.n0 * ch.b_sc);
        }
        return y;
    });
}

/// Empirical cdf of 1 + prod chi_n with chi_n ~ Gamma(m_n, S_n): the variable
/// whose law product_cdf evaluates.
inline std::vector<double> empirical_cdf_gamma_product(const channel::ProductGammaDist& dist,
                                                       std::span<const double> grid,
                                                       const SimConfig& cfg) {
    return detail::empirical_cdf(grid, cfg, detail::tag_gamma_product, [&](Engine& rng) {
        double z = 1.0;
        for (std::size_t n = 0; n < dist.shapes.size(); ++n) {
            z *= sample_gamma(dist.shapes[n], dist.scales[n], rng);
        }
        return 1.0 + z;
    });
}

} // namespace nakarate::mcsim

#endif
