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


#include "nakarate/mcsim.hpp"
#include "nakarate/outage.hpp"
#include "support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nakarate;
using namespace nakarate::outage;
using channel::AllocationSet;
using channel::SubcarrierChannel;

namespace {

constexpr double kBsc = 1e6;

// Mean SNR equals `snr` with b_sc = 1 MHz.
SubcarrierChannel sc(double m, double snr) { return {m, 1.0, snr, 1e-6, kBsc}; }

ProductGammaDist dist(std::vector<double> m, std::vector<double> s) {
    return ProductGammaDist(specfun::ShapeVector(std::move(m)), std::move(s));
}

double binomial_sd(double p, double n) { return std::sqrt(std::max(p * (1.0 - p), 1e-300) / n); }

} // namespace

TEST(ProductPdf, Examples) {
    EXPECT_NEAR(product_pdf(dist({1.0}, {1.0}), 2.0), std::exp(-1.0), 1e-14);
    const double want = boost::math::gamma_p_derivative(2.5, 0.5 / 0.8) / 0.8;
    EXPECT_NEAR(product_pdf(dist({2.5}, {0.8}), 1.5), want, 1e-13);
    EXPECT_NEAR(product_pdf(dist({1.0, 1.0}, {1.0, 1.0}), 2.0), 2.0 * std::cyl_bessel_k(0.0, 2.0), 1e-10);
    EXPECT_NEAR(product_pdf(dist({1.0, 1.0}, {1.0, 1.0}), 2.0),
                testsupport::gamma_product_pdf({{1, 1}, {1, 1}}, 1.0), 1e-10);
}

TEST(ProductPdf, Domain) {
    EXPECT_THROW(product_pdf(dist({1.0}, {1.0}), 1.0), DomainError);
    EXPECT_THROW(product_pdf(dist({1.0}, {1.0}), 0.5), DomainError);
    EXPECT_THROW(dist({1.0, 2.0}, {1.0}), DomainError);
    EXPECT_THROW(dist({1.0}, {0.0}), DomainError);
}

TEST(ProductCdf, Examples) {
    EXPECT_EQ(product_cdf(dist({0.5, 3.0}, {2.0, 1.0}), 1.0), 0.0);
    EXPECT_NEAR(product_cdf(dist({1.0}, {1.0}), 2.0), 1.0 - std::exp(-1.0), 1e-14);
    EXPECT_THROW(product_cdf(dist({1.0}, {1.0}), 0.99), DomainError);
}

TEST(ProductCdf, ThreeFactorAgainstSampledProducts) {
    const ProductGammaDist d = dist({0.5, 1.0, 2.0}, {1.0, 2.0, 0.5});
    const specfun::KernelResult k = product_cdf_estimate(d, 4.0);
    EXPECT_NEAR(k.value, testsupport::gamma_product_cdf({{0.5, 1.0}, {1.0, 2.0}, {2.0, 0.5}}, 3.0), 1e-9);

    testsupport::ProductSampler draw({{0.5, 1.0}, {1.0, 2.0}, {2.0, 0.5}}, 11);
    const int n = 10000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        hits += 1.0 + draw() <= 4.0;
    }
    const double F = static_cast<double>(hits) / n;
    EXPECT_NEAR(k.value, F, 3.0 * binomial_sd(F, n) + k.abs_error_estimate);
}

TEST(ProductCdf, BoundedMonotonePdfPositive) {
    for (const auto& d : {dist({0.5}, {3.0}), dist({1.0, 1.0}, {0.5, 2.0}), dist({0.5, 1.7, 2.5}, {1.0, 0.3, 4.0}),
                          dist({1.0, 1.0, 1.0, 1.7}, {1.0, 1.0, 2.0, 0.1})}) {
        double prev = 0.0;
        for (double u = 1e-5; u < 1e5; u *= 1.2) {
            const double F = product_cdf(d, 1.0 + u);
            EXPECT_GE(F, prev - 1e-13);
            EXPECT_LE(F, 1.0);
            EXPECT_GE(product_pdf(d, 1.0 + u), 0.0);
            prev = F;
        }
    }
}

TEST(ProductPdf, IntegratesToOne) {
    for (const auto& d : {dist({0.7, 2.0}, {1.0, 3.0}), dist({1.0, 1.0, 2.5}, {0.5, 1.0, 2.0})}) {
        double u_max = 1.0;
        while (product_cdf(d, 1.0 + u_max) <= 1.0 - 1e-9) {
            u_max *= 2.0;
        }
        // y = 1 + e^v
        auto f = [&](double v) { return product_pdf(d, 1.0 + std::exp(v)) * std::exp(v); };
        const double total = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            f, std::log(1e-12), std::log(u_max), 20, 1e-12);
        EXPECT_NEAR(total, 1.0, 1e-6);
    }
}

TEST(SingleHop, ZeroRateIsNeverAnOutage) {
    const OutageResult r = single_hop_outage({sc(1.0, 10.0), sc(2.0, 3.0)}, 0.0);
    EXPECT_EQ(r.probability, 0.0);
    EXPECT_TRUE(r.per_hop.empty());
}

TEST(SingleHop, RayleighSingleCarrier) {
    const OutageResult r = single_hop_outage({sc(1.0, 10.0)}, kBsc);
    EXPECT_NEAR(r.probability, 0.0951625819640404, 1e-12);
    EXPECT_TRUE(r.per_hop.empty());
}

TEST(SingleHop, Domain) {
    EXPECT_THROW(single_hop_outage({sc(1.0, 10.0)}, -1.0), DomainError);
    const AllocationSet mixed{sc(1.0, 1.0), {1.0, 1.0, 1.0, 1e-6, 2e6}};
    EXPECT_THROW(single_hop_outage(mixed, 1e5), DomainError);
}

TEST(SingleHop, SilentSubcarriersCarryNothing) {
    const SubcarrierChannel off{2.0, 1.0, 0.0, 1e-6, kBsc};
    EXPECT_EQ(single_hop_outage({off}, 1.0).probability, 1.0);
    EXPECT_EQ(single_hop_outage({sc(1.0, 10.0), off}, kBsc).probability,
              single_hop_outage({sc(1.0, 10.0)}, kBsc).probability);
}

// The two-subcarrier example judged against the outage frequency of the
// simulated link, which is the physical quantity.
TEST(SingleHop, TwoSubcarrierExampleAgainstRateSimulation) {
    const AllocationSet alloc{sc(1.0, 5.0), sc(2.0, 8.0)};
    const OutageResult closed = single_hop_outage(alloc, 2.0 * kBsc);
    const mcsim::SimReport sim = mcsim::simulate_single_hop(alloc, 2.0 * kBsc, {20240, 10000000});
    EXPECT_NEAR(closed.probability, sim.empirical_outage, 3.0 * sim.stderr_outage + closed.abs_error_estimate);
}

TEST(SingleHop, ClosedFormIsTheShiftedGammaProductLaw) {
    const AllocationSet alloc{sc(1.0, 5.0), sc(2.0, 8.0)};
    const double y = channel::rate_threshold(2.0 * kBsc, kBsc);
    const OutageResult closed = single_hop_outage(alloc, 2.0 * kBsc);
    const std::vector<double> grid{y};
    const double F = mcsim::empirical_cdf_gamma_product(channel::build_product_dist(alloc), grid, {5, 4000000})[0];
    EXPECT_NEAR(closed.probability, F, 4.0 * binomial_sd(F, 4e6) + closed.abs_error_estimate);
}

TEST(SingleHop, SingleCarrierMatchesRateSimulation) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 20; ++i) {
        const double m = testsupport::uniform(rng, 0.5, 3.0);
        const double snr = testsupport::uniform(rng, 1.0, 30.0);
        const double r = testsupport::uniform(rng, 0.2, 4.0) * kBsc;
        const AllocationSet alloc{sc(m, snr)};
        const OutageResult closed = single_hop_outage(alloc, r);
        const mcsim::SimReport sim = mcsim::simulate_single_hop(alloc, r, {static_cast<std::uint64_t>(i), 1000000});
        EXPECT_NEAR(closed.probability, sim.empirical_outage,
                    4.0 * binomial_sd(closed.probability, 1e6) + closed.abs_error_estimate)
            << "m=" << m << " snr=" << snr << " r=" << r;
    }
}

TEST(SingleHop, MonotoneInRateAndResources) {
    const AllocationSet base{sc(1.5, 6.0), sc(0.8, 12.0)};
    double prev = 0.0;
    for (double r = 0.0; r <= 8.0 * kBsc; r += 0.25 * kBsc) {
        const double p = single_hop_outage(base, r).probability;
        EXPECT_GE(p, prev - 1e-13);
        prev = p;
    }
    const double r = 3.0 * kBsc;
    const double p0 = single_hop_outage(base, r).probability;
    auto with = [&](auto edit) {
        std::vector<SubcarrierChannel> v = base.subcarriers();
        for (auto& c : v) {
            edit(c);
        }
        return single_hop_outage(AllocationSet(v), r).probability;
    };
    EXPECT_LT(with([](SubcarrierChannel& c) { c.p *= 2.0; }), p0);
    EXPECT_LT(with([](SubcarrierChannel& c) { c.omega *= 1.5; }), p0);
    // Wider subcarriers at fixed total noise power per subcarrier and r_min.
    EXPECT_LT(with([](SubcarrierChannel& c) {
                  c.b_sc *= 2.0;
                  c.n0 /= 2.0;
              }),
              p0);
}

TEST(MultiHop, SingleHopPathDegenerates) {
    const AllocationSet hop{sc(1.0, 4.0), sc(2.0, 9.0)};
    const OutageResult one = multi_hop_outage(HopPath{hop}, 2.5 * kBsc);
    EXPECT_DOUBLE_EQ(one.probability, single_hop_outage(hop, 2.5 * kBsc).probability);
    ASSERT_EQ(one.per_hop.size(), 1u);
}

TEST(MultiHop, AnalyticCombination) {
    EXPECT_NEAR(combine_hops({0.1, 0.2}).probability, 0.28, 1e-15);
    EXPECT_THROW(combine_hops({}), DomainError);
    EXPECT_THROW(combine_hops({0.1, 1.2}), DomainError);
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> p(2 + i % 4);
        double survive = 1.0;
        for (auto& v : p) {
            v = testsupport::uniform(rng, 0.0, 1.0);
            survive *= 1.0 - v;
        }
        EXPECT_NEAR(combine_hops(p).probability, 1.0 - survive, 1e-12);
    }
}

TEST(MultiHop, IdenticalHopsAndBounds) {
    const AllocationSet hop{sc(1.2, 7.0), sc(0.6, 3.0)};
    const double r = 2.0 * kBsc;
    const double p1 = single_hop_outage(hop, r).probability;
    for (std::size_t n = 1; n <= 4; ++n) {
        const OutageResult res = multi_hop_outage(HopPath(std::vector<AllocationSet>(n, hop)), r);
        EXPECT_NEAR(res.probability, 1.0 - std::pow(1.0 - p1, static_cast<double>(n)), 1e-12);
    }
    const HopPath mixed{hop, {sc(2.0, 20.0)}, {sc(0.7, 2.0), sc(1.0, 1.0), sc(3.0, 5.0)}};
    const OutageResult res = multi_hop_outage(mixed, r);
    double sum = 0.0;
    double worst = 0.0;
    for (double p : res.per_hop) {
        sum += p;
        worst = std::max(worst, p);
    }
    EXPECT_GE(res.probability, worst);
    EXPECT_LE(res.probability, std::min(1.0, sum));
}

TEST(MultiHop, SingleCarrierHopsMatchBottleneckSimulation) {
    const HopPath path{{sc(1.0, 12.0)}, {sc(2.0, 6.0)}};
    const double r = 1.5 * kBsc;
    const OutageResult closed = multi_hop_outage(path, r);
    const mcsim::SimReport sim = mcsim::simulate_multi_hop(path, r, {77, 10000000});
    EXPECT_NEAR(closed.probability, sim.empirical_outage, 3.0 * sim.stderr_outage + closed.abs_error_estimate);
}

TEST(MultiHop, EmptyPathRejected) {
    EXPECT_THROW(HopPath(std::vector<AllocationSet>{}), DomainError);
    EXPECT_THROW((HopPath{AllocationSet{}}), DomainError);
}
