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


#include "nakarate/laplace.hpp"
#include "nakarate/quadrature.hpp"
#include "nakarate/specfun.hpp"
#include "support.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

using namespace nakarate;
using namespace nakarate::specfun;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

KernelOptions forced(BackendChoice b) {
    KernelOptions o;
    o.backend = b;
    return o;
}

} // namespace

TEST(LogGamma, Examples) {
    EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
    EXPECT_NEAR(log_gamma(0.5), 0.5723649429247001, 1e-13);
    EXPECT_NEAR(log_gamma(10.0), 12.801827480081469, 1e-12);
}

TEST(LogGamma, RejectsNonPositive) {
    EXPECT_THROW(log_gamma(0.0), DomainError);
    EXPECT_THROW(log_gamma(-2.5), DomainError);
    EXPECT_THROW(log_gamma(std::nan("")), DomainError);
}

TEST(LogGamma, RelativeAccuracyAcrossRange) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
        const double a = std::exp(testsupport::uniform(rng, std::log(1e-3), std::log(1e6)));
        const double want = boost::math::lgamma(a);
        if (std::abs(want) < 1e-3) {
            EXPECT_NEAR(log_gamma(a), want, 1e-15);
        } else {
            EXPECT_LE(rel_err(log_gamma(a), want), 1e-13) << "a=" << a;
        }
    }
}

TEST(IncompleteGamma, Examples) {
    EXPECT_NEAR(lower_regularized_gamma(1.0, 1.0), 0.6321205588285577, 1e-12);
    EXPECT_NEAR(lower_regularized_gamma(0.5, 2.0), 0.9544997361036416, 1e-12);
    EXPECT_EQ(lower_regularized_gamma(3.0, 0.0), 0.0);
}

TEST(IncompleteGamma, Domain) {
    EXPECT_THROW(lower_regularized_gamma(0.0, 1.0), DomainError);
    EXPECT_THROW(lower_regularized_gamma(1.0, -1e-9), DomainError);
    EXPECT_THROW(upper_regularized_gamma(-1.0, 1.0), DomainError);
    EXPECT_EQ(lower_regularized_gamma(2.0, std::numeric_limits<double>::infinity()), 1.0);
}

TEST(IncompleteGamma, ComplementsAndMatchesBoost) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 2000; ++i) {
        const double a = testsupport::uniform(rng, 0.05, 40.0);
        const double x = testsupport::uniform(rng, 0.0, 3.0 * a + 10.0);
        const double p = lower_regularized_gamma(a, x);
        const double q = upper_regularized_gamma(a, x);
        EXPECT_NEAR(p + q, 1.0, 1e-12) << a << " " << x;
        EXPECT_NEAR(p, boost::math::gamma_p(a, x), 1e-12) << a << " " << x;
    }
}

TEST(IncompleteGamma, NondecreasingInX) {
    for (double a : {0.3, 1.0, 4.5, 30.0}) {
        double prev = 0.0;
        for (double x = 0.0; x < 80.0; x += 0.05) {
            const double p = lower_regularized_gamma(a, x);
            EXPECT_GE(p, prev - 1e-15);
            prev = p;
        }
    }
}

TEST(Erf, ExamplesAndOddness) {
    EXPECT_EQ(specfun::erf(0.0), 0.0);
    EXPECT_NEAR(specfun::erf(1.0 / std::numbers::sqrt2), 0.6826894921370859, 1e-12);
    EXPECT_NEAR(specfun::erf(-1.0 / std::numbers::sqrt2), -0.6826894921370859, 1e-12);
    for (double x = -6.0; x <= 6.0; x += 0.01) {
        EXPECT_EQ(specfun::erf(-x), -specfun::erf(x));
        EXPECT_NEAR(specfun::erf(x), boost::math::erf(x), 1e-12);
    }
}

TEST(ShapeVector, Validation) {
    EXPECT_THROW(ShapeVector(std::vector<double>{}), DomainError);
    EXPECT_THROW((ShapeVector{1.0, 0.0}), DomainError);
    EXPECT_THROW((ShapeVector{1.0, -2.0}), DomainError);
    EXPECT_THROW((ShapeVector{std::numeric_limits<double>::infinity()}), DomainError);
    EXPECT_NO_THROW((ShapeVector{0.5, 2.0}));
}

TEST(MeijerPdf, Examples) {
    EXPECT_NEAR(meijer_pdf_kernel(1.0, {2.0}).value, std::exp(-1.0), 1e-14);
    const KernelResult two = meijer_pdf_kernel(1.0, {1.0, 1.0});
    const double k0 = 2.0 * std::cyl_bessel_k(0.0, 2.0);
    EXPECT_NEAR(two.value, k0, 1e-10);
    EXPECT_NEAR(two.value, testsupport::gamma_product_pdf({{1, 1}, {1, 1}}, 1.0), 1e-10);
    EXPECT_LT(meijer_pdf_kernel(1e-12, {1.5, 2.5}).value, 1e-16);
    EXPECT_EQ(meijer_pdf_kernel(0.0, {1.5, 2.5}).value, 0.0);
}

TEST(MeijerCdf, Examples) {
    EXPECT_NEAR(meijer_cdf_kernel(1.0, {1.0}).value, 0.6321205588285577, 1e-14);
    EXPECT_EQ(meijer_cdf_kernel(0.0, {0.5, 3.0}).value, 0.0);
    const double want = 1.0 - 2.0 * std::cyl_bessel_k(1.0, 2.0);
    EXPECT_NEAR(meijer_cdf_kernel(1.0, {1.0, 1.0}).value, want, 1e-10);
    EXPECT_NEAR(meijer_cdf_kernel(1.0, {1.0, 1.0}).value,
                testsupport::gamma_product_cdf({{1, 1}, {1, 1}}, 1.0), 1e-10);
}

TEST(MeijerKernels, DomainErrors) {
    EXPECT_THROW(meijer_pdf_kernel(-1.0, {1.0}), DomainError);
    EXPECT_THROW(meijer_cdf_kernel(-1e-300, {1.0, 2.0}), DomainError);
    EXPECT_THROW(meijer_cdf_kernel(std::nan(""), {1.0, 2.0}), DomainError);
}

TEST(MeijerKernels, SingleShapeIdentities) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = testsupport::uniform(rng, 1e-3, 50.0);
        const double m = testsupport::uniform(rng, 0.3, 8.0);
        const KernelResult pdf = meijer_pdf_kernel(x, {m});
        const KernelResult cdf = meijer_cdf_kernel(x, {m});
        EXPECT_LE(rel_err(pdf.value, std::pow(x, m) * std::exp(-x)), 1e-12) << x << " " << m;
        EXPECT_LE(rel_err(cdf.value, boost::math::tgamma_lower(m, x)), 1e-12) << x << " " << m;
        EXPECT_TRUE(std::isfinite(pdf.abs_error_estimate) && pdf.abs_error_estimate >= 0.0);
    }
}

TEST(MeijerKernels, ProductOracleAgreement) {
    const std::vector<std::vector<double>> cases{{0.5, 1.7}, {1.0, 2.5}, {0.5, 1.0, 2.5}, {1.0, 1.0, 1.7}};
    for (const auto& m : cases) {
        std::vector<testsupport::GammaFactor> f;
        for (double v : m) {
            f.push_back({v, 1.0});
        }
        for (double x : {0.05, 0.4, 1.0, 3.0, 9.0}) {
            const KernelResult cdf = meijer_cdf_kernel_normalized(x, ShapeVector(m));
            const KernelResult pdf = meijer_pdf_kernel_normalized(x, ShapeVector(m));
            EXPECT_NEAR(cdf.value, testsupport::gamma_product_cdf(f, x), 1e-9 + cdf.abs_error_estimate);
            EXPECT_NEAR(pdf.value / x, testsupport::gamma_product_pdf(f, x), 1e-9 + pdf.abs_error_estimate / x);
        }
    }
}

TEST(MeijerKernels, CdfDerivativeIsPdfOverX) {
    const double pool[] = {0.5, 1.0, 1.7, 2.5};
    std::mt19937_64 rng(4);
    for (int i = 0; i < 60; ++i) {
        const std::size_t M = 1 + i % 3;
        std::vector<double> m;
        for (std::size_t j = 0; j < M; ++j) {
            m.push_back(pool[rng() % 4]);
        }
        const ShapeVector shapes(m);
        const double x = std::exp(testsupport::uniform(rng, std::log(0.05), std::log(20.0)));
        const double h = 1e-5 * x;
        const double fd =
            (meijer_cdf_kernel(x + h, shapes).value - meijer_cdf_kernel(x - h, shapes).value) / (2.0 * h);
        const KernelResult pdf = meijer_pdf_kernel(x, shapes);
        EXPECT_NEAR(fd, pdf.value / x, std::max(1e-6, 10.0 * pdf.abs_error_estimate / x)) << x;
    }
}

TEST(MeijerKernels, BackendsAgreeOnDistinctShapes) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const std::size_t M = 2 + i % 3;
        std::vector<double> m;
        while (m.size() < M) {
            const double v = testsupport::uniform(rng, 0.3, 4.0);
            bool close = false;
            for (double w : m) {
                const double d = std::abs(v - w);
                close = close || std::abs(d - std::round(d)) < 0.05;
            }
            if (!close) {
                m.push_back(v);
            }
        }
        const ShapeVector shapes(m);
        const double x = std::exp(testsupport::uniform(rng, std::log(0.01), std::log(5.0)));
        for (bool cdf : {false, true}) {
            const auto eval = [&](BackendChoice b) {
                return cdf ? meijer_cdf_kernel(x, shapes, forced(b)) : meijer_pdf_kernel(x, shapes, forced(b));
            };
            const KernelResult r = eval(BackendChoice::ResidueSeries);
            const KernelResult q = eval(BackendChoice::ContourQuadrature);
            EXPECT_EQ(r.backend, Backend::ResidueSeries);
            EXPECT_EQ(q.backend, Backend::ContourQuadrature);
            EXPECT_NEAR(r.value, q.value,
                        std::max(1e-8, r.abs_error_estimate + q.abs_error_estimate))
                << "x=" << x << " M=" << M << " cdf=" << cdf;
        }
    }
}

TEST(MeijerKernels, RepeatedShapesUseQuadrature) {
    const ShapeVector ties{1.0, 1.0};
    EXPECT_EQ(meijer_pdf_kernel(1.0, ties).backend, Backend::ContourQuadrature);
    EXPECT_EQ(meijer_cdf_kernel(1.0, {1.0, 2.0}).backend, Backend::ContourQuadrature);
    EXPECT_THROW(meijer_pdf_kernel(1.0, ties, forced(BackendChoice::ResidueSeries)), EvaluationError);
}

TEST(MeijerKernels, TiePerturbationCrossChecksQuadrature) {
    KernelOptions o = forced(BackendChoice::ResidueSeries);
    o.perturb_ties = true;
    for (const ShapeVector& s : {ShapeVector{1.0, 1.0}, ShapeVector{0.5, 1.5, 2.5}, ShapeVector{2.0, 2.0, 2.0}}) {
        for (double x : {0.2, 1.0, 3.0}) {
            const KernelResult p = meijer_pdf_kernel(x, s, o);
            const KernelResult q = meijer_pdf_kernel(x, s, forced(BackendChoice::ContourQuadrature));
            EXPECT_NEAR(p.value, q.value, std::max(1e-12, p.abs_error_estimate + q.abs_error_estimate));
        }
    }
}

TEST(MeijerKernels, NormalizedCdfIsADistribution) {
    for (const ShapeVector& s : {ShapeVector{0.5}, ShapeVector{1.0, 1.0}, ShapeVector{0.5, 1.7, 2.5},
                                 ShapeVector{1.0, 1.0, 1.7, 2.5}, ShapeVector{3.0, 0.7, 5.5, 1.2, 2.2}}) {
        double prev = 0.0;
        for (double x = 1e-4; x < 1e6; x *= 1.15) {
            const double F = meijer_cdf_kernel_normalized(x, s).value;
            EXPECT_GE(F, 0.0);
            EXPECT_LE(F, 1.0);
            EXPECT_GE(F, prev - 1e-12) << x;
            prev = F;
        }
        EXPECT_NEAR(prev, 1.0, 1e-10);
    }
}

TEST(MeijerKernels, LargeParametersStayFinite) {
    const ShapeVector big{40.0, 55.5, 61.0};
    const double x = 40.0 * 55.5 * 61.0;
    const KernelResult F = meijer_cdf_kernel_normalized(x, big);
    EXPECT_GT(F.value, 0.2);
    EXPECT_LT(F.value, 0.8);
    std::vector<double> many(12, 1.3);
    for (std::size_t i = 0; i < many.size(); ++i) {
        many[i] += 0.11 * static_cast<double>(i);
    }
    const KernelResult G = meijer_cdf_kernel_normalized(1.0, ShapeVector(many));
    EXPECT_TRUE(std::isfinite(G.value));
    EXPECT_GE(G.value, 0.0);
    EXPECT_LE(G.value, 1.0);
}

TEST(MeijerKernels, ExtremeArgumentsSaturate) {
    for (const ShapeVector& s : {ShapeVector{1.0, 2.0}, ShapeVector{1.0, 1.0}, ShapeVector{0.5, 1.7, 2.5}}) {
        const KernelResult hi = meijer_cdf_kernel_normalized(1e19, s);
        EXPECT_NEAR(hi.value, 1.0, 1e-14);
        EXPECT_LE(hi.abs_error_estimate, 1e-14);
        EXPECT_NEAR(meijer_cdf_kernel_normalized(1e-30, s).value, 0.0, 1e-14);
    }
}

TEST(MeijerKernels, ConcurrentCallsAgree) {
    const ShapeVector s{0.5, 1.7, 2.5};
    std::vector<double> serial;
    for (int i = 1; i <= 40; ++i) {
        serial.push_back(meijer_cdf_kernel(0.25 * i, s).value);
    }
    std::vector<std::vector<double>> out(4);
    {
        std::vector<std::jthread> threads;
        for (auto& o : out) {
            threads.emplace_back([&o, &s] {
                for (int i = 1; i <= 40; ++i) {
                    o.push_back(meijer_cdf_kernel(0.25 * i, s).value);
                }
            });
        }
    }
    for (const auto& o : out) {
        EXPECT_EQ(o, serial);
    }
}

TEST(LaplaceY, Examples) {
    const channel::ProductGammaDist unit(ShapeVector{1.0}, {1.0});
    EXPECT_EQ(laplace_y(0.0, unit), 1.0);
    EXPECT_NEAR(laplace_y(-1.0, unit), std::exp(-1.0) / 2.0, 1e-8 * std::exp(-1.0) / 2.0);
    EXPECT_THROW(laplace_y(0.1, unit), DomainError);
}

TEST(LaplaceY, SingleShapeClosedForm) {
    // E[e^{s(1+X)}] for X ~ Gamma(m, S) is e^s (1 - sS)^{-m}.
    for (double m : {0.5, 2.0, 4.5}) {
        for (double S : {0.3, 2.0}) {
            const channel::ProductGammaDist d(ShapeVector{m}, {S});
            for (double s : {-0.1, -1.0, -5.0}) {
                const double want = std::exp(s) * std::pow(1.0 - s * S, -m);
                EXPECT_LE(rel_err(laplace_y(s, d), want), 1e-8) << m << " " << S << " " << s;
            }
        }
    }
}

TEST(LaplaceY, MatchesMonteCarlo) {
    const channel::ProductGammaDist d(ShapeVector{1.0, 2.0}, {1.0, 0.5});
    const double s = -0.5;
    testsupport::ProductSampler draw({{1.0, 1.0}, {2.0, 0.5}}, 99);
    const int n = 2000000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = std::exp(s * (1.0 + draw()));
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(laplace_y(s, d), mean, 3.0 * se);
}

TEST(Quadrature, AdaptiveKronrod) {
    const auto est = quadrature::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    EXPECT_NEAR(est.value, 2.0, 1e-12);
    const auto peak = quadrature::integrate([](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-10); }, -1.0, 1.0,
                                            1e-10);
    EXPECT_NEAR(peak.value, 4.0, 1e-3);
    EXPECT_THROW(quadrature::integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, 1e-14, 0.0, 5),
                 EvaluationError);
}
