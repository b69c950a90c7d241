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


#ifndef NAKARATE_LAPLACE_HPP
#define NAKARATE_LAPLACE_HPP

#include "nakarate/channel.hpp"
#include "nakarate/error.hpp"
#include "nakarate/quadrature.hpp"
#include "nakarate/specfun.hpp"

#include <cmath>

namespace nakarate::specfun {

/// E[exp(s Y)] for s <= 0, Y = 1 + prod S_n * Z with Z the unit-scale Gamma
/// product. For s > 0 and more than one subcarrier the expectation diverges,
/// so positive s is rejected outright.
///
/// Computed as exp(s) * Int exp(s P e^v) G_pdf(e^v) / prod Gamma dv over
/// v = ln x, truncated where the cdf mass outside the range is below 1e-15.
inline double laplace_y(double s, const channel::ProductGammaDist& dist) {
    nakarate::detail::require(s <= 0.0 && !std::isnan(s), "laplace_y: s must be <= 0");
    if (s == 0.0) {
        return 1.0;
    }
    const ShapeVector& shapes = dist.shapes;
    const double P = dist.scale_product;
    constexpr double mass_cut = 1e-15;

    double v_lo = 0.0;
    while (meijer_cdf_kernel_normalized(std::exp(v_lo), shapes).value > mass_cut) {
        v_lo -= 2.0;
    }
    // Above this point exp(s P x) < e^-40.
    double v_hi = std::log(40.0 / (-s * P));
    double v_tail = 0.0;
    while (1.0 - meijer_cdf_kernel_normalized(std::exp(v_tail), shapes).value > mass_cut) {
        v_tail += 1.0;
    }
    v_hi = std::min(v_hi, v_tail);
    if (v_hi <= v_lo) {
        // All the mass sits where the exponential has died out.
        return 0.0;
    }
    auto integrand = [&](double v) {
        const double x = std::exp(v);
        return std::exp(s * P * x) * meijer_pdf_kernel_normalized(x, shapes).value;
    };
    const quadrature::Estimate est = quadrature::integrate(integrand, v_lo, v_hi, 1e-11);
    return std::exp(s) * est.value;
}

} // namespace nakarate::specfun

#endif
