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


#ifndef NAKARATE_QUADRATURE_HPP
#define NAKARATE_QUADRATURE_HPP

#include "nakarate/error.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace nakarate::quadrature {

struct Estimate {
    double value = 0.0;
    double abs_error = 0.0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel gk15(F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double sum = f(mid - dx) + f(mid + dx);
        kronrod += kronrod_weights[j] * sum;
        if (j % 2 == 1) {
            gauss += gauss_weights[j / 2] * sum;
        }
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Bisects the panel with the largest error until the summed error is below
/// max(abs_tol, rel_tol*|I|). Throws EvaluationError past max_panels.
template <typename F>
Estimate integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                   double abs_tol = 0.0, int max_panels = 4000) {
    nakarate::detail::require(std::isfinite(a) && std::isfinite(b) && a <= b,
                              "integrate: interval must be finite and ordered");
    if (a == b) {
        return {};
    }
    std::priority_queue<detail::Panel> heap;
    heap.push(detail::gk15(f, a, b));
    double total = heap.top().value;
    double error = heap.top().error;
    int panels = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (panels >= max_panels) {
            throw EvaluationError("integrate: panel budget exhausted before tolerance");
        }
        const detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Panel left = detail::gk15(f, worst.a, mid);
        const detail::Panel right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {total, error};
}

} // namespace nakarate::quadrature

#endif
