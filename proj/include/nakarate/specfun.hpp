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


#ifndef NAKARATE_SPECFUN_HPP
#define NAKARATE_SPECFUN_HPP

// Special functions for the law of a product of independent Gamma variables.
//
// The product Z = Z_1 ... Z_M of unit-scale Gamma(m_n) variables has density
//
//     f_Z(x) = G^{M,0}_{0,M}[x | m_1..m_M] / (x * prod Gamma(m_n))
//
// and distribution function G^{M,1}_{1,M+1}[x | 1; m_1..m_M, 0] / prod Gamma(m_n).
// Both Meijer-G instances are evaluated from their Mellin-Barnes integrals
//
//     G_pdf(x) = 1/(2 pi i) Int prod Gamma(m_n + s) x^{-s} ds
//     G_cdf(x) = 1/(2 pi i) Int prod Gamma(m_n + s) (-1/s) x^{-s} ds
//
// either by summing residues at s = -m_j - k (pairwise non-coincident poles) or
// by trapezoid quadrature along a vertical line placed at the real saddle point
// of the integrand.

#include "nakarate/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace nakarate::specfun {

/// Fading coefficients of one allocation set; nonempty, every entry > 0.
class ShapeVector {
public:
    ShapeVector() = default;
    ShapeVector(std::initializer_list<double> m) : ShapeVector(std::vector<double>(m)) {}
    explicit ShapeVector(std::vector<double> m) : m_(std::move(m)) {
        nakarate::detail::require(!m_.empty(), "ShapeVector: at least one shape is required");
        for (double v : m_) {
            nakarate::detail::require(std::isfinite(v) && v > 0.0,
                                      "ShapeVector: shapes must be finite and > 0");
        }
    }

    std::size_t size() const { return m_.size(); }
    double operator[](std::size_t i) const { return m_[i]; }
    std::span<const double> values() const { return m_; }
    auto begin() const { return m_.begin(); }
    auto end() const { return m_.end(); }
    double min() const { return *std::min_element(m_.begin(), m_.end()); }

    bool operator==(const ShapeVector&) const = default;

private:
    std::vector<double> m_;
};

enum class Backend { ResidueSeries, ContourQuadrature };

inline const char* to_string(Backend b) {
    return b == Backend::ResidueSeries ? "residue_series" : "contour_quadrature";
}

struct KernelResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    Backend backend = Backend::ResidueSeries;
};

enum class BackendChoice { Automatic, ResidueSeries, ContourQuadrature };

struct KernelOptions {
    BackendChoice backend = BackendChoice::Automatic;
    // Residue backend only: split coincident poles by shifting the r-th
    // member of a tie group by r * 1e-6. Used to cross-check quadrature.
    bool perturb_ties = false;
};

// ---------------------------------------------------------------------------
// Real Gamma family
// ---------------------------------------------------------------------------

/// ln Gamma(a) for a > 0.
inline double log_gamma(double a) {
    nakarate::detail::require(a > 0.0 && !std::isnan(a), "log_gamma: argument must be > 0");
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(a, &sign);
#else
    return std::lgamma(a);
#endif
}

namespace detail {

inline constexpr double eps = std::numeric_limits<double>::epsilon();

// ln|Gamma(a)| and sign for any non-pole real a.
struct SignedLog {
    double log_abs;
    double sign;
};

inline SignedLog log_abs_gamma(double a) {
    if (a > 0.0) {
        return {log_gamma(a), 1.0};
    }
    // Reflection: Gamma(a) = pi / (sin(pi a) Gamma(1 - a)).
    // sin(pi a) = (-1)^n sin(pi (a - n)); a - n is exact near the poles.
    const double n = std::round(a);
    const double parity = std::fmod(n, 2.0) == 0.0 ? 1.0 : -1.0;
    const double s = parity * std::sin(std::numbers::pi * (a - n));
    return {std::log(std::numbers::pi) - std::log(std::abs(s)) - log_gamma(1.0 - a),
            s > 0.0 ? 1.0 : -1.0};
}

// Series for P(a, x); converges for all x, fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
    if (x == 0.0) {
        return 0.0;
    }
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * eps) {
            return std::min(1.0, sum * std::exp(-x + a * std::log(x) - log_gamma(a)));
        }
    }
    throw EvaluationError("gamma_p_series: no convergence");
}

// Modified Lentz continued fraction for Q(a, x); valid for x > 0, fast for x > a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) {
            return std::min(1.0, std::exp(-x + a * std::log(x) - log_gamma(a)) * h);
        }
    }
    throw EvaluationError("gamma_q_continued_fraction: no convergence");
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double lower_regularized_gamma(double a, double x) {
    nakarate::detail::require(a > 0.0, "lower_regularized_gamma: a must be > 0");
    nakarate::detail::require(x >= 0.0, "lower_regularized_gamma: x must be >= 0");
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return detail::gamma_p_series(a, x);
    }
    return 1.0 - detail::gamma_q_continued_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double upper_regularized_gamma(double a, double x) {
    nakarate::detail::require(a > 0.0, "upper_regularized_gamma: a must be > 0");
    nakarate::detail::require(x >= 0.0, "upper_regularized_gamma: x must be >= 0");
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    if (x < a + 1.0) {
        return 1.0 - detail::gamma_p_series(a, x);
    }
    return detail::gamma_q_continued_fraction(a, x);
}

inline double erf(double x) { return std::erf(x); }

namespace detail {

inline double digamma(double x) {
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    return acc + std::log(x) - 0.5 / x -
           f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f / 132))));
}

inline double trigamma(double x) {
    double acc = 0.0;
    while (x < 6.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double r = 1.0 / x;
    const double r2 = r * r;
    return acc + r + 0.5 * r2 +
           r * r2 * (1.0 / 6 - r2 * (1.0 / 30 - r2 * (1.0 / 42 - r2 * (1.0 / 30))));
}

/// ln Gamma(z) for Re z > 0, up to a multiple of 2 pi i (only exp() of it is used).
inline std::complex<double> log_gamma_complex(std::complex<double> z) {
    std::complex<double> shift = 1.0;
    while (std::abs(z) < 15.0) {
        shift *= z;
        z += 1.0;
    }
    const std::complex<double> w = 1.0 / z;
    const std::complex<double> w2 = w * w;
    // Stirling series, Bernoulli coefficients B_2k / (2k (2k - 1)).
    const std::complex<double> series =
        w * (1.0 / 12 +
             w2 * (-1.0 / 360 +
                   w2 * (1.0 / 1260 +
                         w2 * (-1.0 / 1680 +
                               w2 * (1.0 / 1188 +
                                     w2 * (-691.0 / 360360 + w2 * (1.0 / 156 + w2 * (-3617.0 / 122400))))))));
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series -
           std::log(shift);
}

enum class Kind { Pdf, Cdf };

// Shapes whose difference is this close to an integer share poles.
inline constexpr double coincidence_tol = 1e-7;

inline bool has_coincident_poles(std::span<const double> b) {
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = i + 1; j < b.size(); ++j) {
            const double d = b[i] - b[j];
            if (std::abs(d - std::round(d)) < coincidence_tol) {
                return true;
            }
        }
    }
    return false;
}

inline std::vector<double> perturb_ties(std::span<const double> b, double step = 1e-6) {
    std::vector<double> out(b.begin(), b.end());
    for (std::size_t i = 0; i < b.size(); ++i) {
        int rank = 0;
        for (std::size_t j = 0; j < i; ++j) {
            const double d = b[i] - b[j];
            if (std::abs(d - std::round(d)) < coincidence_tol) {
                ++rank;
            }
        }
        out[i] += step * rank;
    }
    return out;
}

inline double log_gamma_sum(std::span<const double> b) {
    double s = 0.0;
    for (double v : b) {
        s += log_gamma(v);
    }
    return s;
}

struct Attempt {
    std::optional<KernelResult> result;
    std::string diagnostic;
};

// Sum of residues at s = -b_j - k. Everything is scaled by exp(-log_offset).
inline Attempt residue_series(Kind kind, double x, std::span<const double> b, double log_offset,
                              bool enforce_accuracy) {
    constexpr int max_terms = 500;
    const std::size_t M = b.size();
    const double log_x = std::log(x);
    double total = 0.0;
    double magnitude = 0.0;  // sum of |terms|: rounding scale of the cancellation
    double truncation = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        double log_t = b[j] * log_x - log_offset;
        double sign = 1.0;
        for (std::size_t n = 0; n < M; ++n) {
            if (n != j) {
                const SignedLog g = log_abs_gamma(b[n] - b[j]);
                log_t += g.log_abs;
                sign *= g.sign;
            }
        }
        if (log_t > 700.0) {
            return {std::nullopt, "residue series: leading term overflows"};
        }
        double term = sign * std::exp(log_t);  // residue of the pdf integrand
        double family = 0.0;
        int small_run = 0;
        int k = 0;
        for (;; ++k) {
            if (k == max_terms) {
                return {std::nullopt, "residue series: 500-term cap reached"};
            }
            const double contribution = kind == Kind::Pdf ? term : term / (b[j] + k);
            family += contribution;
            magnitude += std::abs(contribution);
            if (contribution == 0.0) {
                break;
            }
            small_run = std::abs(contribution) < 1e-14 * std::abs(family) ? small_run + 1 : 0;
            if (small_run == 3) {
                truncation += std::abs(contribution);
                break;
            }
            double ratio = -x / (k + 1);
            for (std::size_t n = 0; n < M; ++n) {
                if (n != j) {
                    ratio /= (b[n] - b[j] - k - 1);
                }
            }
            term *= ratio;
            if (!std::isfinite(term)) {
                return {std::nullopt, "residue series: term overflow"};
            }
        }
        total += family;
    }
    const double err = 8.0 * eps * magnitude + truncation;
    if (enforce_accuracy && !(err <= 1e-12 * std::abs(total))) {
        std::ostringstream os;
        os << "residue series: cancellation (error estimate " << err << " vs value " << total
           << ")";
        return {std::nullopt, os.str()};
    }
    return {KernelResult{total, err, Backend::ResidueSeries}, {}};
}

enum class Form { Pdf, CdfDirect, CdfSurvival };

struct Contour {
    Form form;
    double c;
    double curvature;  // second derivative of the real log-integrand at c
    double log_peak;   // log-integrand at s = c
    double pole_gap;   // distance from the line to the nearest pole
};

inline double real_log_integrand(Form form, double c, double log_x, std::span<const double> b) {
    double v = -c * log_x;
    for (double m : b) {
        v += log_gamma(m + c);
    }
    if (form != Form::Pdf) {
        v -= std::log(std::abs(c));
    }
    return v;
}

// Real saddle point of the log-integrand on its admissible interval, kept a
// margin away from the poles bounding that interval.
inline Contour place_contour(Form form, double log_x, std::span<const double> b) {
    const double bmin = *std::min_element(b.begin(), b.end());
    const double margin = std::min(0.5 * bmin, 0.2);
    auto slope = [&](double c) {
        double d = -log_x;
        for (double m : b) {
            d += digamma(m + c);
        }
        if (form != Form::Pdf) {
            d -= 1.0 / c;
        }
        return d;
    };
    double lo = 0.0;
    double hi = 0.0;
    switch (form) {
    case Form::Pdf:
        lo = -bmin;
        hi = std::max(1.0, -bmin + 1.0);
        while (slope(hi) < 0.0) {
            hi = 2.0 * hi + 1.0;
        }
        break;
    case Form::CdfDirect:
        lo = -bmin;
        hi = 0.0;
        break;
    case Form::CdfSurvival:
        lo = 0.0;
        hi = 1.0;
        while (slope(hi) < 0.0) {
            hi = 2.0 * hi + 1.0;
        }
        break;
    }
    double a = lo;
    double z = hi;
    for (int it = 0; it < 200 && z - a > 1e-12 * (1.0 + std::abs(z)); ++it) {
        const double mid = 0.5 * (a + z);
        if (mid == a || mid == z) {
            break;
        }
        (slope(mid) < 0.0 ? a : z) = mid;
    }
    double c = 0.5 * (a + z);
    switch (form) {
    case Form::Pdf:
        c = std::max(c, -bmin + margin);
        break;
    case Form::CdfDirect: {
        const double m = std::min(margin, 0.25 * bmin);
        c = std::clamp(c, -bmin + m, -m);
        break;
    }
    case Form::CdfSurvival:
        c = std::max(c, margin);
        break;
    }
    double curvature = 0.0;
    for (double m : b) {
        curvature += trigamma(m + c);
    }
    if (form != Form::Pdf) {
        curvature += 1.0 / (c * c);
    }
    double gap = c + bmin;
    if (form != Form::Pdf) {
        gap = std::min(gap, std::abs(c));
    }
    return {form, c, curvature, real_log_integrand(form, c, log_x, b), gap};
}

inline std::complex<double> log_integrand(Form form, std::complex<double> s, double log_x,
                                          std::span<const double> b) {
    std::complex<double> v = -s * log_x;
    for (double m : b) {
        v += log_gamma_complex(m + s);
    }
    if (form == Form::CdfDirect) {
        v -= std::log(-s);
    } else if (form == Form::CdfSurvival) {
        v -= std::log(s);
    }
    return v;
}

// Trapezoid rule for (1/2 pi) Int g(c + it) dt along the placed contour,
// halving the step until successive sums agree. The result is returned as
// value * exp(log_peak - log_offset).
inline Attempt contour_quadrature(const Contour& contour, double log_x, std::span<const double> b,
                                  double log_offset) {
    constexpr int max_levels = 16;
    constexpr double cutoff = 1e-17;
    auto g = [&](double t) {
        return std::exp(log_integrand(contour.form, {contour.c, t}, log_x, b) - contour.log_peak);
    };
    const double width = 1.0 / std::sqrt(contour.curvature);
    double h = 0.5 * std::min(width, contour.pole_gap);

    // Integrand modulus decreases monotonically in |t|: find the truncation point.
    double t_end = h;
    while (std::abs(g(t_end)) > cutoff) {
        t_end *= 2.0;
        if (t_end > 1e7) {
            return {std::nullopt, "contour quadrature: integrand does not decay"};
        }
    }
    double sum = 0.5;  // g(0) == 1 after scaling
    double abs_sum = 0.5;
    for (double t = h; t <= t_end; t += h) {
        const double v = g(t).real();
        sum += v;
        abs_sum += std::abs(v);
    }
    double estimate = h * sum / std::numbers::pi;
    double diff = std::numeric_limits<double>::infinity();
    for (int level = 0; level < max_levels; ++level) {
        double added = 0.0;
        const double half = 0.5 * h;
        for (double t = half; t <= t_end; t += h) {
            const double v = g(t).real();
            added += v;
            abs_sum += std::abs(v);
        }
        sum += added;
        h = half;
        const double refined = h * sum / std::numbers::pi;
        diff = std::abs(refined - estimate);
        estimate = refined;
        const double floor = 16.0 * eps * h * abs_sum / std::numbers::pi;
        if (level >= 1 && diff <= std::max(1e-12 * std::abs(estimate), floor)) {
            const double scale = std::exp(contour.log_peak - log_offset);
            return {KernelResult{estimate * scale, (diff + floor + cutoff * t_end) * scale,
                                 Backend::ContourQuadrature},
                    {}};
        }
    }
    // A cdf-side integral bounded far below the full mass cannot move the
    // result: report it as zero with the bound as its error.
    if (contour.form != Form::Pdf) {
        const double bound = h * abs_sum / std::numbers::pi * std::exp(contour.log_peak - log_offset);
        if (bound <= eps * std::exp(log_gamma_sum(b) - log_offset)) {
            return {KernelResult{0.0, bound, Backend::ContourQuadrature}, {}};
        }
    }
    std::ostringstream os;
    os << "contour quadrature: step refinement stalled (last difference " << diff << ")";
    return {std::nullopt, os.str()};
}

inline Attempt quadrature_kernel(Kind kind, double x, std::span<const double> b, double log_offset) {
    const double log_x = std::log(x);
    if (kind == Kind::Pdf) {
        return contour_quadrature(place_contour(Form::Pdf, log_x, b), log_x, b, log_offset);
    }
    // Integrate whichever of the cdf and the survival is smaller, take the
    // other by subtraction from the full mass prod Gamma(b).
    const Contour direct = place_contour(Form::CdfDirect, log_x, b);
    const Contour survival = place_contour(Form::CdfSurvival, log_x, b);
    if (direct.log_peak <= survival.log_peak) {
        return contour_quadrature(direct, log_x, b, log_offset);
    }
    Attempt tail = contour_quadrature(survival, log_x, b, log_offset);
    if (tail.result) {
        const double full = std::exp(log_gamma_sum(b) - log_offset);
        tail.result->value = full - tail.result->value;
        tail.result->abs_error_estimate += 4.0 * eps * full;
    }
    return tail;
}

inline KernelResult single_shape(Kind kind, double x, double m, double log_offset) {
    if (kind == Kind::Pdf) {
        const double v = std::exp(m * std::log(x) - x - log_offset);
        return {v, 4.0 * eps * v, Backend::ResidueSeries};
    }
    const double v = lower_regularized_gamma(m, x) * std::exp(log_gamma(m) - log_offset);
    return {v, 1e-14 * v, Backend::ResidueSeries};
}

inline KernelResult evaluate(Kind kind, double x, const ShapeVector& shapes,
                             const KernelOptions& opt, double log_offset) {
    const char* name = kind == Kind::Pdf ? "meijer_pdf_kernel" : "meijer_cdf_kernel";
    nakarate::detail::require(x >= 0.0 && !std::isnan(x), std::string(name) + ": x must be >= 0");
    if (x == 0.0) {
        return {0.0, 0.0, Backend::ResidueSeries};
    }
    if (std::isinf(x)) {
        const double full = kind == Kind::Pdf ? 0.0 : std::exp(log_gamma_sum(shapes.values()) - log_offset);
        return {full, 0.0, Backend::ResidueSeries};
    }
    const std::span<const double> b = shapes.values();
    if (b.size() == 1 && opt.backend != BackendChoice::ContourQuadrature) {
        return single_shape(kind, x, b[0], log_offset);
    }

    std::string diagnostics;
    if (opt.backend == BackendChoice::ResidueSeries) {
        const bool ties = has_coincident_poles(b);
        if (ties && !opt.perturb_ties) {
            throw EvaluationError(std::string(name) +
                                  ": residue series needs pairwise non-coincident poles");
        }
        Attempt a = residue_series(kind, x, ties ? perturb_ties(b) : std::vector<double>(b.begin(), b.end()),
                                   log_offset, false);
        if (!a.result) {
            throw EvaluationError(std::string(name) + ": " + a.diagnostic);
        }
        if (ties) {
            // The jitter biases the value by O(step). A second run at twice
            // the step cancels the linear part and bounds what is left.
            Attempt wide = residue_series(kind, x, perturb_ties(b, 2e-6), log_offset, false);
            if (!wide.result) {
                throw EvaluationError(std::string(name) + ": " + wide.diagnostic);
            }
            const double shift = wide.result->value - a.result->value;
            a.result->value -= shift;
            a.result->abs_error_estimate = 3.0 * a.result->abs_error_estimate +
                                           wide.result->abs_error_estimate + std::abs(shift);
        }
        return *a.result;
    }
    if (opt.backend == BackendChoice::Automatic && !has_coincident_poles(b)) {
        Attempt a = residue_series(kind, x, b, log_offset, true);
        if (a.result) {
            return *a.result;
        }
        diagnostics = a.diagnostic + "; ";
    }
    Attempt q = quadrature_kernel(kind, x, b, log_offset);
    if (!q.result) {
        throw EvaluationError(std::string(name) + ": " + diagnostics + q.diagnostic);
    }
    KernelResult r = *q.result;
    if (kind == Kind::Pdf) {
        r.value = std::max(r.value, 0.0);
    } else {
        const double full = std::exp(log_gamma_sum(b) - log_offset);
        r.value = std::clamp(r.value, 0.0, full);
    }
    return r;
}

} // namespace detail

/// G^{M,0}_{0,M}[x | -; m_1..m_M] for x >= 0 (0 at the origin).
inline KernelResult meijer_pdf_kernel(double x, const ShapeVector& shapes,
                                      const KernelOptions& opt = {}) {
    return detail::evaluate(detail::Kind::Pdf, x, shapes, opt, 0.0);
}

/// G^{M,1}_{1,M+1}[x | 1; m_1..m_M, 0] for x >= 0; ranges over [0, prod Gamma(m_n)].
inline KernelResult meijer_cdf_kernel(double x, const ShapeVector& shapes,
                                      const KernelOptions& opt = {}) {
    return detail::evaluate(detail::Kind::Cdf, x, shapes, opt, 0.0);
}

/// meijer_pdf_kernel / prod Gamma(m_n), computed without forming the product.
inline KernelResult meijer_pdf_kernel_normalized(double x, const ShapeVector& shapes,
                                                 const KernelOptions& opt = {}) {
    return detail::evaluate(detail::Kind::Pdf, x, shapes, opt,
                            detail::log_gamma_sum(shapes.values()));
}

/// meijer_cdf_kernel / prod Gamma(m_n): the cdf of a product of unit-scale
/// Gamma(m_n) variables.
inline KernelResult meijer_cdf_kernel_normalized(double x, const ShapeVector& shapes,
                                                 const KernelOptions& opt = {}) {
    return detail::evaluate(detail::Kind::Cdf, x, shapes, opt,
                            detail::log_gamma_sum(shapes.values()));
}

} // namespace nakarate::specfun

#endif
