#ifndef HEXTREME_HFUNC_HPP
#define HEXTREME_HFUNC_HPP

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hextreme/error.hpp"
#include "hextreme/kernel.hpp"
#include "hextreme/param.hpp"
#include "hextreme/specfun.hpp"

namespace hextreme {

enum class HMethod { closed_form, series_m, laguerre_quadrature, adaptive_quadrature };

inline std::string_view to_string(HMethod m) {
    switch (m) {
        case HMethod::closed_form: return "closed_form";
        case HMethod::series_m: return "series_m";
        case HMethod::laguerre_quadrature: return "laguerre_quadrature";
        case HMethod::adaptive_quadrature: return "adaptive_quadrature";
    }
    return "adaptive_quadrature";
}

/// One evaluation of the H-function. `value` may overflow for extreme
/// parameters; `log_value` is always reliable.
struct HValue {
    double value = 0.0;
    double log_value = -std::numeric_limits<double>::infinity();
    HMethod method = HMethod::adaptive_quadrature;
    double abs_error_estimate = 0.0;

    static HValue from_log(double log_value, HMethod method, double rel_error) {
        HValue h;
        h.log_value = log_value;
        h.value = std::exp(log_value);
        h.method = method;
        h.abs_error_estimate = std::fabs(h.value) * rel_error;
        return h;
    }
};

/// `automatic` tries closed form, the natural-power series, Laguerre
/// quadrature and adaptive quadrature in turn; `fast` skips the middle two.
enum class HStrategy { automatic, fast };

struct HOptions {
    HStrategy strategy = HStrategy::automatic;
    int laguerre_order = kDefaultLaguerreOrder;
};

namespace detail {

inline void require_h_domain(const ParamVector& p, std::string_view where) {
    if (is_integrable(p)) return;
    std::string msg(where);
    if (in_parameter_space(p)) {
        throw NumericError(msg + ": integral diverges for this parameter vector");
    }
    throw DomainError(msg + ": parameter vector outside the valid region");
}

// Closed-form normalizers. Each case also reports how the incomplete integral
// maps onto a regularized incomplete gamma function: H(x) = H * P(s, z(x)) when
// `lower`, H * Q(s, z(x)) otherwise, with z(x) = scale_z * x^power_z.
struct ClosedForm {
    double log_value;
    double s;
    double scale_z;
    double power_z;
    bool lower;
};

inline std::optional<ClosedForm> closed_form(const ParamVector& p) {
    const double a = p.poly_exponent + 1.0;
    if (p.scale == 0.0 || p.inner_power == 0.0 || p.outer_power == 0.0) {
        if (!(p.rate > 0.0) || !(a > 0.0)) return std::nullopt;
        const double u0 = power_term_from(p, 1.0);
        return ClosedForm{-u0 + ln_gamma(a) - a * std::log(p.rate), a, p.rate, 1.0, true};
    }
    if (p.inner_power * p.outer_power == 1.0 && p.shift == 0.0) {
        const double r = p.rate + std::pow(p.scale, p.outer_power);
        if (!(r > 0.0) || !(a > 0.0)) return std::nullopt;
        return ClosedForm{ln_gamma(a) - a * std::log(r), a, r, 1.0, true};
    }
    if (p.inner_power == 1.0 && p.outer_power == 1.0) {
        const double r = p.rate + p.scale;
        if (!(r > 0.0) || !(a > 0.0)) return std::nullopt;
        return ClosedForm{-p.shift + ln_gamma(a) - a * std::log(r), a, r, 1.0, true};
    }
    if (p.rate == 0.0 && (p.shift == 0.0 || p.outer_power == 1.0)) {
        // int y^{a-1} exp(-lambda y^q) dy = Gamma(a/q) / (|q| lambda^{a/q})
        const double q = p.outer_power == 1.0 ? p.inner_power : p.inner_power * p.outer_power;
        const double lambda = p.outer_power == 1.0 ? p.scale : std::pow(p.scale, p.outer_power);
        const double offset = p.outer_power == 1.0 ? p.shift : 0.0;
        const double s = a / q;
        if (!(lambda > 0.0) || !(s > 0.0)) return std::nullopt;
        return ClosedForm{-offset + ln_gamma(s) - std::log(std::fabs(q)) - s * std::log(lambda), s,
                          lambda, q, q > 0.0};
    }
    return std::nullopt;
}

// Ratio P(s, z) or Q(s, z) of a closed form at upper limit x.
inline double closed_form_fraction(const ClosedForm& cf, double x, bool below) {
    const double z = cf.scale_z * std::pow(x, cf.power_z);
    const bool use_p = cf.lower == below;
    if (!(z > 0.0)) return use_p ? 0.0 : 1.0;
    if (!std::isfinite(z)) return use_p ? 1.0 : 0.0;
    return use_p ? gamma_p(cf.s, z) : gamma_q(cf.s, z);
}

// Natural-power double series
//   sum_n (-1)^n / n! sum_k C(mn, k) scale^k shift^{mn-k} G(poly + 1 + inner*k)
// where G(a) is supplied as (log|G(a)|, sign). Terms are formed in log space.
template <class G>
HValue natural_power_series(const ParamVector& p, G&& gamma_part, std::string_view where) {
    const double m = p.outer_power;
    if (!is_natural(m)) throw DomainError(std::string(where) + ": outer power must be a natural number");
    if (!(p.rate > 0.0)) throw DomainError(std::string(where) + ": rate must be positive");
    if (p.scale != 0.0 && p.inner_power < 0.0) {
        throw NumericError(std::string(where) + ": series terms diverge for negative inner power");
    }
    if (!(p.poly_exponent > -1.0)) {
        throw NumericError(std::string(where) + ": series terms diverge for poly exponent <= -1");
    }
    constexpr int kMaxOuter = 200;
    const double log_b = p.scale == 0.0 ? 0.0 : std::log(std::fabs(p.scale));
    const double log_d = p.shift == 0.0 ? 0.0 : std::log(std::fabs(p.shift));
    const int sign_b = p.scale < 0.0 ? -1 : 1;
    const int sign_d = p.shift < 0.0 ? -1 : 1;

    double sum = 0.0;
    double comp = 0.0;  // Neumaier compensation
    double abs_sum = 0.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    int quiet = 0;
    std::vector<double> logs;
    std::vector<int> signs;
    for (int n = 0; n <= kMaxOuter; ++n) {
        const int mn = static_cast<int>(m) * n;
        int k_lo = 0, k_hi = mn;
        if (p.shift == 0.0) k_lo = mn;
        if (p.scale == 0.0) k_hi = 0;
        if (k_lo > k_hi) {
            // scale = shift = 0: only the n = 0 term survives.
            if (n > 0) break;
            k_lo = k_hi = 0;
        }
        logs.clear();
        signs.clear();
        double lmax = -std::numeric_limits<double>::infinity();
        for (int k = k_lo; k <= k_hi; ++k) {
            const auto [lg, sg] = gamma_part(p.poly_exponent + 1.0 + p.inner_power * k);
            if (sg == 0) continue;
            const double l = ln_binomial(mn, k) + k * log_b + (mn - k) * log_d + lg -
                             ln_gamma(n + 1.0);
            int s = sg * ((n % 2) ? -1 : 1);
            if (sign_b < 0 && (k % 2)) s = -s;
            if (sign_d < 0 && ((mn - k) % 2)) s = -s;
            logs.push_back(l);
            signs.push_back(s);
            lmax = std::max(lmax, l);
        }
        if (logs.empty()) continue;
        if (!std::isfinite(lmax) || lmax > 700.0) {
            throw NumericError(std::string(where) + ": series terms overflow (divergent regime)", sum + comp);
        }
        double inner = 0.0, inner_abs = 0.0;
        for (std::size_t j = 0; j < logs.size(); ++j) {
            const double v = std::exp(logs[j] - lmax);
            inner += signs[j] * v;
            inner_abs += v;
        }
        const double term = std::exp(lmax) * inner;
        abs_sum += std::exp(lmax) * inner_abs;
        const double t = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        const double mag = std::exp(lmax) * inner_abs;
        const double total = sum + comp;
        if (n > 0 && mag <= 1e-14 * std::fabs(total) && mag <= prev_mag) {
            if (++quiet >= 3) {
                const double err = 64.0 * std::numeric_limits<double>::epsilon() * abs_sum + mag;
                HValue h;
                h.value = total;
                h.log_value = total > 0.0 ? std::log(total) : std::numeric_limits<double>::quiet_NaN();
                h.method = HMethod::series_m;
                h.abs_error_estimate = err;
                return h;
            }
        } else {
            quiet = 0;
        }
        prev_mag = mag;
        if (p.shift == 0.0 && p.scale == 0.0) break;
    }
    if (p.shift == 0.0 && p.scale == 0.0) {
        const double total = sum + comp;
        HValue h;
        h.value = total;
        h.log_value = std::log(total);
        h.method = HMethod::series_m;
        return h;
    }
    throw NumericError(std::string(where) + ": series did not converge within 200 outer terms", sum + comp);
}

inline HValue h_adaptive(const ParamVector& p) {
    const KernelProfile prof(p);
    HValue h;
    h.log_value = prof.log_total();
    h.value = std::exp(h.log_value);
    h.method = HMethod::adaptive_quadrature;
    h.abs_error_estimate = std::exp(prof.log_peak()) * prof.abs_error();
    return h;
}

// Generalized Gauss-Laguerre evaluation of rate^{-(poly+1)} sum_j w_j exp(-u(x_j/rate)),
// returned as a log value.
inline double laguerre_log_sum(const ParamVector& p, const QuadratureRule& rule) {
    double lmax = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(rule.nodes().size());
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const double y = rule.nodes()[j] / p.rate;
        terms[j] = rule.log_weights()[j] - power_term(p, y);
        if (std::isnan(terms[j])) terms[j] = -std::numeric_limits<double>::infinity();
        lmax = std::max(lmax, terms[j]);
    }
    if (!std::isfinite(lmax)) return lmax;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - lmax);
    return lmax + std::log(s) - (p.poly_exponent + 1.0) * std::log(p.rate);
}

}  // namespace detail

/// Generalized Gauss-Laguerre approximation of H, accepted only when the
/// order-N and order-2N rules agree to 1e-12 relative.
inline std::optional<HValue> h_laguerre(const ParamVector& p, int order = kDefaultLaguerreOrder) {
    if (!(p.rate > 0.0) || !(p.poly_exponent > -1.0)) return std::nullopt;
    const int hi_order = std::min(2 * order, kMaxLaguerreOrder);
    if (hi_order <= order) return std::nullopt;
    const double l1 = detail::laguerre_log_sum(p, gauss_laguerre_rule(order, p.poly_exponent));
    const double l2 = detail::laguerre_log_sum(p, gauss_laguerre_rule(hi_order, p.poly_exponent));
    if (!std::isfinite(l1) || !std::isfinite(l2)) return std::nullopt;
    const double rel = std::fabs(std::expm1(l1 - l2));
    if (rel > 1e-12) return std::nullopt;
    return HValue::from_log(l2, HMethod::laguerre_quadrature, std::max(rel, 1e-15));
}

/// The natural-power series for H (outer power m in N, rate > 0). Converges
/// when inner_power * m < 1, or = 1 with |scale| < rate; otherwise the terms
/// grow and a NumericError carrying the partial sum is thrown.
/// For m = 1 the shift factor exp(-shift) is pulled out exactly, and with
/// inner power 1 the scale folds into the rate, leaving a single term.
inline HValue h_series_m(const ParamVector& p) {
    ParamVector q = p;
    double log_factor = 0.0;
    if (p.outer_power == 1.0) {
        log_factor = -p.shift;
        q.shift = 0.0;
        if (p.inner_power == 1.0) {
            q.rate = p.rate + p.scale;
            q.scale = 0.0;
        }
    }
    const double log_rate = q.rate > 0.0 ? std::log(q.rate) : 0.0;
    auto part = [&](double a) -> std::pair<double, int> {
        if (!(a > 0.0)) throw NumericError("h_series_m: gamma argument not positive");
        return {ln_gamma(a) - a * log_rate, 1};
    };
    HValue h = detail::natural_power_series(q, part, "h_series_m");
    if (!(h.value > 0.0) || h.abs_error_estimate > 1e-4 * h.value) {
        throw NumericError("h_series_m: cancellation destroyed the sum", h.value);
    }
    if (log_factor != 0.0) {
        const double f = std::exp(log_factor);
        h.value *= f;
        h.log_value += log_factor;
        h.abs_error_estimate *= f;
    }
    return h;
}

/// Complete H-function: the normalizing constant of the density.
inline HValue h_full(const ParamVector& p, const HOptions& opts = {}) {
    detail::require_h_domain(p, "h_full");
    if (auto cf = detail::closed_form(p)) {
        return HValue::from_log(cf->log_value, HMethod::closed_form, 1e-14);
    }
    if (opts.strategy == HStrategy::automatic) {
        const bool series_ok = is_natural(p.outer_power) && p.rate > 0.0 &&
                               p.inner_power >= 0.0 && p.inner_power * p.outer_power < 1.0;
        if (series_ok) {
            try {
                HValue h = h_series_m(p);
                if (h.abs_error_estimate <= 1e-13 * h.value) return h;
            } catch (const NumericError&) {
            }
        }
        if (auto lag = h_laguerre(p, opts.laguerre_order)) return *lag;
    }
    return detail::h_adaptive(p);
}

/// Incomplete H-function: the kernel integral over (0, x).
inline HValue h_incomplete(double x, const ParamVector& p) {
    if (!(x > 0.0)) throw DomainError("h_incomplete: x must be positive");
    detail::require_h_domain(p, "h_incomplete");
    if (auto cf = detail::closed_form(p)) {
        const double frac = detail::closed_form_fraction(*cf, x, true);
        return HValue::from_log(cf->log_value + std::log(frac), HMethod::closed_form, 1e-13);
    }
    const KernelProfile prof(p);
    const double m = prof.mass_below(std::log(x));
    HValue h = HValue::from_log(prof.log_peak() + std::log(m), HMethod::adaptive_quadrature, 0.0);
    h.abs_error_estimate = std::exp(prof.log_peak()) * prof.abs_error();
    return h;
}

/// Tail integral over (x, inf).
inline HValue h_tail(double x, const ParamVector& p) {
    if (!(x > 0.0)) throw DomainError("h_tail: x must be positive");
    detail::require_h_domain(p, "h_tail");
    if (auto cf = detail::closed_form(p)) {
        const double frac = detail::closed_form_fraction(*cf, x, false);
        return HValue::from_log(cf->log_value + std::log(frac), HMethod::closed_form, 1e-13);
    }
    const KernelProfile prof(p);
    const double m = std::max(prof.mass_above(std::log(x)), 0.0);
    HValue h = HValue::from_log(prof.log_peak() + std::log(m), HMethod::adaptive_quadrature, 0.0);
    h.abs_error_estimate = std::exp(prof.log_peak()) * prof.abs_error();
    return h;
}

/// Natural-power series for the incomplete function, with gamma(a, rate*x)
/// in place of Gamma(a). Converges for every x but may lose digits to
/// cancellation when scale*x^inner + shift is large.
inline HValue h_incomplete_series(double x, const ParamVector& p) {
    if (!(x > 0.0)) throw DomainError("h_incomplete_series: x must be positive");
    const double log_rate = p.rate > 0.0 ? std::log(p.rate) : 0.0;
    const double z = p.rate * x;
    auto part = [&](double a) -> std::pair<double, int> {
        if (!(a > 0.0)) throw NumericError("h_incomplete_series: gamma argument not positive");
        return {ln_incomplete_gamma_lower(a, z) - a * log_rate, 1};
    };
    return detail::natural_power_series(p, part, "h_incomplete_series");
}

/// d H / d poly_exponent = integral of log(y) times the kernel.
inline double h_dtheta6(const ParamVector& p) {
    detail::require_h_domain(p, "h_dtheta6");
    const KernelProfile prof(p);
    return std::exp(prof.log_peak()) * prof.integrate_weighted([](double t) { return t; });
}

/// Series form of d H / d poly_exponent with Gamma(a) (Psi(a) - log rate) terms.
inline HValue h_dtheta6_series(const ParamVector& p) {
    const double log_rate = p.rate > 0.0 ? std::log(p.rate) : 0.0;
    auto part = [&](double a) -> std::pair<double, int> {
        if (!(a > 0.0)) throw NumericError("h_dtheta6_series: gamma argument not positive");
        const double f = digamma(a) - log_rate;
        if (f == 0.0) return {0.0, 0};
        return {ln_gamma(a) - a * log_rate + std::log(std::fabs(f)), f > 0.0 ? 1 : -1};
    };
    return detail::natural_power_series(p, part, "h_dtheta6_series");
}

/// d H / d outer_power = -integral of u log(base) times the kernel, where
/// u = base^outer. Uses the Laguerre form when it is accurate, otherwise
/// adaptive quadrature. Requires a positive base on (0, inf).
inline double h_dtheta5(const ParamVector& p, int order = kDefaultLaguerreOrder) {
    detail::require_h_domain(p, "h_dtheta5");
    if (p.scale < 0.0 || p.shift < 0.0) {
        throw DomainError("h_dtheta5: derivative undefined where the power base is negative");
    }
    auto weight_y = [&](double y) {
        const double base = (p.scale == 0.0 ? 0.0 : p.scale * std::pow(y, p.inner_power)) + p.shift;
        if (!(base > 0.0)) return 0.0;
        const double u = std::pow(base, p.outer_power);
        return -u * std::log(base);
    };
    // The rule is trusted only where it also resolves the kernel itself; when
    // every node lands in the underflow region both orders agree on zero.
    if (h_laguerre(p, order).has_value()) {
        auto lag = [&](int n) {
            const auto rule = gauss_laguerre_rule(n, p.poly_exponent);
            double s = 0.0;
            for (std::size_t j = 0; j < rule.nodes().size(); ++j) {
                const double y = rule.nodes()[j] / p.rate;
                const double e = rule.log_weights()[j] - power_term(p, y);
                if (e > -745.0) s += std::exp(e) * weight_y(y);
            }
            return s * std::exp(-(p.poly_exponent + 1.0) * std::log(p.rate));
        };
        const int hi = std::min(2 * order, kMaxLaguerreOrder);
        const double a = lag(order);
        const double b = lag(hi);
        const double scale = std::fabs(b) + h_full(p, {HStrategy::fast}).value * 1e-3;
        if (std::isfinite(a) && std::isfinite(b) && std::fabs(a - b) <= 1e-11 * scale) return b;
    }
    const KernelProfile prof(p);
    return std::exp(prof.log_peak()) *
           prof.integrate_weighted([&](double t) { return weight_y(std::exp(t)); });
}

/// Gradient of the normalizer c = H with respect to the six parameters, for a
/// natural outer power m and positive rate:
///   d1 = -H(poly+1)
///   d2 = -m sum_k C(m-1,k) scale^k shift^{m-1-k} H(poly + inner(k+1))
///   d3 = -m scale sum_k C(m-1,k) scale^k shift^{m-1-k} dH6(poly + inner(k+1))
///   d4 = -m sum_k C(m-1,k) scale^k shift^{m-1-k} H(poly + inner k)
///   d5 = -int u log(base) kernel,   d6 = int log(y) kernel.
inline std::array<double, 6> h_partials(const ParamVector& p) {
    if (!is_natural(p.outer_power)) throw DomainError("h_partials: outer power must be a natural number");
    if (!(p.rate > 0.0)) throw DomainError("h_partials: rate must be positive");
    detail::require_h_domain(p, "h_partials");
    const int m = static_cast<int>(p.outer_power);
    const HOptions fast{HStrategy::fast};
    auto H = [&](double shift6) { return h_full(p.with_poly_shift(shift6), fast).value; };

    std::array<double, 6> d{};
    d[0] = -H(1.0);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (int k = 0; k <= m - 1; ++k) {
        const double coef = std::exp(ln_binomial(m - 1, k)) * std::pow(p.scale, k) *
                            std::pow(p.shift, m - 1 - k);
        if (coef == 0.0) continue;
        const double up = p.inner_power * (k + 1);
        s2 += coef * H(up);
        s3 += coef * h_dtheta6(p.with_poly_shift(up));
        s4 += coef * H(p.inner_power * k);
    }
    d[1] = -m * s2;
    d[2] = -m * p.scale * s3;
    d[3] = -m * s4;
    d[4] = (p.scale < 0.0 || p.shift < 0.0) ? std::numeric_limits<double>::quiet_NaN() : h_dtheta5(p);
    d[5] = h_dtheta6(p);
    return d;
}

}  // namespace hextreme

#endif  // HEXTREME_HFUNC_HPP
