#ifndef HEXTREME_DIST_HPP
#define HEXTREME_DIST_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hextreme/error.hpp"
#include "hextreme/hfunc.hpp"
#include "hextreme/kernel.hpp"
#include "hextreme/param.hpp"
#include "hextreme/random.hpp"
#include "hextreme/specfun.hpp"
#include "hextreme/submodel.hpp"

namespace hextreme {

/// A member of the family with its normalizer and log-axis profile computed
/// once. Immutable after construction; safe to share across threads.
class HExtreme {
public:
    explicit HExtreme(const ParamVector& p) : p_(p), closed_(check_and_closed(p)), prof_(p) {
        if (closed_) {
            log_c_ = closed_->log_value;
            method_ = HMethod::closed_form;
        } else {
            log_c_ = prof_.log_total();
            method_ = HMethod::adaptive_quadrature;
        }
    }

    const ParamVector& theta() const noexcept { return p_; }
    double log_normalizer() const noexcept { return log_c_; }
    HMethod normalizer_method() const noexcept { return method_; }
    const KernelProfile& profile() const noexcept { return prof_; }

    double log_pdf(double y) const {
        if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
        return log_kernel(p_, y) - log_c_;
    }
    double pdf(double y) const { return std::exp(log_pdf(y)); }

    double cdf(double x) const {
        if (!(x > 0.0)) return 0.0;
        if (closed_) return detail::closed_form_fraction(*closed_, x, true);
        return std::clamp(prof_.mass_below(std::log(x)) / prof_.total(), 0.0, 1.0);
    }

    /// Survival function 1 - cdf, computed directly for accuracy in the upper tail.
    double sf(double x) const {
        if (!(x > 0.0)) return 1.0;
        if (closed_) return detail::closed_form_fraction(*closed_, x, false);
        return std::clamp(prof_.mass_above(std::log(x)) / prof_.total(), 0.0, 1.0);
    }

    double hazard(double x) const { return pdf(x) / std::max(sf(x), 1e-300); }

    /// cdf at ascending points, sharing the integration between neighbours.
    std::vector<double> cdf_sorted(const std::vector<double>& xs) const {
        std::vector<double> out(xs.size());
        if (closed_) {
            for (std::size_t i = 0; i < xs.size(); ++i) out[i] = cdf(xs[i]);
            return out;
        }
        std::vector<double> ts(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            ts[i] = xs[i] > 0.0 ? std::log(xs[i]) : -std::numeric_limits<double>::infinity();
        }
        const auto m = prof_.mass_below_sorted(ts);
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::clamp(m[i] / prof_.total(), 0.0, 1.0);
        return out;
    }

    double quantile(double prob) const {
        if (!(prob > 0.0 && prob < 1.0)) throw DomainError("quantile: probability must lie in (0, 1)");
        double x = std::exp(prof_.solve_mass_below(prob * prof_.total()));
        if (closed_) {
            // Polish against the exact cdf so quantile and cdf agree to rounding.
            for (int it = 0; it < 3; ++it) {
                const double d = pdf(x);
                if (!(d > 0.0)) break;
                const double r = prob <= 0.5 ? cdf(x) - prob : (1.0 - prob) - sf(x);
                const double next = x - r / d;
                if (!(next > 0.0) || !std::isfinite(next)) break;
                x = next;
            }
        }
        return x;
    }

    /// n draws by inverse transform from the counter stream (seed, stream).
    std::vector<double> sample(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) const {
        if (n == 0) throw DomainError("sample: n must be positive");
        CounterRng rng(seed, stream);
        std::vector<double> out(n);
        for (auto& v : out) v = quantile(rng.uniform());
        return out;
    }

private:
    static std::optional<detail::ClosedForm> check_and_closed(const ParamVector& p) {
        detail::require_h_domain(p, "HExtreme");
        return detail::closed_form(p);
    }

    ParamVector p_;
    std::optional<detail::ClosedForm> closed_;
    KernelProfile prof_;
    double log_c_ = 0.0;
    HMethod method_ = HMethod::adaptive_quadrature;
};

inline double log_pdf(double y, const ParamVector& p) {
    if (!(y > 0.0)) throw DomainError("log_pdf: y must be positive");
    return log_kernel(p, y) - h_full(p).log_value;
}

inline double pdf(double y, const ParamVector& p) { return std::exp(log_pdf(y, p)); }

inline double cdf(double x, const ParamVector& p) {
    if (!(x > 0.0)) throw DomainError("cdf: x must be positive");
    return HExtreme(p).cdf(x);
}

inline double quantile(double prob, const ParamVector& p) { return HExtreme(p).quantile(prob); }

inline std::vector<double> sample(std::size_t n, const ParamVector& p, std::uint64_t seed) {
    return HExtreme(p).sample(n, seed);
}

/// E[Y^r] = H(poly + r) / H(poly).
inline double moment(double r, const ParamVector& p) {
    detail::require_h_domain(p, "moment");
    const ParamVector shifted = p.with_poly_shift(r);
    if (!is_integrable(shifted)) throw DomainError("moment: the moment of this order does not exist");
    return std::exp(h_full(shifted).log_value - h_full(p).log_value);
}

/// Mellin transform E[Y^{s-1}].
inline double mellin(double s, const ParamVector& p) { return moment(s - 1.0, p); }

/// E[log Y] with the bounds 1 - H(poly-1)/H(poly) < xi <= H(poly+1)/H(poly) - 1.
struct LogMoment {
    double value = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
};

inline LogMoment xi_log_moment(const ParamVector& p) {
    detail::require_h_domain(p, "xi_log_moment");
    const KernelProfile prof(p);
    LogMoment out;
    out.value = prof.integrate_weighted([](double t) { return t; }) / prof.total();
    const double log_h = h_full(p).log_value;
    if (is_integrable(p.with_poly_shift(-1.0))) {
        out.lower = 1.0 - std::exp(h_full(p.with_poly_shift(-1.0)).log_value - log_h);
    }
    if (is_integrable(p.with_poly_shift(1.0))) {
        out.upper = std::exp(h_full(p.with_poly_shift(1.0)).log_value - log_h) - 1.0;
    }
    const double slack = 1e-9 * (1.0 + std::fabs(out.value));
    if ((out.lower && !(out.value > *out.lower - slack)) || (out.upper && !(out.value <= *out.upper + slack))) {
        throw NumericError("xi_log_moment: log-moment bounds violated", out.value);
    }
    return out;
}

/// Characteristic function E[exp(i t Y)], integrated on the log axis with
/// each panel cut into pieces of at most half a period. Effort is bounded by
/// requiring |t| * scale <= 1e3, where scale is E[Y] or, without a mean,
/// the 0.999 quantile.
inline std::complex<double> char_fn(double t, const ParamVector& p) {
    if (t == 0.0) {
        detail::require_h_domain(p, "char_fn");
        return {1.0, 0.0};
    }
    const HExtreme d(p);
    const double scale = is_integrable(p.with_poly_shift(1.0)) ? moment(1.0, p) : d.quantile(0.999);
    if (std::fabs(t) * scale > 1e3) {
        throw NumericError("char_fn: |t| beyond the supported oscillation envelope");
    }
    const KernelProfile& prof = d.profile();
    const double half_period = std::numbers::pi / std::fabs(t);
    auto split = [&](double a, double b) {
        std::vector<double> cuts;
        const double ya = std::exp(a), yb = std::exp(b);
        const auto pieces = static_cast<long>(std::ceil((yb - ya) / half_period));
        if (pieces > 200000) throw NumericError("char_fn: too many oscillations to resolve");
        for (long j = 1; j < pieces; ++j) cuts.push_back(std::log(ya + (yb - ya) * j / pieces));
        return cuts;
    };
    auto w = [&](double s) { return std::polar(1.0, t * std::exp(s)); };
    return prof.integrate_weighted_split(w, split, 1e-14) / prof.total();
}

/// Differential entropy split as I1 + I2 + I3 + I4 with
/// I1 = log c, I2 = -poly E[log Y], I3 = rate E[Y], I4 = E[u(Y)].
struct EntropyTerms {
    double value = 0.0;
    double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0;
    bool series_path = false;  ///< natural-power series used for I2 and I4
    bool fallback = false;     ///< series requested but failed; numeric terms used
};

/// -E[log g] by direct quadrature on the log axis.
inline double entropy_numeric(const ParamVector& p) {
    detail::require_h_domain(p, "entropy_numeric");
    const KernelProfile prof(p);
    const double log_c = prof.log_total();
    const double h = prof.integrate_weighted([&](double t) { return log_c - (prof.phi(t) - t); });
    return h / prof.total();
}

inline EntropyTerms entropy_terms(const ParamVector& p) {
    detail::require_h_domain(p, "entropy");
    EntropyTerms e;
    const HValue c = h_full(p);
    e.i1 = c.log_value;
    e.i3 = p.rate == 0.0 ? 0.0 : p.rate * std::exp(h_full(p.with_poly_shift(1.0)).log_value - c.log_value);

    const bool natural = is_natural(p.outer_power) && p.rate > 0.0;
    if (natural) {
        try {
            const HValue d6 = h_dtheta6_series(p);
            if (!(d6.abs_error_estimate <= 1e-10 * (std::fabs(d6.value) + c.value))) {
                throw NumericError("entropy: series error too large");
            }
            e.i2 = -p.poly_exponent * d6.value / c.value;
            const int m = static_cast<int>(p.outer_power);
            double i4 = 0.0;
            for (int k = 0; k <= m; ++k) {
                const double coef = std::exp(ln_binomial(m, k)) * std::pow(p.scale, k) * std::pow(p.shift, m - k);
                if (coef == 0.0) continue;
                i4 += coef * std::exp(h_full(p.with_poly_shift(p.inner_power * k)).log_value - c.log_value);
            }
            e.i4 = i4;
            e.series_path = true;
        } catch (const NumericError&) {
            e.fallback = true;
        }
    }
    if (!e.series_path) {
        const KernelProfile prof(p);
        const double total = prof.total();
        e.i2 = -p.poly_exponent * prof.integrate_weighted([](double t) { return t; }) / total;
        e.i4 = prof.integrate_weighted([&](double t) { return power_term(p, std::exp(t)); }) / total;
    }
    e.value = e.i1 + e.i2 + e.i3 + e.i4;
    return e;
}

inline double entropy(const ParamVector& p) { return entropy_terms(p).value; }

/// Kullback-Leibler divergence D(g_p || g_q) for vectors differing only in
/// rate and poly exponent.
inline double kl_divergence(const ParamVector& p, const ParamVector& q) {
    if (p.scale != q.scale || p.inner_power != q.inner_power || p.shift != q.shift ||
        p.outer_power != q.outer_power) {
        throw DomainError("kl_divergence: vectors must share scale, inner power, shift and outer power");
    }
    detail::require_h_domain(p, "kl_divergence");
    detail::require_h_domain(q, "kl_divergence");
    if (p == q) return 0.0;
    const double log_cp = h_full(p).log_value;
    const double log_cq = h_full(q).log_value;
    double d = log_cq - log_cp;
    if (p.poly_exponent != q.poly_exponent) {
        d += (p.poly_exponent - q.poly_exponent) * xi_log_moment(p).value;
    }
    if (p.rate != q.rate) {
        d += (q.rate - p.rate) * std::exp(h_full(p.with_poly_shift(1.0)).log_value - log_cp);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Shape analysis
// ---------------------------------------------------------------------------

enum class ShapeClass {
    strictly_decreasing,
    unimodal,
    decreasing_increasing_decreasing,
    no_interior_critical_point,
    other,
};

inline std::string_view to_string(ShapeClass c) {
    switch (c) {
        case ShapeClass::strictly_decreasing: return "strictly_decreasing";
        case ShapeClass::unimodal: return "unimodal";
        case ShapeClass::decreasing_increasing_decreasing: return "decreasing_increasing_decreasing";
        case ShapeClass::no_interior_critical_point: return "no_interior_critical_point";
        case ShapeClass::other: return "other";
    }
    return "other";
}

struct ShapeReport {
    ShapeClass shape = ShapeClass::other;
    std::vector<double> critical_points;
};

/// y d/dy log g = poly - rate y - scale inner outer (scale y^inner + shift)^{outer-1} y^inner.
/// Zeros are the critical points of the density.
inline double critical_residual(const ParamVector& p, double y) {
    const double yc = std::pow(y, p.inner_power);
    double tail = 0.0;
    const double lead = p.scale * p.inner_power * p.outer_power;
    if (lead != 0.0) tail = lead * std::pow(p.scale * yc + p.shift, p.outer_power - 1.0) * yc;
    return p.poly_exponent - p.rate * y - tail;
}

/// Counts and locates the critical points by a sign scan of the residual on a
/// log grid (wide fixed window, plus the central quantile window when the
/// density normalizes), then bisects each bracket.
inline ShapeReport shape_classify(const ParamVector& p) {
    for (std::size_t i = 0; i < 6; ++i) {
        if (!std::isfinite(p[i])) throw DomainError("shape_classify: non-finite parameter");
    }
    std::vector<double> ts;
    for (int i = 0; i <= 4096; ++i) ts.push_back(-45.0 + 90.0 * i / 4096.0);
    if (is_integrable(p)) {
        try {
            const HExtreme d(p);
            const double lo = std::log(d.quantile(1e-6));
            const double hi = std::log(d.quantile(1.0 - 1e-6));
            for (int i = 0; i < 512; ++i) ts.push_back(lo + (hi - lo) * i / 511.0);
        } catch (const NumericError&) {
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    auto r = [&](double t) { return critical_residual(p, std::exp(t)); };
    ShapeReport rep;
    std::vector<int> signs;
    double prev_t = ts.front();
    double prev_r = r(prev_t);
    int first_sign = 0;
    for (double t : ts) {
        const double v = r(t);
        if (!std::isfinite(v)) {
            prev_t = t;
            prev_r = v;
            continue;
        }
        const int s = (v > 0.0) - (v < 0.0);
        if (first_sign == 0 && s != 0) first_sign = s;
        if (std::isfinite(prev_r) && ((prev_r < 0.0 && v > 0.0) || (prev_r > 0.0 && v < 0.0))) {
            double a = prev_t, b = t, fa = prev_r;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
                const double m = 0.5 * (a + b);
                const double fm = r(m);
                if ((fm < 0.0) == (fa < 0.0)) { a = m; fa = fm; } else { b = m; }
            }
            rep.critical_points.push_back(std::exp(0.5 * (a + b)));
        }
        prev_t = t;
        prev_r = v;
    }
    const std::size_t n = rep.critical_points.size();
    if (n == 0) {
        rep.shape = first_sign > 0 ? ShapeClass::no_interior_critical_point : ShapeClass::strictly_decreasing;
    } else if (n == 1 && first_sign > 0) {
        rep.shape = ShapeClass::unimodal;
    } else if (n == 2 && first_sign < 0) {
        rep.shape = ShapeClass::decreasing_increasing_decreasing;
    } else {
        rep.shape = ShapeClass::other;
    }
    return rep;
}

namespace detail {

// Truncated power series helpers (coefficient vectors in h).
inline std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; i + j < c.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// a(h)^alpha for a[0] != 0 by the J.C.P. Miller recurrence.
inline std::vector<double> series_pow(const std::vector<double>& a, double alpha) {
    std::vector<double> f(a.size(), 0.0);
    f[0] = std::pow(a[0], alpha);
    for (std::size_t k = 1; k < a.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += ((alpha + 1.0) * j - k) * a[j] * f[k - j];
        f[k] = s / (k * a[0]);
    }
    return f;
}

}  // namespace detail

struct LagrangeSeries {
    double value = 0.0;
    double last_term = 0.0;  ///< size of the final correction, a remainder proxy
};

/// Lagrange inversion of y = chi + delta phi(y) with chi = poly/rate,
/// delta = -scale inner outer / rate, phi(y) = (scale y^inner + shift)^{outer-1} y^inner:
///   y = chi + sum_{n=1..terms} delta^n / n [h^{n-1}] phi(chi + h)^n.
inline LagrangeSeries lagrange_mode_series_detail(const ParamVector& p, int terms) {
    if (terms < 1) throw DomainError("lagrange_mode_series: terms must be positive");
    if (!(p.rate > 0.0) || !(p.poly_exponent > 0.0)) {
        throw DomainError("lagrange_mode_series: needs rate > 0 and poly exponent > 0");
    }
    const double chi = p.poly_exponent / p.rate;
    const double delta = -p.scale * p.inner_power * p.outer_power / p.rate;
    if (delta == 0.0) return {chi, 0.0};

    const std::size_t len = static_cast<std::size_t>(terms);
    // (chi + h)^inner = chi^inner sum_j binom(inner, j) (h/chi)^j
    std::vector<double> b(len, 0.0);
    double coef = std::pow(chi, p.inner_power);
    for (std::size_t j = 0; j < len; ++j) {
        b[j] = coef;
        coef *= (p.inner_power - static_cast<double>(j)) / ((j + 1.0) * chi);
    }
    std::vector<double> a(len);
    for (std::size_t j = 0; j < len; ++j) a[j] = p.scale * b[j] + (j == 0 ? p.shift : 0.0);
    if (!(a[0] != 0.0) || (a[0] < 0.0 && !is_natural(p.outer_power))) {
        throw NumericError("lagrange_mode_series: power base vanishes or is negative at chi");
    }
    const std::vector<double> phi = detail::series_mul(detail::series_pow(a, p.outer_power - 1.0), b);
    if (len > 1 && std::fabs(delta * phi[1]) >= 1.0) {
        throw NumericError("lagrange_mode_series: no contraction near chi (|delta phi'| >= 1)");
    }

    double y = chi;
    double last = 0.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    int growth = 0;
    double dn = 1.0;
    for (int n = 1; n <= terms; ++n) {
        dn *= delta;
        const std::vector<double> pn = detail::series_pow(phi, static_cast<double>(n));
        const double term = dn / n * pn[static_cast<std::size_t>(n - 1)];
        if (!std::isfinite(term)) throw NumericError("lagrange_mode_series: non-finite term", y);
        y += term;
        last = term;
        const double mag = std::fabs(term);
        growth = (n > 1 && mag > prev_mag) ? growth + 1 : 0;
        if (growth >= 3) throw NumericError("lagrange_mode_series: terms grow, series diverges", y);
        prev_mag = mag;
    }
    return {y, std::fabs(last)};
}

inline double lagrange_mode_series(const ParamVector& p, int terms) {
    return lagrange_mode_series_detail(p, terms).value;
}

// ---------------------------------------------------------------------------
// Exponential-family form (inner power 1, natural outer power m)
// ---------------------------------------------------------------------------

/// log g(y) = sum_j natural[j] T_j(y) + log_normalizer with statistics
/// T_j = y^j (j = 0..m), T_{m+1} = y, T_{m+2} = log y.
struct ExpFamilyRep {
    int m = 1;
    std::vector<double> natural;
    double log_normalizer = 0.0;  ///< -log c

    std::vector<double> statistics(double y) const {
        std::vector<double> t(static_cast<std::size_t>(m) + 3);
        double pw = 1.0;
        for (int j = 0; j <= m; ++j) {
            t[static_cast<std::size_t>(j)] = pw;
            pw *= y;
        }
        t[static_cast<std::size_t>(m) + 1] = y;
        t[static_cast<std::size_t>(m) + 2] = std::log(y);
        return t;
    }

    double log_density(double y) const {
        const auto t = statistics(y);
        double s = log_normalizer;
        for (std::size_t j = 0; j < t.size(); ++j) s += natural[j] * t[j];
        return s;
    }
};

inline ExpFamilyRep exp_family_rep(const ParamVector& p) {
    if (p.inner_power != 1.0 || !is_natural(p.outer_power)) {
        throw DomainError("exp_family_rep: needs inner power 1 and a natural outer power");
    }
    ExpFamilyRep rep;
    rep.m = static_cast<int>(p.outer_power);
    rep.natural.assign(static_cast<std::size_t>(rep.m) + 3, 0.0);
    for (int j = 0; j <= rep.m; ++j) {
        rep.natural[static_cast<std::size_t>(j)] =
            -std::exp(ln_binomial(rep.m, j)) * std::pow(p.scale, j) * std::pow(p.shift, rep.m - j);
    }
    rep.natural[static_cast<std::size_t>(rep.m) + 1] = -p.rate;
    rep.natural[static_cast<std::size_t>(rep.m) + 2] = p.poly_exponent;
    rep.log_normalizer = -h_full(p).log_value;
    return rep;
}

// ---------------------------------------------------------------------------
// Mixtures
// ---------------------------------------------------------------------------

struct MixtureComponent {
    double weight;
    ParamVector theta;
};

/// Finite mixture. Weights must be nonnegative and sum to one unless
/// `signed_weights` is set, which admits externally supplied signed
/// decompositions (still summing to one).
struct MixtureModel {
    std::vector<MixtureComponent> components;
    bool signed_weights = false;

    void validate() const {
        if (components.empty()) throw DomainError("MixtureModel: no components");
        double s = 0.0;
        for (const auto& c : components) {
            if (!signed_weights && !(c.weight >= 0.0)) throw DomainError("MixtureModel: negative weight");
            if (!is_integrable(c.theta)) throw DomainError("MixtureModel: invalid component");
            s += c.weight;
        }
        if (std::fabs(s - 1.0) > 1e-12) throw DomainError("MixtureModel: weights must sum to one");
    }
};

inline double mixture_pdf(const MixtureModel& mix, double y) {
    mix.validate();
    double s = 0.0;
    for (const auto& c : mix.components) {
        if (c.weight != 0.0) s += c.weight * pdf(y, c.theta);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Gumbel limit and the signed series representation
// ---------------------------------------------------------------------------

/// Sup-norm distance on a fixed positive grid between the Gumbel(alpha, beta)
/// density and e^{alpha/beta} k(y) / beta, where k is the kernel at
/// (1/beta, -1/(beta n), 1, 1 + alpha/(beta n), n, 0) and (1 + z/n)^n -> e^z.
inline double gumbel_limit_check(double alpha, double beta, int n) {
    if (!(beta > 0.0)) throw DomainError("gumbel_limit_check: beta must be positive");
    if (n < 4 || n % 2 != 0) throw DomainError("gumbel_limit_check: n must be even and at least 4");
    const ParamVector p(1.0 / beta, -1.0 / (beta * n), 1.0, 1.0 + alpha / (beta * n), n, 0.0);
    const double span = std::fabs(alpha) + 10.0 * beta;
    double sup = 0.0;
    for (int i = 1; i <= 200; ++i) {
        const double y = span * i / 200.0;
        const double approx = std::exp(alpha / beta + log_kernel(p, y)) / beta;
        const double z = (y - alpha) / beta;
        const double exact = std::exp(-z - std::exp(-z)) / beta;
        if (!std::isfinite(approx)) throw NumericError("gumbel_limit_check: overflow in the power path");
        sup = std::max(sup, std::fabs(approx - exact));
    }
    return sup;
}

/// CDF through the signed series representation
///   G(y) = Gamma(poly+1) / (c rate^{poly+1}) sum_k (-1)^k / k! E[(scale Z^inner + shift)^{k m} 1{Z <= y}]
/// with Z ~ Gamma(poly + 1, rate). For natural m each expectation expands into
/// truncated gamma moments E[Z^a 1{Z <= y}] = P(poly+1+a, rate y) Gamma(poly+1+a) / (Gamma(poly+1) rate^a).
inline double representation_cdf(double y, const ParamVector& p) {
    if (!(y > 0.0)) throw DomainError("representation_cdf: y must be positive");
    if (!is_natural(p.outer_power) || !(p.rate > 0.0) || !(p.poly_exponent > -1.0)) {
        throw DomainError("representation_cdf: needs natural outer power, rate > 0, poly > -1");
    }
    if (p.scale != 0.0 && p.inner_power < 0.0) throw DomainError("representation_cdf: needs inner power >= 0");
    const int m = static_cast<int>(p.outer_power);
    const double a0 = p.poly_exponent + 1.0;
    const double z = p.rate * y;
    // log E[Z^a 1{Z <= y}] relative to the gamma normalizer
    auto log_trunc_moment = [&](double a) {
        return ln_incomplete_gamma_lower(a0 + a, z) - ln_gamma(a0) - a * std::log(p.rate);
    };
    double sum = 0.0, comp = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    int quiet = 0;
    for (int k = 0; k <= 400; ++k) {
        const int km = k * m;
        double ek = 0.0;
        for (int j = 0; j <= km; ++j) {
            const double c = std::exp(ln_binomial(km, j)) * std::pow(p.scale, j) * std::pow(p.shift, km - j);
            if (c == 0.0) continue;
            ek += c * std::exp(log_trunc_moment(p.inner_power * j));
        }
        const double term = ((k % 2) ? -1.0 : 1.0) * std::exp(std::log(std::fabs(ek)) - ln_gamma(k + 1.0)) *
                            (ek < 0.0 ? -1.0 : 1.0);
        if (!std::isfinite(term)) throw NumericError("representation_cdf: non-finite term", sum);
        const double t = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        const double mag = std::fabs(term);
        if (k > 0 && mag <= 1e-16 * std::fabs(sum + comp) && mag <= prev) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        prev = mag;
        if (ek == 0.0 && k > 0) break;
        if (k == 400) throw NumericError("representation_cdf: series did not settle", sum + comp);
    }
    const double log_front = ln_gamma(a0) - a0 * std::log(p.rate) - h_full(p).log_value;
    return std::exp(log_front) * (sum + comp);
}

}  // namespace hextreme

#endif  // HEXTREME_DIST_HPP
