#ifndef HEXTREME_PARAM_HPP
#define HEXTREME_PARAM_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>

#include "hextreme/error.hpp"

namespace hextreme {

/// The six shape parameters of the kernel
///   y^poly_exponent * exp(-rate*y - (scale*y^inner_power + shift)^outer_power).
/// Index order 0..5 is (rate, scale, inner_power, shift, outer_power,
/// poly_exponent), matching the conventional (theta1, ..., theta6) listing.
struct ParamVector {
    double rate = 1.0;
    double scale = 0.0;
    double inner_power = 1.0;
    double shift = 0.0;
    double outer_power = 1.0;
    double poly_exponent = 0.0;

    static constexpr std::size_t size() { return 6; }

    constexpr ParamVector() = default;
    constexpr ParamVector(double t1, double t2, double t3, double t4, double t5, double t6)
        : rate(t1), scale(t2), inner_power(t3), shift(t4), outer_power(t5), poly_exponent(t6) {}
    explicit constexpr ParamVector(const std::array<double, 6>& a)
        : ParamVector(a[0], a[1], a[2], a[3], a[4], a[5]) {}

    double& operator[](std::size_t i) {
        switch (i) {
            case 0: return rate;
            case 1: return scale;
            case 2: return inner_power;
            case 3: return shift;
            case 4: return outer_power;
            case 5: return poly_exponent;
            default: throw DomainError("ParamVector index out of range");
        }
    }
    double operator[](std::size_t i) const { return const_cast<ParamVector&>(*this)[i]; }

    std::array<double, 6> to_array() const {
        return {rate, scale, inner_power, shift, outer_power, poly_exponent};
    }

    /// Same vector with poly_exponent shifted by `r` (moments, Mellin transform).
    ParamVector with_poly_shift(double r) const {
        ParamVector p = *this;
        p.poly_exponent += r;
        return p;
    }

    ParamVector with(std::size_t i, double value) const {
        ParamVector p = *this;
        p[i] = value;
        return p;
    }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ParamVector& p) {
    return os << '(' << p.rate << ", " << p.scale << ", " << p.inner_power << ", " << p.shift
              << ", " << p.outer_power << ", " << p.poly_exponent << ')';
}

/// True when `x` is a positive integer (the natural-number outer power case).
inline bool is_natural(double x) {
    return x >= 1.0 && x <= 1e6 && x == std::floor(x);
}

namespace detail {

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Limit behaviour of u(y) = (scale*y^inner + shift)^outer at an endpoint.
struct PowerTermLimit {
    enum Kind { bounded, to_plus_inf, to_minus_inf } kind;
    double power;  // u ~ coef * y^power when unbounded
    double coef;
};

inline PowerTermLimit unbounded_term(double coef, double power) {
    return {coef > 0.0 ? PowerTermLimit::to_plus_inf : PowerTermLimit::to_minus_inf, power, coef};
}

// `at_zero` selects y -> 0+, otherwise y -> +inf. Assumes the base sign was
// already checked for non-integer outer powers.
inline PowerTermLimit power_term_limit(const ParamVector& p, bool at_zero) {
    const double b = p.scale;
    const double c = p.inner_power;
    const double d = p.shift;
    const double e = p.outer_power;
    if (b == 0.0 || c == 0.0 || e == 0.0) return {PowerTermLimit::bounded, 0.0, 0.0};
    // y^c grows at this endpoint when c < 0 at zero, or c > 0 at infinity.
    const bool grows = at_zero ? (c < 0.0) : (c > 0.0);
    if (!grows && d != 0.0) return {PowerTermLimit::bounded, 0.0, 0.0};
    // Either the scale term dominates a growing base, or the base vanishes
    // like scale*y^c; in both cases u ~ scale^e y^{c e}.
    const double power = c * e;
    const bool u_unbounded = grows ? (e > 0.0) : (e < 0.0);
    if (!u_unbounded) return {PowerTermLimit::bounded, 0.0, 0.0};
    double coef;
    if (b > 0.0) {
        coef = std::pow(b, e);
    } else {
        // Negative base is only admitted for natural outer powers.
        coef = std::pow(b, e);
    }
    return unbounded_term(coef, power);
}

}  // namespace detail

/// Whether the kernel integral over (0, inf) is finite and positive.
/// This is the exact convergence condition, which is wider than the nominal
/// parameter space in some corners (e.g. rate > 0 with poly_exponent < -1 when
/// the power term vanishes the kernel at zero).
inline bool is_integrable(const ParamVector& p) {
    for (std::size_t i = 0; i < 6; ++i) {
        if (!std::isfinite(p[i])) return false;
    }
    const bool natural = is_natural(p.outer_power);
    if (!natural) {
        if (p.inner_power != 0.0 && p.scale != 0.0) {
            if (p.scale < 0.0 || p.shift < 0.0) return false;
        } else {
            const double base = (p.inner_power == 0.0 ? p.scale : 0.0) + p.shift;
            if (base < 0.0) return false;
        }
    }
    // Constant zero base with negative power makes the kernel vanish identically.
    if ((p.scale == 0.0 || p.inner_power == 0.0)) {
        const double base = (p.inner_power == 0.0 ? p.scale : 0.0) + p.shift;
        if (base == 0.0 && p.outer_power < 0.0) return false;
    }

    using L = detail::PowerTermLimit;
    const auto at0 = detail::power_term_limit(p, true);
    switch (at0.kind) {
        case L::to_minus_inf: return false;
        case L::bounded:
            if (!(p.poly_exponent > -1.0)) return false;
            break;
        case L::to_plus_inf: break;
    }

    const auto atinf = detail::power_term_limit(p, false);
    const double a = p.rate;
    switch (atinf.kind) {
        case L::bounded:
            if (a > 0.0) return true;
            return a == 0.0 && p.poly_exponent < -1.0;
        case L::to_plus_inf:
            if (atinf.power > 1.0) return true;
            if (atinf.power == 1.0) {
                if (a + atinf.coef > 0.0) return true;
                return a + atinf.coef == 0.0 && p.shift == 0.0 && p.poly_exponent < -1.0;
            }
            return a >= 0.0;
        case L::to_minus_inf:
            if (atinf.power > 1.0) return false;
            if (atinf.power == 1.0) return a + atinf.coef > 0.0;
            return a > 0.0;
    }
    return false;
}

/// Membership in the stated parameter space: rate, scale, shift >= 0 with rate
/// and scale not both zero, and poly_exponent > -1 unless rate = 0 with
/// opposite signs of inner and outer power (then poly_exponent < -1).
/// For natural outer powers m the relaxed rules apply: m even needs rate > 0
/// (scale, shift free); m odd splits on inner_power*m: > 1 needs scale > 0,
/// = 1 needs rate + scale^m > 0, < 1 needs rate > 0.
inline bool in_parameter_space(const ParamVector& p) {
    for (std::size_t i = 0; i < 6; ++i) {
        if (!std::isfinite(p[i])) return false;
    }
    const bool same_sign = detail::sign_of(p.inner_power) == detail::sign_of(p.outer_power);
    const bool poly_ok = (p.rate != 0.0 || same_sign) ? p.poly_exponent > -1.0
                                                      : p.poly_exponent < -1.0;
    const bool general = p.rate >= 0.0 && p.scale >= 0.0 && p.shift >= 0.0 &&
                         !(p.rate == 0.0 && p.scale == 0.0) && poly_ok;
    if (general) return true;
    if (!is_natural(p.outer_power) || !poly_ok) return false;
    const double m = p.outer_power;
    if (std::fmod(m, 2.0) == 0.0) return p.rate > 0.0;
    const double prod = p.inner_power * m;
    if (prod > 1.0) return p.scale > 0.0;
    if (prod == 1.0) return p.rate + std::pow(p.scale, m) > 0.0;
    return p.rate > 0.0;
}

enum class Validity {
    in_space,          ///< inside the stated parameter space and integrable
    integrable_only,   ///< outside the stated space but the kernel integrates
    in_space_divergent,  ///< satisfies the stated rules yet the integral diverges
    invalid,
};

inline Validity classify(const ParamVector& p) {
    const bool space = in_parameter_space(p);
    const bool integrable = is_integrable(p);
    if (space && integrable) return Validity::in_space;
    if (integrable) return Validity::integrable_only;
    if (space) return Validity::in_space_divergent;
    return Validity::invalid;
}

inline std::string_view to_string(Validity v) {
    switch (v) {
        case Validity::in_space: return "in_space";
        case Validity::integrable_only: return "integrable_only";
        case Validity::in_space_divergent: return "in_space_divergent";
        case Validity::invalid: return "invalid";
    }
    return "invalid";
}

/// Throws DomainError unless the kernel is normalizable.
inline void require_integrable(const ParamVector& p, std::string_view where) {
    if (!is_integrable(p)) {
        std::string msg(where);
        msg += ": parameter vector does not define a normalizable density";
        throw DomainError(msg);
    }
}

}  // namespace hextreme

#endif  // HEXTREME_PARAM_HPP
