#ifndef HEXTREME_SUBMODEL_HPP
#define HEXTREME_SUBMODEL_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "hextreme/error.hpp"
#include "hextreme/param.hpp"
#include "hextreme/specfun.hpp"

namespace hextreme {

enum class SubModelKind {
    gamma,
    generalized_gamma,
    inverse_gamma,
    weibull,
    frechet,
    half_normal,
    modified_half_normal,
    rayleigh,
    erlang,
    exponential,
};

inline std::string_view to_string(SubModelKind k) {
    switch (k) {
        case SubModelKind::gamma: return "gamma";
        case SubModelKind::generalized_gamma: return "generalized_gamma";
        case SubModelKind::inverse_gamma: return "inverse_gamma";
        case SubModelKind::weibull: return "weibull";
        case SubModelKind::frechet: return "frechet";
        case SubModelKind::half_normal: return "half_normal";
        case SubModelKind::modified_half_normal: return "modified_half_normal";
        case SubModelKind::rayleigh: return "rayleigh";
        case SubModelKind::erlang: return "erlang";
        case SubModelKind::exponential: return "exponential";
    }
    return "unknown";
}

inline std::optional<SubModelKind> submodel_from_string(std::string_view s) {
    for (auto k : {SubModelKind::gamma, SubModelKind::generalized_gamma, SubModelKind::inverse_gamma,
                   SubModelKind::weibull, SubModelKind::frechet, SubModelKind::half_normal,
                   SubModelKind::modified_half_normal, SubModelKind::rayleigh, SubModelKind::erlang,
                   SubModelKind::exponential}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

/// A named special case. Only the fields used by `kind` are read:
///   gamma, inverse_gamma: alpha, beta      generalized_gamma: alpha, beta, gamma
///   weibull, frechet: alpha, sigma         half_normal, rayleigh: sigma
///   modified_half_normal: alpha, beta, gamma (gamma < 0)
///   erlang: k, beta                        exponential: beta (rate)
struct SubModel {
    SubModelKind kind = SubModelKind::exponential;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double sigma = 1.0;
    int k = 1;

    static SubModel make_gamma(double alpha, double beta) { return {SubModelKind::gamma, alpha, beta}; }
    static SubModel make_generalized_gamma(double alpha, double beta, double gamma) {
        return {SubModelKind::generalized_gamma, alpha, beta, gamma};
    }
    static SubModel make_inverse_gamma(double alpha, double beta) {
        return {SubModelKind::inverse_gamma, alpha, beta};
    }
    static SubModel make_weibull(double alpha, double sigma) {
        return {SubModelKind::weibull, alpha, 1.0, 1.0, sigma};
    }
    static SubModel make_frechet(double alpha, double sigma) {
        return {SubModelKind::frechet, alpha, 1.0, 1.0, sigma};
    }
    static SubModel make_half_normal(double sigma) {
        return {SubModelKind::half_normal, 1.0, 1.0, 1.0, sigma};
    }
    static SubModel make_modified_half_normal(double alpha, double beta, double gamma) {
        return {SubModelKind::modified_half_normal, alpha, beta, gamma};
    }
    static SubModel make_rayleigh(double sigma) { return {SubModelKind::rayleigh, 1.0, 1.0, 1.0, sigma}; }
    static SubModel make_erlang(int k, double beta) { return {SubModelKind::erlang, 1.0, beta, 1.0, 1.0, k}; }
    static SubModel make_exponential(double rate) { return {SubModelKind::exponential, 1.0, rate}; }
};

inline void validate(const SubModel& s) {
    auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    bool ok = true;
    switch (s.kind) {
        case SubModelKind::gamma:
        case SubModelKind::inverse_gamma: ok = pos(s.alpha) && pos(s.beta); break;
        case SubModelKind::generalized_gamma: ok = pos(s.alpha) && pos(s.beta) && pos(s.gamma); break;
        case SubModelKind::weibull:
        case SubModelKind::frechet: ok = pos(s.alpha) && pos(s.sigma); break;
        case SubModelKind::half_normal:
        case SubModelKind::rayleigh: ok = pos(s.sigma); break;
        case SubModelKind::modified_half_normal:
            ok = pos(s.alpha) && pos(s.beta) && s.gamma < 0.0 && std::isfinite(s.gamma);
            break;
        case SubModelKind::erlang: ok = s.k >= 1 && pos(s.beta); break;
        case SubModelKind::exponential: ok = pos(s.beta); break;
    }
    if (!ok) throw DomainError(std::string("invalid parameters for sub-model ") + std::string(to_string(s.kind)));
}

/// The parameter vector reproducing the sub-model's density.
inline ParamVector from_submodel(const SubModel& s) {
    validate(s);
    switch (s.kind) {
        case SubModelKind::gamma: return {s.beta, 0, 1, 0, 1, s.alpha - 1};
        case SubModelKind::generalized_gamma: return {0, s.beta, s.gamma, 0, 1, s.alpha - 1};
        case SubModelKind::inverse_gamma: return {0, s.beta, -1, 0, 1, -s.alpha - 1};
        case SubModelKind::weibull: return {0, 1 / s.sigma, 1, 0, s.alpha, s.alpha - 1};
        case SubModelKind::frechet: return {0, 1 / s.sigma, 1, 0, -s.alpha, -s.alpha - 1};
        case SubModelKind::half_normal: return {0, 1 / (2 * s.sigma * s.sigma), 2, 0, 1, 0};
        case SubModelKind::modified_half_normal: return {-s.gamma, s.beta, 2, 0, 1, s.alpha - 1};
        case SubModelKind::rayleigh: return {0, 1 / (2 * s.sigma * s.sigma), 2, 0, 1, 1};
        // The tabulated Erlang vector carries shift 1, which only rescales the kernel by e^{-1}.
        case SubModelKind::erlang: return {s.beta, 0, 1, 1, 1, static_cast<double>(s.k - 1)};
        case SubModelKind::exponential: return {s.beta, 0, 1, 0, 1, 0};
    }
    throw DomainError("from_submodel: unknown kind");
}

/// Fox-Wright function Psi(a, z) = sum_k Gamma(a + k/2) z^k / k!, the
/// normalizing series of the modified half-normal law. Throws NumericError
/// when cancellation would leave fewer than about eight digits.
inline double fox_wright_psi(double a, double z) {
    if (!(a > 0.0)) throw DomainError("fox_wright_psi: a must be positive");
    double sum = 0.0, comp = 0.0, abs_sum = 0.0;
    const double lz = z == 0.0 ? 0.0 : std::log(std::fabs(z));
    for (int k = 0; k < 2000; ++k) {
        if (z == 0.0 && k > 0) break;
        const double l = ln_gamma(a + 0.5 * k) + k * lz - ln_gamma(k + 1.0);
        const double mag = std::exp(l);
        const double term = (z < 0.0 && (k % 2)) ? -mag : mag;
        const double t = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        abs_sum += mag;
        if (k > 4 && mag < 1e-17 * std::fabs(sum + comp) && k > 2.0 * z * z) break;
    }
    const double v = sum + comp;
    if (!(std::fabs(v) > 1e-8 * abs_sum)) throw NumericError("fox_wright_psi: catastrophic cancellation", v);
    return v;
}

/// Closed-form density of the sub-model in its own parameterization.
inline double submodel_pdf(const SubModel& s, double y) {
    validate(s);
    if (!(y > 0.0)) return 0.0;
    using std::exp;
    using std::log;
    switch (s.kind) {
        case SubModelKind::gamma:
            return exp(s.alpha * log(s.beta) - ln_gamma(s.alpha) + (s.alpha - 1) * log(y) - s.beta * y);
        case SubModelKind::generalized_gamma:
            return exp(log(s.gamma) + (s.alpha / s.gamma) * log(s.beta) - ln_gamma(s.alpha / s.gamma) +
                       (s.alpha - 1) * log(y) - s.beta * std::pow(y, s.gamma));
        case SubModelKind::inverse_gamma:
            return exp(s.alpha * log(s.beta) - ln_gamma(s.alpha) - (s.alpha + 1) * log(y) - s.beta / y);
        case SubModelKind::weibull: {
            const double z = y / s.sigma;
            return s.alpha / s.sigma * std::pow(z, s.alpha - 1) * exp(-std::pow(z, s.alpha));
        }
        case SubModelKind::frechet: {
            const double z = y / s.sigma;
            return s.alpha / s.sigma * std::pow(z, -s.alpha - 1) * exp(-std::pow(z, -s.alpha));
        }
        case SubModelKind::half_normal:
            return std::numbers::sqrt2 / (s.sigma * std::sqrt(std::numbers::pi)) *
                   exp(-y * y / (2 * s.sigma * s.sigma));
        case SubModelKind::modified_half_normal: {
            const double psi = fox_wright_psi(s.alpha / 2, s.gamma / std::sqrt(s.beta));
            return 2 * std::pow(s.beta, s.alpha / 2) / psi * std::pow(y, s.alpha - 1) *
                   exp(s.gamma * y - s.beta * y * y);
        }
        case SubModelKind::rayleigh:
            return y / (s.sigma * s.sigma) * exp(-y * y / (2 * s.sigma * s.sigma));
        case SubModelKind::erlang:
            return exp(s.k * log(s.beta) - ln_gamma(s.k) + (s.k - 1) * log(y) - s.beta * y);
        case SubModelKind::exponential: return s.beta * exp(-s.beta * y);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace hextreme

#endif  // HEXTREME_SUBMODEL_HPP
