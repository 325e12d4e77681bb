#ifndef HEXTREME_SPECFUN_HPP
#define HEXTREME_SPECFUN_HPP

// Scalar special functions and generalized Gauss-Laguerre rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hextreme/error.hpp"

namespace hextreme {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Stirling series for log Gamma, valid for x >= 10.
inline double ln_gamma_stirling(double x) {
    const double r = 1.0 / x;
    const double r2 = r * r;
    const double series =
        r * (1.0 / 12.0 +
             r2 * (-1.0 / 360.0 +
                   r2 * (1.0 / 1260.0 +
                         r2 * (-1.0 / 1680.0 +
                               r2 * (1.0 / 1188.0 +
                                     r2 * (-691.0 / 360360.0 +
                                           r2 * (1.0 / 156.0 + r2 * (-3617.0 / 122400.0))))))));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// zeta(k) - 1 for k >= 2: direct sum to 19 plus an Euler-Maclaurin tail.
inline double zeta_minus_one(int k) {
    constexpr double N = 20.0;
    double s = 0.0;
    for (int n = 19; n >= 2; --n) s += std::pow(n, -k);
    const double kk = k;
    s += std::pow(N, 1.0 - kk) / (kk - 1.0) + 0.5 * std::pow(N, -kk) + kk * std::pow(N, -kk - 1.0) / 12.0 -
         kk * (kk + 1.0) * (kk + 2.0) * std::pow(N, -kk - 3.0) / 720.0 +
         kk * (kk + 1.0) * (kk + 2.0) * (kk + 3.0) * (kk + 4.0) * std::pow(N, -kk - 5.0) / 30240.0;
    return s;
}

// log Gamma(2 + z) for |z| <= 0.5 by its Taylor series, which keeps full
// relative accuracy around the zero at z = 0.
inline double ln_gamma_near_two(double z) {
    static const auto coef = [] {
        std::array<double, 40> c{};
        for (int k = 2; k < 40; ++k) c[static_cast<std::size_t>(k)] = zeta_minus_one(k) / k;
        return c;
    }();
    double s = 0.0;
    for (int k = 39; k >= 2; --k) s = (s + ((k % 2) ? -coef[static_cast<std::size_t>(k)] : coef[static_cast<std::size_t>(k)])) * z;
    return z * (1.0 - kEulerGamma) + s * z;
}

}  // namespace detail

/// log Gamma(x) for x > 0.
inline double ln_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("ln_gamma: argument must be positive");
    if (std::isinf(x)) return x;
    if (x >= 10.0) return detail::ln_gamma_stirling(x);
    if (x >= 1.5 && x < 2.5) return detail::ln_gamma_near_two(x - 2.0);
    if (x >= 0.5 && x < 1.5) return detail::ln_gamma_near_two(x - 1.0) - std::log1p(x - 1.0);
    // Upward recurrence to the Stirling region; the running product is folded
    // into log form whenever it leaves [1e-200, 1e200].
    double shifted = x;
    double log_prod = 0.0;
    double prod = 1.0;
    while (shifted < 10.0) {
        prod *= shifted;
        shifted += 1.0;
        if (prod < 1e-200 || prod > 1e200) {
            log_prod += std::log(prod);
            prod = 1.0;
        }
    }
    log_prod += std::log(prod);
    return detail::ln_gamma_stirling(shifted) - log_prod;
}

/// Gamma(x) for x > 0; overflows to +inf past x ~ 171.6.
inline double gamma_fn(double x) { return std::exp(ln_gamma(x)); }

/// Digamma Psi(x) = d/dx log Gamma(x) for x > 0.
inline double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / x;
    const double r2 = r * r;
    const double tail =
        r2 * (1.0 / 12.0 -
              r2 * (1.0 / 120.0 -
                    r2 * (1.0 / 252.0 -
                          r2 * (1.0 / 240.0 -
                                r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0 - r2 / 12.0))))));
    return acc + std::log(x) - 0.5 * r - tail;
}

/// log of the binomial coefficient C(n, k) for 0 <= k <= n.
inline double ln_binomial(double n, double k) {
    if (k == 0.0 || k == n) return 0.0;
    return ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
}

namespace detail {

struct IncGammaParts {
    bool series;   // true: `value` is log gamma(p,x); false: `value` is Q(p,x)
    double value;
};

inline IncGammaParts incomplete_gamma_parts(double p, double x) {
    constexpr int kMaxIter = 100000;
    if (x < p + 1.0) {
        double ap = p;
        double del = 1.0 / p;
        double sum = del;
        for (int i = 0; i < kMaxIter; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * kEps) {
                return {true, std::log(sum) - x + p * std::log(x)};
            }
        }
        throw NumericError("incomplete_gamma: series did not converge");
    }
    // Modified Lentz continued fraction for Q(p, x).
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - p;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - p);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return {false, std::exp(-x + p * std::log(x) - ln_gamma(p)) * h};
        }
    }
    throw NumericError("incomplete_gamma: continued fraction did not converge");
}

inline void check_incomplete_gamma_args(double p, double x) {
    if (!(p > 0.0) || !(x >= 0.0)) {
        throw DomainError("incomplete gamma: requires p > 0 and x >= 0");
    }
}

}  // namespace detail

/// Regularized lower incomplete gamma P(p, x) = gamma(p, x) / Gamma(p).
inline double gamma_p(double p, double x) {
    detail::check_incomplete_gamma_args(p, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const auto parts = detail::incomplete_gamma_parts(p, x);
    if (parts.series) return std::min(1.0, std::exp(parts.value - ln_gamma(p)));
    return std::clamp(1.0 - parts.value, 0.0, 1.0);
}

/// Regularized upper incomplete gamma Q(p, x) = 1 - P(p, x).
inline double gamma_q(double p, double x) {
    detail::check_incomplete_gamma_args(p, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const auto parts = detail::incomplete_gamma_parts(p, x);
    if (parts.series) return std::max(0.0, 1.0 - std::exp(parts.value - ln_gamma(p)));
    return std::clamp(parts.value, 0.0, 1.0);
}

/// log gamma(p, x); -inf at x = 0.
inline double ln_incomplete_gamma_lower(double p, double x) {
    detail::check_incomplete_gamma_args(p, x);
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (std::isinf(x)) return ln_gamma(p);
    const auto parts = detail::incomplete_gamma_parts(p, x);
    if (parts.series) return parts.value;
    return ln_gamma(p) + std::log1p(-parts.value);
}

/// Lower incomplete gamma gamma(p, x) = int_0^x w^{p-1} e^{-w} dw.
inline double incomplete_gamma_lower(double p, double x) {
    return std::exp(ln_incomplete_gamma_lower(p, x));
}

// ---------------------------------------------------------------------------
// Generalized Laguerre polynomials and quadrature
// ---------------------------------------------------------------------------

/// Value of a Laguerre polynomial stored as mantissa * exp(log_scale), plus
/// the previous-degree polynomial at the same scale (used for derivatives).
struct ScaledLaguerre {
    double value;
    double previous;
    double log_scale;
};

/// L_N^{(alpha)}(x) and L_{N-1}^{(alpha)}(x) via the three-term recurrence,
/// rescaled on the fly so large degrees do not overflow.
inline ScaledLaguerre laguerre_eval_scaled(int n, double alpha, double x) {
    if (n < 0) throw DomainError("laguerre_eval: degree must be nonnegative");
    double prev = 0.0;
    double cur = 1.0;
    double log_scale = 0.0;
    for (int k = 0; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        const double mag = std::fabs(cur);
        if (mag > 1e150) {
            prev /= mag;
            cur /= mag;
            log_scale += std::log(mag);
        }
    }
    return {cur, prev, log_scale};
}

/// L_N^{(alpha)}(x) by the three-term recurrence.
inline double laguerre_eval(int n, double alpha, double x) {
    const auto s = laguerre_eval_scaled(n, alpha, x);
    return s.value * std::exp(s.log_scale);
}

/// Generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on (0, inf).
/// Immutable once built.
class QuadratureRule {
public:
    QuadratureRule(int order, double alpha, std::vector<double> nodes,
                   std::vector<double> log_weights)
        : order_(order), alpha_(alpha), nodes_(std::move(nodes)),
          log_weights_(std::move(log_weights)) {
        weights_.reserve(log_weights_.size());
        for (double lw : log_weights_) weights_.push_back(std::exp(lw));
    }

    int order() const noexcept { return order_; }
    double alpha() const noexcept { return alpha_; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    /// Weights; entries may underflow to zero for very high orders, in which
    /// case `log_weights()` stays exact.
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& log_weights() const noexcept { return log_weights_; }

    /// sum_j w_j f(x_j), approximating int_0^inf x^alpha e^{-x} f(x) dx.
    template <class F>
    double apply(F&& f) const {
        double s = 0.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j) s += weights_[j] * f(nodes_[j]);
        return s;
    }

private:
    int order_;
    double alpha_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> log_weights_;
};

inline constexpr int kMaxLaguerreOrder = 512;
inline constexpr int kDefaultLaguerreOrder = 64;

/// Nodes are the roots of L_N^{(alpha)} from the Jacobi matrix eigenvalues,
/// each polished by Newton; weights use
/// w_j = Gamma(N+alpha+1) x_j / (N! (N+1)^2 [L_{N+1}^{(alpha)}(x_j)]^2).
inline QuadratureRule gauss_laguerre_rule(int n, double alpha) {
    if (n < 1 || n > kMaxLaguerreOrder) {
        throw DomainError("gauss_laguerre_rule: order must be in [1, " +
                          std::to_string(kMaxLaguerreOrder) + "]");
    }
    if (!(alpha > -1.0)) throw DomainError("gauss_laguerre_rule: alpha must exceed -1");

    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < n; ++i) sub(i - 1) = std::sqrt(i * (i + alpha));

    std::vector<double> nodes(n);
    if (n == 1) {
        nodes[0] = alpha + 1.0;
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericError("gauss_laguerre_rule: Jacobi eigenvalue iteration failed");
        }
        for (int i = 0; i < n; ++i) nodes[i] = solver.eigenvalues()(i);
    }

    for (double& x : nodes) {
        for (int it = 0; it < 3; ++it) {
            const auto l = laguerre_eval_scaled(n, alpha, x);
            const double deriv = (n * l.value - (n + alpha) * l.previous) / x;
            if (deriv == 0.0) break;
            const double step = l.value / deriv;
            const double next = x - step;
            if (!(next > 0.0) || !std::isfinite(next)) break;
            x = next;
            if (std::fabs(step) <= 4.0 * detail::kEps * x) break;
        }
    }
    std::sort(nodes.begin(), nodes.end());
    for (int i = 0; i < n; ++i) {
        if (!(nodes[i] > 0.0) || (i > 0 && !(nodes[i] > nodes[i - 1]))) {
            throw NumericError("gauss_laguerre_rule: nodes not strictly increasing and positive");
        }
    }

    const double log_front = ln_gamma(n + alpha + 1.0) - ln_gamma(n + 1.0) -
                             2.0 * std::log(n + 1.0);
    std::vector<double> log_weights(n);
    for (int i = 0; i < n; ++i) {
        const auto l = laguerre_eval_scaled(n + 1, alpha, nodes[i]);
        const double log_abs = std::log(std::fabs(l.value)) + l.log_scale;
        log_weights[i] = log_front + std::log(nodes[i]) - 2.0 * log_abs;
    }
    return QuadratureRule(n, alpha, std::move(nodes), std::move(log_weights));
}

// ---------------------------------------------------------------------------
// Standard normal
// ---------------------------------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Standard normal quantile: rational approximation refined by one Halley step.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement; the upper tail is refined through the complement.
    const double e = (p < 0.5) ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace hextreme

#endif  // HEXTREME_SPECFUN_HPP
