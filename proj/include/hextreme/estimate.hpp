#ifndef HEXTREME_ESTIMATE_HPP
#define HEXTREME_ESTIMATE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hextreme/dist.hpp"
#include "hextreme/error.hpp"
#include "hextreme/hfunc.hpp"
#include "hextreme/kernel.hpp"
#include "hextreme/optimize.hpp"
#include "hextreme/param.hpp"
#include "hextreme/random.hpp"
#include "hextreme/specfun.hpp"
#include "hextreme/submodel.hpp"

namespace hextreme {

struct Dataset {
    std::vector<double> values;
    std::string name;

    Dataset() = default;
    Dataset(std::vector<double> v, std::string n = {}) : values(std::move(v)), name(std::move(n)) { validate(); }

    std::size_t size() const noexcept { return values.size(); }

    void validate() const {
        if (values.size() < 2) throw DomainError("Dataset: at least two observations are required");
        for (double v : values) {
            if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("Dataset: observations must be positive and finite");
        }
    }
};

/// Right-continuous empirical CDF.
class Ecdf {
public:
    explicit Ecdf(const Dataset& d) : sorted_(d.values) { std::sort(sorted_.begin(), sorted_.end()); }

    double operator()(double y) const {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), y);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    const std::vector<double>& sorted() const noexcept { return sorted_; }

    /// Values at the order statistics, ties sharing the upper count.
    std::vector<double> at_order_statistics() const {
        std::vector<double> out(sorted_.size());
        for (std::size_t i = 0; i < sorted_.size(); ++i) out[i] = (*this)(sorted_[i]);
        return out;
    }

private:
    std::vector<double> sorted_;
};

inline Ecdf ecdf(const Dataset& d) { return Ecdf(d); }

enum class FitMethod { lse, mle, pipeline };
enum class Optimizer { nelder_mead, quasi_newton };

inline std::string_view to_string(FitMethod m) {
    switch (m) {
        case FitMethod::lse: return "lse";
        case FitMethod::mle: return "mle";
        case FitMethod::pipeline: return "pipeline";
    }
    return "unknown";
}

struct Bounds {
    double lo;
    double hi;
};

struct FitOptions {
    int max_iterations = 6000;  ///< objective evaluations per optimizer run
    double tolerance = 1e-10;
    std::array<Bounds, 6> bounds{{{0.0, 1e3}, {0.0, 1e3}, {-20.0, 20.0}, {0.0, 1e3}, {-20.0, 20.0}, {-50.0, 50.0}}};
    Optimizer optimizer = Optimizer::nelder_mead;
    bool theta5_projection = false;
    int restarts = 3;
};

struct FitResult {
    ParamVector theta_hat;
    FitMethod method = FitMethod::mle;
    double loglik = -std::numeric_limits<double>::infinity();
    double objective = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    int k_params = 6;
    std::string diagnostics;
};

namespace detail {

inline constexpr double kLogEps = 1e-12;
inline constexpr double kSnapBelow = -25.0;
inline constexpr std::array<bool, 6> kLogCoord{true, true, false, true, false, false};

// Positive coordinates are searched as log(theta + eps); far below the snap
// threshold they become exactly zero so sub-model boundaries are reachable.
inline opt::Vec to_search(const ParamVector& p) {
    opt::Vec z(6);
    for (std::size_t i = 0; i < 6; ++i) {
        z[static_cast<Eigen::Index>(i)] = kLogCoord[i] ? std::log(std::max(p[i], 0.0) + kLogEps) : p[i];
    }
    return z;
}

inline ParamVector from_search(const opt::Vec& z) {
    ParamVector p;
    for (std::size_t i = 0; i < 6; ++i) {
        const double v = z[static_cast<Eigen::Index>(i)];
        p[i] = kLogCoord[i] ? (v < kSnapBelow ? 0.0 : std::exp(v) - kLogEps) : v;
        if (kLogCoord[i] && p[i] < 0.0) p[i] = 0.0;
    }
    return p;
}

inline opt::Vec initial_step(const ParamVector& p) {
    opt::Vec s(6);
    for (std::size_t i = 0; i < 6; ++i) {
        double v;
        if (kLogCoord[i]) {
            // From the zero boundary, jump to about 1e-3; otherwise a factor e^0.5.
            v = p[i] > 0.0 ? 0.5 : std::log(1e-3) - std::log(kLogEps);
        } else {
            v = 0.25 * std::max(std::fabs(p[i]), 1.0);
        }
        s[static_cast<Eigen::Index>(i)] = v;
    }
    return s;
}

inline bool within(const ParamVector& p, const FitOptions& o) {
    for (std::size_t i = 0; i < 6; ++i) {
        if (!(p[i] >= o.bounds[i].lo && p[i] <= o.bounds[i].hi)) return false;
    }
    return is_integrable(p);
}

// Sufficient sums of the data for the likelihood.
struct DataSums {
    std::vector<double> y;
    std::vector<double> log_y;
    double sum_y = 0.0;
    double sum_log_y = 0.0;

    explicit DataSums(const Dataset& d) : y(d.values) {
        log_y.reserve(y.size());
        for (double v : y) {
            log_y.push_back(std::log(v));
            sum_y += v;
            sum_log_y += log_y.back();
        }
    }
};

inline double log_likelihood_with(const ParamVector& theta, const DataSums& s, const HOptions& h) {
    const double n = static_cast<double>(s.y.size());
    // A constant power term cancels between kernel and normalizer; dropping it
    // first avoids subtracting two huge numbers.
    const bool constant_u = theta.scale == 0.0 || theta.inner_power == 0.0 || theta.outer_power == 0.0;
    const ParamVector p = constant_u ? ParamVector(theta.rate, 0.0, 1.0, 1.0, 0.0, theta.poly_exponent) : theta;
    double sum_u = 0.0;
    if (constant_u) {
        sum_u = n;
    } else {
        for (double y : s.y) sum_u += power_term(p, y);
    }
    const double rate_part = p.rate == 0.0 ? 0.0 : p.rate * s.sum_y;
    const double poly_part = p.poly_exponent == 0.0 ? 0.0 : p.poly_exponent * s.sum_log_y;
    const double ll = -n * h_full(p, h).log_value + poly_part - rate_part - sum_u;
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
}

// Objective wrappers never throw: an invalid or non-evaluable theta scores +inf.
template <class F>
double guarded(F&& f) {
    try {
        const double v = f();
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

inline std::string format_theta(const ParamVector& p) {
    std::ostringstream os;
    os.precision(10);
    os << p;
    return os.str();
}

}  // namespace detail

/// sum_i (G(Y_(i)) - Ghat(Y_(i)))^2.
inline double lse_objective(const ParamVector& p, const Ecdf& e) {
    require_integrable(p, "lse_objective");
    const HExtreme d(p);
    const auto g = d.cdf_sorted(e.sorted());
    const auto target = e.at_order_statistics();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += (g[i] - target[i]) * (g[i] - target[i]);
    return s;
}

inline double log_likelihood(const ParamVector& p, const Dataset& d) {
    detail::require_h_domain(p, "log_likelihood");
    return detail::log_likelihood_with(p, detail::DataSums(d), HOptions{});
}

/// Analytic score for a natural outer power; the H-derivatives come from
/// h_partials and the data terms are direct sums.
inline std::array<double, 6> score(const ParamVector& p, const Dataset& d) {
    const auto dh = h_partials(p);
    const double h = h_full(p, HOptions{HStrategy::fast}).value;
    const double n = static_cast<double>(d.size());
    const double m = p.outer_power;
    std::array<double, 6> g{};
    for (std::size_t i = 0; i < 6; ++i) g[i] = -n * dh[i] / h;
    for (double y : d.values) {
        const double yc = std::pow(y, p.inner_power);
        const double base = p.scale * yc + p.shift;
        const double bm1 = std::pow(base, m - 1.0);
        const double ly = std::log(y);
        g[0] -= y;
        g[1] -= m * bm1 * yc;
        g[2] -= m * bm1 * p.scale * yc * ly;
        g[3] -= m * bm1;
        g[4] -= base > 0.0 ? std::pow(base, m) * std::log(base) : 0.0;
        g[5] += ly;
    }
    return g;
}

/// Nearest natural number to the outer power, ties to the smaller one.
inline ParamVector project_theta5(const ParamVector& p) {
    double m = std::ceil(p.outer_power - 0.5);
    if (m < 1.0) m = 1.0;
    ParamVector q = p;
    q.outer_power = m;
    if (!is_integrable(q)) throw DomainError("project_theta5: projected vector is not a valid density");
    return q;
}

namespace detail {

inline FitResult finish(const ParamVector& p, const Dataset& d, FitMethod method, double objective, bool conv,
                        int iters, std::string diag) {
    FitResult r;
    r.theta_hat = p;
    r.method = method;
    r.objective = objective;
    r.converged = conv;
    r.iterations = iters;
    r.diagnostics = std::move(diag);
    try {
        r.loglik = log_likelihood(p, d);
    } catch (const std::exception&) {
        r.loglik = -std::numeric_limits<double>::infinity();
    }
    return r;
}

// Gamma shape from log(mean) - mean(log y) by Newton from the Minka start.
inline double gamma_shape_mle(double s) {
    if (!(s > 0.0)) throw EstimationError("initial_guess: gamma fit needs non-constant data");
    double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int it = 0; it < 100; ++it) {
        // trigamma by central difference of digamma is adequate for a start value
        const double f = std::log(a) - digamma(a) - s;
        const double h = 1e-6 * a;
        const double fp = 1.0 / a - (digamma(a + h) - digamma(a - h)) / (2.0 * h);
        const double next = a - f / fp;
        a = next > 0.0 ? next : 0.5 * a;
        if (std::fabs(f) < 1e-14) break;
    }
    return a;
}

// Weibull profile likelihood in the shape, returning (shape, scale).
inline std::pair<double, double> weibull_mle(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double mean_log = 0.0;
    for (double v : y) mean_log += std::log(v);
    mean_log /= n;
    double ymax = *std::max_element(y.begin(), y.end());
    auto eq = [&](double a) {
        double s0 = 0.0, s1 = 0.0;
        for (double v : y) {
            const double w = std::pow(v / ymax, a);
            s0 += w;
            s1 += w * std::log(v);
        }
        return s1 / s0 - 1.0 / a - mean_log;
    };
    double lo = 1e-3, hi = 1.0;
    while (eq(hi) < 0.0 && hi < 1e4) hi *= 2.0;
    if (eq(lo) > 0.0 || eq(hi) < 0.0) throw EstimationError("initial_guess: Weibull shape not bracketed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eq(mid) < 0.0 ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);
    double s0 = 0.0;
    for (double v : y) s0 += std::pow(v / ymax, a);
    return {a, ymax * std::pow(s0 / n, 1.0 / a)};
}

}  // namespace detail

/// Start vector from a standard fit of the chosen sub-model.
inline ParamVector initial_guess(const Dataset& d, SubModelKind kind) {
    d.validate();
    const double n = static_cast<double>(d.size());
    double mean = 0.0, mean_log = 0.0;
    for (double v : d.values) {
        mean += v;
        mean_log += std::log(v);
    }
    mean /= n;
    mean_log /= n;
    switch (kind) {
        case SubModelKind::gamma: {
            const double a = detail::gamma_shape_mle(std::log(mean) - mean_log);
            return from_submodel(SubModel::make_gamma(a, a / mean));
        }
        case SubModelKind::weibull: {
            const auto [a, s] = detail::weibull_mle(d.values);
            return from_submodel(SubModel::make_weibull(a, s));
        }
        case SubModelKind::frechet: {
            // 1/Y is Weibull with the same shape and reciprocal scale.
            std::vector<double> inv(d.values.size());
            std::transform(d.values.begin(), d.values.end(), inv.begin(), [](double v) { return 1.0 / v; });
            const auto [a, s] = detail::weibull_mle(inv);
            return from_submodel(SubModel::make_frechet(a, 1.0 / s));
        }
        case SubModelKind::exponential: return from_submodel(SubModel::make_exponential(1.0 / mean));
        default: break;
    }
    throw DomainError("initial_guess: supported kinds are gamma, weibull, frechet and exponential");
}

inline FitResult lse_fit(const Dataset& d, const ParamVector& theta0, const FitOptions& o = {}) {
    d.validate();
    require_integrable(theta0, "lse_fit");
    const Ecdf e(d);
    auto f = [&](const opt::Vec& z) {
        const ParamVector p = detail::from_search(z);
        if (!detail::within(p, o)) return std::numeric_limits<double>::infinity();
        return detail::guarded([&] { return lse_objective(p, e); });
    };
    const double f0 = f(detail::to_search(theta0));
    opt::NelderMeadOptions nm;
    nm.max_evaluations = o.max_iterations;
    nm.f_tol = o.tolerance;
    nm.restarts = o.restarts;
    const auto r = opt::nelder_mead(f, detail::to_search(theta0), detail::initial_step(theta0), nm);
    if (!std::isfinite(r.f) && !std::isfinite(f0)) throw EstimationError("lse_fit: no valid candidate found");
    ParamVector best = detail::from_search(r.x);
    double fbest = r.f;
    if (!(fbest <= f0)) {
        best = theta0;
        fbest = f0;
    }
    return detail::finish(best, d, FitMethod::lse, fbest, r.converged, r.iterations, "lse: nelder-mead");
}

namespace detail {

// Quasi-Newton ascent with the outer power held at its natural value; rate is
// searched on the log scale so it stays positive.
inline opt::MinResult mle_bfgs_pinned(const ParamVector& theta0, const Dataset& d, const FitOptions& o) {
    const DataSums sums(d);
    const double m = theta0.outer_power;
    auto unpack = [&](const opt::Vec& x) {
        return ParamVector(std::exp(x[0]), x[1], x[2], x[3], m, x[4]);
    };
    auto fg = [&](const opt::Vec& x, opt::Vec& g) {
        const ParamVector p = unpack(x);
        g.setConstant(std::numeric_limits<double>::quiet_NaN());
        if (!within(p, o)) return std::numeric_limits<double>::infinity();
        try {
            const double ll = log_likelihood_with(p, sums, HOptions{HStrategy::fast});
            const auto s = score(p, d);
            g << -s[0] * p.rate, -s[1], -s[2], -s[3], -s[5];
            return -ll;
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    opt::Vec x0(5);
    x0 << std::log(theta0.rate), theta0.scale, theta0.inner_power, theta0.shift, theta0.poly_exponent;
    opt::BfgsOptions bo;
    bo.max_iterations = std::max(20, o.max_iterations / 30);
    auto r = opt::bfgs(fg, x0, bo);
    opt::Vec full(6);
    const ParamVector p = unpack(r.x);
    for (std::size_t i = 0; i < 6; ++i) full[static_cast<Eigen::Index>(i)] = p[i];
    r.x = full;
    return r;
}

}  // namespace detail

/// Maximum likelihood from theta0. The returned log-likelihood is never
/// below the starting one.
inline FitResult mle_fit(const Dataset& d, const ParamVector& theta0, const FitOptions& o = {}) {
    d.validate();
    require_integrable(theta0, "mle_fit");
    const detail::DataSums sums(d);
    const HOptions fast{HStrategy::fast};
    auto negll = [&](const ParamVector& p) {
        if (!detail::within(p, o)) return std::numeric_limits<double>::infinity();
        return detail::guarded([&] { return -detail::log_likelihood_with(p, sums, fast); });
    };
    const double f0 = negll(theta0);
    std::ostringstream diag;
    ParamVector best = theta0;
    double fbest = f0;
    bool converged = false;
    int iters = 0;

    const bool pinned = o.optimizer == Optimizer::quasi_newton && is_natural(theta0.outer_power) && theta0.rate > 0.0;
    if (pinned) {
        const auto r = detail::mle_bfgs_pinned(theta0, d, o);
        iters += r.iterations;
        converged = r.converged;
        ParamVector p;
        for (std::size_t i = 0; i < 6; ++i) p[i] = r.x[static_cast<Eigen::Index>(i)];
        if (r.f < fbest) {
            best = p;
            fbest = r.f;
        }
        diag << "mle: bfgs with outer power pinned at " << theta0.outer_power;
    } else {
        auto f = [&](const opt::Vec& z) { return negll(detail::from_search(z)); };
        opt::NelderMeadOptions nm;
        nm.max_evaluations = o.max_iterations;
        nm.f_tol = o.tolerance;
        nm.restarts = o.restarts;
        const auto r = opt::nelder_mead(f, detail::to_search(theta0), detail::initial_step(theta0), nm);
        iters += r.iterations;
        converged = r.converged;
        if (r.f < fbest) {
            best = detail::from_search(r.x);
            fbest = r.f;
        }
        diag << "mle: nelder-mead";
    }

    if (o.theta5_projection && best.outer_power > 0.0) {
        try {
            ParamVector q = project_theta5(best);
            if (q.rate > 0.0) {
                const auto r = detail::mle_bfgs_pinned(q, d, o);
                ParamVector p;
                for (std::size_t i = 0; i < 6; ++i) p[i] = r.x[static_cast<Eigen::Index>(i)];
                const double fp = std::min(r.f, negll(q));
                diag << "; projected outer power to " << q.outer_power << ", -loglik " << fp;
                best = r.f <= negll(q) ? p : q;
                fbest = fp;
            }
        } catch (const std::exception& e) {
            diag << "; projection skipped: " << e.what();
        }
    }
    if (!std::isfinite(fbest)) throw EstimationError("mle_fit: log-likelihood is not finite at any candidate");
    FitResult res = detail::finish(best, d, FitMethod::mle, fbest, converged, iters, diag.str());
    res.objective = -res.loglik;
    return res;
}

/// Sub-model start, least squares, then maximum likelihood. The likelihood
/// stage is run from both the least-squares estimate and the sub-model start
/// and the better optimum is kept.
inline FitResult pipeline_fit(const Dataset& d, SubModelKind kind, const FitOptions& o = {}) {
    const ParamVector theta0 = initial_guess(d, kind);
    std::ostringstream diag;
    diag << "initial " << detail::format_theta(theta0);
    ParamVector lse_theta = theta0;
    try {
        const FitResult lse = lse_fit(d, theta0, o);
        lse_theta = lse.theta_hat;
        diag << "; lse " << detail::format_theta(lse_theta);
    } catch (const std::exception& e) {
        diag << "; lse failed (" << e.what() << "), likelihood stage starts from the initial guess";
    }
    FitResult best = mle_fit(d, lse_theta, o);
    if (!(lse_theta == theta0)) {
        FitResult alt = mle_fit(d, theta0, o);
        if (alt.loglik > best.loglik) {
            best = std::move(alt);
            diag << "; mle from initial guess kept";
        }
    }
    diag << "; mle " << detail::format_theta(best.theta_hat);
    best.method = FitMethod::pipeline;
    best.diagnostics = diag.str() + " | " + best.diagnostics;
    return best;
}

}  // namespace hextreme

#endif  // HEXTREME_ESTIMATE_HPP
