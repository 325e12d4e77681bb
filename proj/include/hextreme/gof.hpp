#ifndef HEXTREME_GOF_HPP
#define HEXTREME_GOF_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hextreme/dist.hpp"
#include "hextreme/estimate.hpp"
#include "hextreme/specfun.hpp"

namespace hextreme {

namespace detail {

inline std::vector<double> sorted_cdf(const Dataset& d, const HExtreme& g) {
    std::vector<double> y = d.values;
    std::sort(y.begin(), y.end());
    return g.cdf_sorted(y);
}

inline double ks_from_sorted_cdf(const std::vector<double>& u) {
    const double n = static_cast<double>(u.size());
    double dn = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double k = static_cast<double>(i);
        dn = std::max({dn, (k + 1.0) / n - u[i], u[i] - k / n});
    }
    return dn;
}

inline double cvm_from_sorted_cdf(const std::vector<double>& u) {
    const double n = static_cast<double>(u.size());
    double w = 1.0 / (12.0 * n);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n) - u[i];
        w += r * r;
    }
    return w;
}

}  // namespace detail

/// Kolmogorov-Smirnov distance between the sample and the model cdf.
inline double ks_statistic(const Dataset& d, const ParamVector& p) {
    return detail::ks_from_sorted_cdf(detail::sorted_cdf(d, HExtreme(p)));
}

/// Cramer-von Mises W^2.
inline double cvm_statistic(const Dataset& d, const ParamVector& p) {
    return detail::cvm_from_sorted_cdf(detail::sorted_cdf(d, HExtreme(p)));
}

/// Normal quantiles of the fitted cdf values, in data order.
inline std::vector<double> rq_residuals(const Dataset& d, const ParamVector& p) {
    const HExtreme g(p);
    std::vector<double> r;
    r.reserve(d.size());
    for (double y : d.values) r.push_back(normal_quantile(std::clamp(g.cdf(y), 1e-12, 1.0 - 1e-12)));
    return r;
}

struct CriteriaReport {
    double loglik = 0.0;
    int k = 6;
    std::size_t n = 0;
    double aic = 0.0;
    double bic = 0.0;
    double edc = 0.0;
};

/// Penalty constant of EDC, c_n = kEdcConstant * sqrt(n).
inline constexpr double kEdcConstant = 0.2;

inline CriteriaReport info_criteria(double loglik, int k, std::size_t n, double edc_constant = kEdcConstant) {
    if (k < 1 || n < 2) throw DomainError("info_criteria: needs k >= 1 and n >= 2");
    CriteriaReport c;
    c.loglik = loglik;
    c.k = k;
    c.n = n;
    const double nn = static_cast<double>(n);
    c.aic = -2.0 * loglik + 2.0 * k;
    c.bic = -2.0 * loglik + k * std::log(nn);
    c.edc = -2.0 * loglik + k * edc_constant * std::sqrt(nn);
    return c;
}

struct GofReport {
    double ks_stat = 0.0;
    double cvm_stat = 0.0;
    double ks_pvalue = 1.0;
    double cvm_pvalue = 1.0;
    int bootstrap_M = 0;
    std::uint64_t seed = 0;
    int failures = 0;                 ///< replicates whose refit failed (skipped)
    bool wide_pvalue_warning = false; ///< M too small for a meaningful p-value
    bool quality_warning = false;     ///< more than 10% of refits failed
    std::vector<double> rq_residuals;
};

/// Below this many replicates the p-value resolution is flagged as too coarse.
inline constexpr int kWidePValueThreshold = 100;

struct BootstrapOptions {
    unsigned threads = 0;  ///< 0 selects the hardware concurrency
    FitOptions refit{};    ///< base options; the iteration budget is scaled below
    double refit_budget = 0.25;
};

/// Parametric bootstrap: replicate m draws n points from theta_hat on stream m
/// of `seed`, refits by maximum likelihood from theta_hat and records the
/// KS/CVM statistics against its own refit. p = (1 + #{stat_m >= stat_obs}) / (M + 1)
/// over the successful replicates.
inline GofReport bootstrap_pvalues(const Dataset& d, const ParamVector& theta_hat, int M, std::uint64_t seed,
                                   const BootstrapOptions& bo = {}) {
    if (M < 1) throw DomainError("bootstrap_pvalues: M must be positive");
    d.validate();
    const HExtreme g(theta_hat);
    GofReport rep;
    rep.bootstrap_M = M;
    rep.seed = seed;
    {
        const auto u = detail::sorted_cdf(d, g);
        rep.ks_stat = detail::ks_from_sorted_cdf(u);
        rep.cvm_stat = detail::cvm_from_sorted_cdf(u);
    }
    rep.rq_residuals = rq_residuals(d, theta_hat);

    FitOptions refit = bo.refit;
    refit.max_iterations = std::max(50, static_cast<int>(refit.max_iterations * bo.refit_budget));
    refit.restarts = std::min(refit.restarts, 1);

    struct Stats {
        bool ok = false;
        double ks = 0.0, cvm = 0.0;
    };
    std::vector<Stats> out(static_cast<std::size_t>(M));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int m = next++; m < M; m = next++) {
            Stats s;
            try {
                Dataset rd(g.sample(d.size(), seed, static_cast<std::uint64_t>(m)), "replicate");
                const FitResult f = mle_fit(rd, theta_hat, refit);
                const auto u = detail::sorted_cdf(rd, HExtreme(f.theta_hat));
                s.ks = detail::ks_from_sorted_cdf(u);
                s.cvm = detail::cvm_from_sorted_cdf(u);
                s.ok = std::isfinite(s.ks) && std::isfinite(s.cvm);
            } catch (const std::exception&) {
                s.ok = false;
            }
            out[static_cast<std::size_t>(m)] = s;
        }
    };
    unsigned nt = bo.threads ? bo.threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min<unsigned>(nt, static_cast<unsigned>(M));
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    int ok = 0, ks_ge = 0, cvm_ge = 0;
    for (const auto& s : out) {
        if (!s.ok) {
            ++rep.failures;
            continue;
        }
        ++ok;
        ks_ge += s.ks >= rep.ks_stat;
        cvm_ge += s.cvm >= rep.cvm_stat;
    }
    rep.ks_pvalue = (1.0 + ks_ge) / (ok + 1.0);
    rep.cvm_pvalue = (1.0 + cvm_ge) / (ok + 1.0);
    rep.wide_pvalue_warning = M < kWidePValueThreshold;
    rep.quality_warning = rep.failures * 10 > M;
    return rep;
}

}  // namespace hextreme

#endif  // HEXTREME_GOF_HPP
