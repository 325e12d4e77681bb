#ifndef HEXTREME_KERNEL_HPP
#define HEXTREME_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hextreme/error.hpp"
#include "hextreme/param.hpp"
#include "hextreme/quadrature.hpp"

namespace hextreme {

/// (scale * y^inner_power + shift)^outer_power, with y^c passed in as `yc`.
inline double power_term_from(const ParamVector& p, double yc) {
    const double lead = p.scale == 0.0 ? 0.0 : p.scale * yc;
    return std::pow(lead + p.shift, p.outer_power);
}

inline double power_term(const ParamVector& p, double y) {
    return power_term_from(p, std::pow(y, p.inner_power));
}

/// Log of the unnormalized density y^poly * exp(-rate*y - power_term(y)).
inline double log_kernel(const ParamVector& p, double y) {
    if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
    const double linear = p.rate == 0.0 ? 0.0 : p.rate * y;
    const double v = p.poly_exponent * std::log(y) - linear - power_term(p, y);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

/// Log kernel in t = log y, including the dy = e^t dt Jacobian.
inline double log_kernel_t(const ParamVector& p, double t) {
    const double y = std::exp(t);
    const double linear = p.rate == 0.0 ? 0.0 : p.rate * y;
    const double u = power_term_from(p, std::exp(p.inner_power * t));
    const double v = (p.poly_exponent + 1.0) * t - linear - u;
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

/// Panel decomposition of the kernel integral on the log axis. The integrand
/// exp(log_kernel_t - log_peak) is bounded by one, so panel masses and all
/// derived quantities stay in range whatever the size of the normalizer.
class KernelProfile {
public:
    static constexpr double kScanStep = 0.5;
    static constexpr double kScanHalfWidth = 60.0;
    static constexpr double kLogLimit = 700.0;
    static constexpr double kDrop = 46.0;
    static constexpr double kTailTol = 1e-18;
    static constexpr double kPanelTol = 1e-15;

    explicit KernelProfile(const ParamVector& p) : theta_(p) { build(); }

    const ParamVector& theta() const noexcept { return theta_; }
    double phi(double t) const { return log_kernel_t(theta_, t); }
    double scaled(double t) const { return std::exp(phi(t) - log_peak_); }

    double log_peak() const noexcept { return log_peak_; }
    double t_peak() const noexcept { return t_peak_; }
    /// Scaled total mass; the integral itself is exp(log_peak) * total().
    double total() const noexcept { return total_; }
    double log_total() const noexcept { return log_peak_ + std::log(total_); }
    double abs_error() const noexcept { return abs_error_; }
    const std::vector<double>& edges() const noexcept { return edges_; }
    const std::vector<double>& panel_mass() const noexcept { return mass_; }
    long evaluations() const noexcept { return evaluations_; }

    /// Scaled mass of (-inf, t).
    double mass_below(double t) const {
        if (t <= edges_.front()) return outer_tail(t, /*left=*/true);
        if (t >= edges_.back()) return total_ - outer_tail(t, false);
        const std::size_t i = panel_index(t);
        const double left = below_[i] + integrate_scaled(edges_[i], t);
        const double right = above_[i + 1] + integrate_scaled(t, edges_[i + 1]);
        // Use the smaller side and complement it, for relative accuracy in both tails.
        return left <= right ? left : total_ - right;
    }

    /// Scaled mass of (t, inf).
    double mass_above(double t) const {
        if (t >= edges_.back()) return outer_tail(t, false);
        if (t <= edges_.front()) return total_ - outer_tail(t, true);
        const std::size_t i = panel_index(t);
        const double right = above_[i + 1] + integrate_scaled(t, edges_[i + 1]);
        const double left = below_[i] + integrate_scaled(edges_[i], t);
        return right <= left ? right : total_ - left;
    }

    /// The t at which mass_below(t) = q, for 0 < q < total().
    double solve_mass_below(double q) const {
        if (!(q > 0.0) || !(q < total_)) throw DomainError("solve_mass_below: target outside (0, total)");
        const bool from_left = q <= 0.5 * total_;
        // Work with the smaller side so tail quantiles keep relative accuracy.
        const double target = from_left ? q : total_ - q;
        if (from_left && target <= left_tail_) return invert_outer_tail(target, true);
        if (!from_left && target <= right_tail_) return invert_outer_tail(target, false);

        std::size_t i = 0;
        if (from_left) {
            i = static_cast<std::size_t>(std::upper_bound(below_.begin(), below_.end(), target) -
                                         below_.begin());
            i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, mass_.size() - 1);
        } else {
            // above_ is nonincreasing; find the panel whose right-side mass brackets target.
            std::size_t lo = 0, hi = above_.size() - 1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                if (above_[mid] > target) lo = mid; else hi = mid;
            }
            i = std::min(lo, mass_.size() - 1);
        }
        double a = edges_[i];
        double b = edges_[i + 1];
        const double base = from_left ? below_[i] : above_[i + 1];
        // residual(t) = side mass - target, increasing in t from the left,
        // decreasing from the right.
        auto residual = [&](double t) {
            return from_left ? base + integrate_scaled(edges_[i], t) - target
                             : base + integrate_scaled(t, edges_[i + 1]) - target;
        };
        double t = 0.5 * (a + b);
        const double tiny = 1e-15 * std::max(1.0, std::fabs(t));
        for (int it = 0; it < 200; ++it) {
            const double r = residual(t);
            if (r == 0.0) return t;
            const bool too_far = from_left ? r > 0.0 : r < 0.0;
            if (too_far) b = t; else a = t;
            const double d = scaled(t);
            double next = d > 0.0 ? (from_left ? t - r / d : t + r / d) : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            if (std::fabs(next - t) <= tiny || b - a <= tiny) return next;
            t = next;
        }
        throw NumericError("solve_mass_below: inversion did not converge", t);
    }

    /// mass_below for an ascending list of log points, integrating each gap once.
    std::vector<double> mass_below_sorted(const std::vector<double>& ts) const {
        std::vector<double> out(ts.size());
        std::size_t i = 0;
        double pos = edges_.front();
        double acc = below_.front();
        for (std::size_t j = 0; j < ts.size(); ++j) {
            const double t = ts[j];
            if (t <= edges_.front()) {
                out[j] = outer_tail(t, true);
                continue;
            }
            if (t >= edges_.back()) {
                out[j] = total_ - outer_tail(t, false);
                continue;
            }
            while (t >= edges_[i + 1]) {
                ++i;
                pos = edges_[i];
                acc = below_[i];
            }
            acc += integrate_scaled(pos, t);
            pos = t;
            out[j] = std::min(acc, total_);
        }
        return out;
    }

    /// Scaled integral of exp(phi - log_peak) * w(t) over the support panels.
    /// Outer tails contribute w(edge) times their mass.
    template <class W>
    auto integrate_weighted(W&& w, double rel_tol = 1e-13) const {
        using T = std::decay_t<decltype(w(0.0))>;
        T sum{};
        const double tol = rel_tol * total_ / static_cast<double>(mass_.size());
        for (std::size_t i = 0; i < mass_.size(); ++i) {
            auto f = [&](double t) -> T { return w(t) * scaled(t); };
            sum += integrate_kronrod(f, edges_[i], edges_[i + 1], tol).value;
        }
        if (left_tail_ > 0.0) sum += w(edges_.front()) * left_tail_;
        if (right_tail_ > 0.0) sum += w(edges_.back()) * right_tail_;
        return sum;
    }

    /// As integrate_weighted, but each panel is first cut at the points
    /// returned by `split(a, b)` (ascending, strictly inside (a, b)).
    template <class W, class S>
    auto integrate_weighted_split(W&& w, S&& split, double rel_tol = 1e-13) const {
        using T = std::decay_t<decltype(w(0.0))>;
        T sum{};
        std::vector<double> cuts;
        for (std::size_t i = 0; i < mass_.size(); ++i) {
            cuts.clear();
            cuts.push_back(edges_[i]);
            for (double c : split(edges_[i], edges_[i + 1])) cuts.push_back(c);
            cuts.push_back(edges_[i + 1]);
            const double tol = rel_tol * total_ / static_cast<double>(mass_.size() * (cuts.size() - 1));
            auto f = [&](double t) -> T { return w(t) * scaled(t); };
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
                sum += integrate_kronrod(f, cuts[j], cuts[j + 1], tol).value;
            }
        }
        if (left_tail_ > 0.0) sum += w(edges_.front()) * left_tail_;
        if (right_tail_ > 0.0) sum += w(edges_.back()) * right_tail_;
        return sum;
    }

private:
    double integrate_scaled(double a, double b) const {
        if (a >= b) return 0.0;
        auto f = [&](double t) { return scaled(t); };
        return integrate_kronrod(f, a, b, kPanelTol * std::max(total_, 1e-300)).value;
    }

    std::size_t panel_index(double t) const {
        auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - edges_.begin());
        return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, mass_.size() - 1);
    }

    // Local slope of phi pointing inward (positive for a decaying tail).
    double inward_slope(double t, bool left) const {
        const double h = 1e-4 * std::max(1.0, std::fabs(t));
        const double s = (phi(t + h) - phi(t - h)) / (2.0 * h);
        return left ? s : -s;
    }

    // Mass beyond t outside the panels, assuming phi is locally linear there.
    double outer_tail(double t, bool left) const {
        const double s = inward_slope(t, left);
        if (!(s > 0.0) || !std::isfinite(s)) return 0.0;
        const double v = scaled(t) / s;
        // Beyond the panels only the outer tail (or a negligible remainder) is left.
        const double cap = std::max(left ? left_tail_ : right_tail_, 1e-12 * total_);
        return std::isfinite(v) ? std::min(v, cap) : 0.0;
    }

    double invert_outer_tail(double target, bool left) const {
        const double edge = left ? edges_.front() : edges_.back();
        const double s = left ? left_slope_ : right_slope_;
        const double log_edge_mass = phi(edge) - log_peak_ - std::log(s);
        const double shift = (std::log(target) - log_edge_mass) / s;
        return left ? edge + shift : edge - shift;
    }

    void build();

    ParamVector theta_;
    double log_peak_ = 0.0;
    double t_peak_ = 0.0;
    double total_ = 0.0;
    double abs_error_ = 0.0;
    double left_tail_ = 0.0;
    double right_tail_ = 0.0;
    double left_slope_ = 0.0;
    double right_slope_ = 0.0;
    long evaluations_ = 0;
    std::vector<double> edges_;
    std::vector<double> mass_;
    std::vector<double> below_;  // mass left of edges_[i], tails included
    std::vector<double> above_;  // mass right of edges_[i], tails included
};

inline void KernelProfile::build() {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> ts;
    std::vector<double> fs;
    for (double t = -kScanHalfWidth; t <= kScanHalfWidth + 1e-9; t += kScanStep) {
        ts.push_back(t);
        fs.push_back(phi(t));
    }
    auto argmax = [&] {
        return static_cast<std::size_t>(std::max_element(fs.begin(), fs.end()) - fs.begin());
    };
    std::size_t k = argmax();
    if (fs[k] == neg_inf) {
        // Nothing visible on the default window; try a coarse sweep of the full range.
        for (double t = -kLogLimit; t <= kLogLimit; t += 4.0 * kScanStep) {
            if (std::fabs(t) <= kScanHalfWidth) continue;
            const double f = phi(t);
            if (f > neg_inf) {
                ts.clear();
                fs.clear();
                for (double s = t - 20.0; s <= t + 20.0; s += kScanStep) {
                    ts.push_back(s);
                    fs.push_back(phi(s));
                }
                break;
            }
        }
        k = argmax();
        if (fs[k] == neg_inf) throw NumericError("kernel vanishes on the whole log axis");
    }
    // Follow a rising edge outward until the peak is interior.
    double step = kScanStep;
    while (k == 0 && ts.front() - step >= -kLogLimit) {
        ts.insert(ts.begin(), ts.front() - step);
        fs.insert(fs.begin(), phi(ts.front()));
        step = std::min(step * 1.25, 8.0);
        k = argmax();
    }
    step = kScanStep;
    while (k + 1 == ts.size() && ts.back() + step <= kLogLimit) {
        ts.push_back(ts.back() + step);
        fs.push_back(phi(ts.back()));
        step = std::min(step * 1.25, 8.0);
        k = argmax();
    }
    if (k == 0 || k + 1 == ts.size()) {
        throw NumericError("kernel integral diverges: no interior maximum on the log axis");
    }

    // Golden-section refinement of the peak inside the bracketing grid cell.
    {
        double a = ts[k - 1], b = ts[k + 1];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = phi(c), fd = phi(d);
        for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
            if (fc >= fd) {
                b = d; d = c; fd = fc;
                c = b - g * (b - a); fc = phi(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + g * (b - a); fd = phi(d);
            }
        }
        t_peak_ = fc >= fd ? c : d;
        log_peak_ = std::max({fc, fd, fs[k]});
        if (fs[k] > std::max(fc, fd)) t_peak_ = ts[k];
    }

    const double threshold = log_peak_ - kDrop;
    std::size_t lo = 0;
    while (lo < fs.size() && !(fs[lo] > threshold)) ++lo;
    std::size_t hi = fs.size() - 1;
    while (hi > 0 && !(fs[hi] > threshold)) --hi;
    lo = lo == 0 ? 0 : lo - 1;
    hi = std::min(hi + 1, fs.size() - 1);
    edges_.assign(ts.begin() + static_cast<std::ptrdiff_t>(lo),
                  ts.begin() + static_cast<std::ptrdiff_t>(hi) + 1);

    // Walk each tail outward until the remaining mass is negligible, or the
    // hard limit is hit, where a locally exponential (linear in t) tail is
    // integrated analytically.
    auto walk = [&](bool left, double& tail, double& slope) {
        double stride = kScanStep;
        for (;;) {
            const double t = left ? edges_.front() : edges_.back();
            const double f = phi(t);
            const double s = inward_slope(t, left);
            const double rest = std::exp(f - log_peak_) / s;
            if (f < threshold && s > 0.0 && rest < kTailTol) return;
            const double next = left ? t - stride : t + stride;
            if (std::fabs(next) > kLogLimit) {
                if (!(s > 0.0) || !std::isfinite(rest)) {
                    throw NumericError("kernel integral diverges in the " +
                                       std::string(left ? "lower" : "upper") + " tail");
                }
                tail = rest;
                slope = s;
                return;
            }
            if (left) edges_.insert(edges_.begin(), next); else edges_.push_back(next);
            stride = std::min(stride * 1.5, 25.0);
        }
    };
    walk(true, left_tail_, left_slope_);
    walk(false, right_tail_, right_slope_);

    mass_.resize(edges_.size() - 1);
    double sum = left_tail_;
    double err = 0.5 * left_tail_ * 1e-3 + 0.5 * right_tail_ * 1e-3;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        auto f = [&](double t) { return scaled(t); };
        auto r = integrate_kronrod(f, edges_[i], edges_[i + 1], kPanelTol);
        mass_[i] = r.value;
        sum += r.value;
        err += r.abs_error;
        evaluations_ += r.evaluations;
    }
    sum += right_tail_;
    total_ = sum;
    if (!(total_ > 0.0) || !std::isfinite(total_)) {
        throw NumericError("kernel integral is not finite and positive", total_);
    }
    below_.assign(edges_.size(), 0.0);
    above_.assign(edges_.size(), 0.0);
    below_[0] = left_tail_;
    for (std::size_t i = 0; i < mass_.size(); ++i) below_[i + 1] = below_[i] + mass_[i];
    above_.back() = right_tail_;
    for (std::size_t i = mass_.size(); i-- > 0;) above_[i] = above_[i + 1] + mass_[i];
    abs_error_ = err;
}

}  // namespace hextreme

#endif  // HEXTREME_KERNEL_HPP
