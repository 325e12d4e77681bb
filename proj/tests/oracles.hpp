#ifndef HEXTREME_TESTS_ORACLES_HPP
#define HEXTREME_TESTS_ORACLES_HPP

// Independent reference computations for the test suites. Nothing here calls
// into the library's integration code: the kernel is re-typed from its
// definition and integrals go through Boost's adaptive Gauss-Kronrod rule.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hextreme/param.hpp"

namespace oracle {

// log of y^t6 exp(-t1 y - (t2 y^t3 + t4)^t5) as a function of t = log y,
// with the dy = y dt Jacobian folded in.
inline double log_integrand_t(const hextreme::ParamVector& p, double t) {
    const double y = std::exp(t);
    const double base = p.scale * std::exp(p.inner_power * t) + p.shift;
    const double u = std::pow(base, p.outer_power);
    const double v = (p.poly_exponent + 1.0) * t - p.rate * y - u;
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

struct Window {
    double lo, hi, peak;
};

// Support window on the log axis where the log integrand is within 80 of its
// maximum, located on a fine grid.
inline Window window(const std::function<double(double)>& f, double tmin = -1000.0, double tmax = 1000.0) {
    const int n = 20000;
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) peak = std::max(peak, f(tmin + (tmax - tmin) * i / n));
    double lo = tmax, hi = tmin;
    for (int i = 0; i <= n; ++i) {
        const double t = tmin + (tmax - tmin) * i / n;
        if (f(t) > peak - 80.0) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    const double pad = (tmax - tmin) / n;
    return {lo - pad, hi + pad, peak};
}

// Integral of exp(f(t)) * w(t) dt over the window, scaled by exp(-peak).
inline double scaled_integral(const std::function<double(double)>& f, const std::function<double(double)>& w,
                              const Window& win, double a, double b) {
    using boost::math::quadrature::gauss_kronrod;
    a = std::max(a, win.lo);
    b = std::min(b, win.hi);
    if (!(b > a)) return 0.0;
    // Panels of width at most 0.5 keep the peak resolved.
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double l = a + (b - a) * i / panels, r = a + (b - a) * (i + 1) / panels;
        s += gauss_kronrod<double, 61>::integrate([&](double t) { return std::exp(f(t) - win.peak) * w(t); }, l, r, 8,
                                                  1e-13);
    }
    return s;
}

// log of the kernel integral over (0, x) (x = +inf for the full integral).
inline double log_h(const hextreme::ParamVector& p, double x = std::numeric_limits<double>::infinity()) {
    auto f = [&](double t) { return log_integrand_t(p, t); };
    const Window win = window(f);
    const double b = std::isinf(x) ? win.hi : std::log(x);
    return win.peak + std::log(scaled_integral(f, [](double) { return 1.0; }, win, win.lo, b));
}

inline double h(const hextreme::ParamVector& p) { return std::exp(log_h(p)); }

inline double h_tail(const hextreme::ParamVector& p, double x) {
    auto f = [&](double t) { return log_integrand_t(p, t); };
    const Window win = window(f);
    return std::exp(win.peak) * scaled_integral(f, [](double) { return 1.0; }, win, std::log(x), win.hi);
}

// E[w(Y)] under the normalized density.
inline double expect(const hextreme::ParamVector& p, const std::function<double(double)>& w_of_y) {
    auto f = [&](double t) { return log_integrand_t(p, t); };
    // Size the window on the weighted integrand so heavy weights keep their tail.
    const Window win = window([&](double t) {
        const double v = f(t) + std::max(0.0, std::log(std::fabs(w_of_y(std::exp(t)))));
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    }, -700.0, 700.0);
    const double num = scaled_integral(f, [&](double t) { return w_of_y(std::exp(t)); }, win, win.lo, win.hi);
    const double den = scaled_integral(f, [](double) { return 1.0; }, win, win.lo, win.hi);
    return num / den;
}

// Central finite difference with step h * max(1, |x|).
template <class F>
double central_diff(F&& f, double x, double h) {
    const double step = h * std::max(1.0, std::fabs(x));
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

// One positive value per line, optional header; the test copy of the format.
inline std::vector<double> read_column(const std::string& path) {
    std::ifstream in(path);
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        double x;
        if (ss >> x) v.push_back(x);
    }
    return v;
}

// Asymptotic one-sample KS critical value at level 1%.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle

#endif  // HEXTREME_TESTS_ORACLES_HPP
