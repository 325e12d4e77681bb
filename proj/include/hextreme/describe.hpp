#ifndef HEXTREME_DESCRIBE_HPP
#define HEXTREME_DESCRIBE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "hextreme/error.hpp"

namespace hextreme {

/// Summary statistics in the layout of a descriptive table. Quartiles use
/// linear interpolation between order statistics (the common "type 7" rule);
/// sd uses the n-1 denominator and skewness/kurtosis are standardized by it,
/// kurtosis reported in excess of 3.
struct Descriptive {
    std::size_t n = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, mean = 0.0, q3 = 0.0, max = 0.0;
    double sd = 0.0, skewness = 0.0, kurtosis = 0.0;
};

inline double quantile_type7(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline Descriptive describe(const std::vector<double>& values) {
    if (values.size() < 2) throw DomainError("describe: at least two values are required");
    std::vector<double> s = values;
    std::sort(s.begin(), s.end());
    Descriptive d;
    d.n = s.size();
    const double n = static_cast<double>(d.n);
    d.min = s.front();
    d.max = s.back();
    d.q1 = quantile_type7(s, 0.25);
    d.median = quantile_type7(s, 0.5);
    d.q3 = quantile_type7(s, 0.75);
    double sum = 0.0;
    for (double v : s) sum += v;
    d.mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : s) {
        const double e = v - d.mean;
        m2 += e * e;
        m3 += e * e * e;
        m4 += e * e * e * e;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    d.sd = std::sqrt(m2 * n / (n - 1.0));
    d.skewness = m3 / std::pow(d.sd, 3.0);
    d.kurtosis = m4 / std::pow(d.sd, 4.0) - 3.0;
    return d;
}

}  // namespace hextreme

#endif  // HEXTREME_DESCRIBE_HPP
