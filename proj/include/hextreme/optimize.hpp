#ifndef HEXTREME_OPTIMIZE_HPP
#define HEXTREME_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace hextreme::opt {

using Vec = Eigen::VectorXd;

struct MinResult {
    Vec x;
    double f = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int max_evaluations = 4000;
    double f_tol = 1e-10;   // spread of simplex values
    double x_tol = 1e-9;    // simplex diameter
    int restarts = 3;       // restart ladder length
    double restart_shrink = 0.5;
};

/// Nelder-Mead with dimension-adaptive coefficients (Gao and Han, 2012).
/// Non-finite objective values are treated as +inf so that the simplex
/// simply retreats from invalid regions. After convergence the search is
/// restarted from the best vertex with a shrunk simplex, which guards against
/// the classical collapse onto a non-stationary point.
inline MinResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0, const Vec& step,
                             const NelderMeadOptions& o = {}) {
    const auto n = x0.size();
    const double dn = static_cast<double>(n);
    const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;
    MinResult res;
    auto eval = [&](const Vec& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    Vec best = x0;
    double fbest = eval(x0);
    Vec cur_step = step;
    for (int round = 0; round <= o.restarts; ++round) {
        std::vector<Vec> s(static_cast<std::size_t>(n) + 1, best);
        std::vector<double> fs(s.size());
        fs[0] = fbest;
        for (Eigen::Index i = 0; i < n; ++i) {
            s[static_cast<std::size_t>(i) + 1][i] += cur_step[i];
            fs[static_cast<std::size_t>(i) + 1] = eval(s[static_cast<std::size_t>(i) + 1]);
        }
        std::vector<std::size_t> idx(s.size());
        bool done = false;
        while (res.evaluations < o.max_evaluations) {
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
            const std::size_t lo = idx.front(), hi = idx.back(), nh = idx[idx.size() - 2];
            double diam = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) diam = std::max(diam, (s[i] - s[lo]).cwiseAbs().maxCoeff());
            const double spread = fs[hi] - fs[lo];
            ++res.iterations;
            if (std::isfinite(fs[hi]) && spread <= o.f_tol * (1.0 + std::fabs(fs[lo])) && diam <= o.x_tol * 1e3) {
                done = true;
                break;
            }
            if (diam <= o.x_tol) {
                done = true;
                break;
            }
            Vec c = Vec::Zero(n);
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (i != hi) c += s[i];
            }
            c /= dn;
            const Vec xr = c + alpha * (c - s[hi]);
            const double fr = eval(xr);
            if (fr < fs[lo]) {
                const Vec xe = c + beta * (xr - c);
                const double fe = eval(xe);
                if (fe < fr) { s[hi] = xe; fs[hi] = fe; } else { s[hi] = xr; fs[hi] = fr; }
                continue;
            }
            if (fr < fs[nh]) {
                s[hi] = xr;
                fs[hi] = fr;
                continue;
            }
            const bool outside = fr < fs[hi];
            const Vec xc = outside ? Vec(c + gamma * (xr - c)) : Vec(c - gamma * (c - s[hi]));
            const double fc = eval(xc);
            if (fc < std::min(fr, fs[hi])) {
                s[hi] = xc;
                fs[hi] = fc;
                continue;
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (i == lo) continue;
                s[i] = s[lo] + delta * (s[i] - s[lo]);
                fs[i] = eval(s[i]);
            }
        }
        const auto it = std::min_element(fs.begin(), fs.end());
        const std::size_t b = static_cast<std::size_t>(it - fs.begin());
        const double improvement = fbest - fs[b];
        if (fs[b] <= fbest) {
            fbest = fs[b];
            best = s[b];
        }
        res.converged = done;
        if (res.evaluations >= o.max_evaluations) break;
        // A restart that no longer moves the optimum ends the ladder.
        if (round > 0 && improvement <= o.f_tol * (1.0 + std::fabs(fbest))) break;
        cur_step *= o.restart_shrink;
    }
    res.x = best;
    res.f = fbest;
    return res;
}

struct BfgsOptions {
    int max_iterations = 200;
    double g_tol = 1e-7;
    double f_tol = 1e-12;
};

/// BFGS with Armijo backtracking. `fg` returns f and fills the gradient;
/// non-finite values reject the trial point.
inline MinResult bfgs(const std::function<double(const Vec&, Vec&)>& fg, const Vec& x0, const BfgsOptions& o = {}) {
    const auto n = x0.size();
    MinResult res;
    Vec x = x0, g(n), gn(n);
    double fx = fg(x, g);
    ++res.evaluations;
    res.x = x;
    res.f = fx;
    if (!std::isfinite(fx) || !g.allFinite()) return res;
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    const double g0 = std::max(1.0, g.cwiseAbs().maxCoeff());
    hinv /= g0;
    for (int it = 0; it < o.max_iterations; ++it) {
        res.iterations = it + 1;
        if (g.cwiseAbs().maxCoeff() <= o.g_tol * (1.0 + std::fabs(fx))) {
            res.converged = true;
            break;
        }
        Vec d = -hinv * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            hinv = Eigen::MatrixXd::Identity(n, n) / g0;
            d = -hinv * g;
            slope = g.dot(d);
        }
        double t = 1.0, ft = 0.0;
        Vec xt;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            xt = x + t * d;
            ft = fg(xt, gn);
            ++res.evaluations;
            if (std::isfinite(ft) && gn.allFinite() && ft <= fx + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        const Vec sv = xt - x, yv = gn - g;
        const double sy = sv.dot(yv);
        const double df = fx - ft;
        x = xt;
        g = gn;
        fx = ft;
        if (sy > 1e-12 * sv.norm() * yv.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
            hinv = (id - rho * sv * yv.transpose()) * hinv * (id - rho * yv * sv.transpose()) +
                   rho * sv * sv.transpose();
        }
        if (df <= o.f_tol * (1.0 + std::fabs(fx))) {
            res.converged = true;
            break;
        }
    }
    res.x = x;
    res.f = fx;
    return res;
}

}  // namespace hextreme::opt

#endif  // HEXTREME_OPTIMIZE_HPP
