#ifndef HEXTREME_CLI_HPP
#define HEXTREME_CLI_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hextreme/hextreme.hpp"
#include "hextreme_cli/bundled_data.hpp"

namespace hextreme::cli {

using nlohmann::json;

/// Input problems (unreadable file, bad rows, non-positive values).
class DataError : public std::runtime_error {
public:
    DataError(const std::string& what, std::size_t line = 0) : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Bad invocation: missing or inconsistent flags, invalid theta.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace detail

/// One positive number per line; a single non-numeric first line is taken
/// as a header. Blank lines are ignored.
inline Dataset ingest_text(std::string_view text, const std::string& name) {
    std::vector<double> values;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty()) continue;
        const auto v = detail::parse_number(line);
        const bool first = !seen_content;
        seen_content = true;
        if (!v) {
            if (first) continue;  // header
            throw ParseError("non-numeric value '" + std::string(line) + "' at line " + std::to_string(line_no),
                             line_no);
        }
        if (!(*v > 0.0) || !std::isfinite(*v)) {
            throw DomainError("non-positive or non-finite value at line " + std::to_string(line_no));
        }
        values.push_back(*v);
    }
    if (values.size() < 2) throw DomainError("dataset '" + name + "' has fewer than two observations");
    return Dataset(std::move(values), name);
}

inline std::optional<std::string_view> bundled_text(std::string_view name) {
    if (name == "piracicaba_x") return bundled::piracicaba_x;
    if (name == "carbon_y") return bundled::carbon_y;
    if (name == "failures_z") return bundled::failures_z;
    return std::nullopt;
}

inline Dataset ingest_bundled(std::string_view name) {
    const auto text = bundled_text(name);
    if (!text) throw UsageError("unknown bundled dataset '" + std::string(name) + "'");
    return ingest_text(*text, std::string(name));
}

inline Dataset ingest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open data file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ingest_text(ss.str(), path);
}

enum class Command { eval, fit, gof, sample, report };
enum class Format { json, csv };

struct RunConfig {
    Command command = Command::fit;
    std::optional<std::string> input_path;
    std::optional<std::string> dataset;
    SubModelKind submodel = SubModelKind::gamma;
    bool submodel_given = false;
    FitMethod method = FitMethod::pipeline;
    std::optional<ParamVector> theta;
    int bootstrap_M = 1000;
    std::uint64_t seed = 20240501;
    unsigned threads = 0;
    std::size_t n = 1000;
    std::optional<std::string> output_path;
    Format format = Format::json;
};

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::eval: return "eval";
        case Command::fit: return "fit";
        case Command::gof: return "gof";
        case Command::sample: return "sample";
        case Command::report: return "report";
    }
    return "unknown";
}

/// Loads the configured data; every input problem surfaces as DataError.
inline std::optional<Dataset> load_data(const RunConfig& c) {
    if (c.input_path && c.dataset) throw UsageError("use either --data or --dataset, not both");
    try {
        if (c.input_path) return ingest_file(*c.input_path);
        if (c.dataset) return ingest_bundled(*c.dataset);
    } catch (const ParseError& e) {
        throw DataError(e.what(), e.line());
    } catch (const DomainError& e) {
        throw DataError(e.what());
    }
    return std::nullopt;
}

inline Dataset require_data(const RunConfig& c) {
    auto d = load_data(c);
    if (!d) throw UsageError("this command needs --data PATH or --dataset NAME");
    return std::move(*d);
}

inline ParamVector require_theta(const RunConfig& c) {
    if (!c.theta) throw UsageError("this command needs --theta v1,v2,v3,v4,v5,v6");
    if (!is_integrable(*c.theta)) {
        throw UsageError("--theta does not define a normalizable density (" + std::string(to_string(classify(*c.theta))) +
                         ")");
    }
    return *c.theta;
}

/// The default sub-model for a bundled dataset when none was given.
inline SubModelKind default_submodel(const RunConfig& c) {
    if (c.submodel_given) return c.submodel;
    if (c.dataset == "piracicaba_x") return SubModelKind::frechet;
    if (c.dataset == "carbon_y") return SubModelKind::weibull;
    return SubModelKind::gamma;
}

// ---------------------------------------------------------------------------
// Document pieces
// ---------------------------------------------------------------------------

inline json skeleton(const RunConfig& c) {
    json j;
    j["meta"] = {{"command", std::string(to_string(c.command))}, {"seed", c.seed}, {"version", HEXTREME_VERSION}};
    j["theta_hat"] = nullptr;
    j["loglik"] = nullptr;
    j["criteria"] = nullptr;
    j["gof"] = nullptr;
    j["residuals"] = nullptr;
    j["plot"] = nullptr;
    return j;
}

inline json theta_json(const ParamVector& p) {
    const auto a = p.to_array();
    return json(std::vector<double>(a.begin(), a.end()));
}

inline json criteria_json(const CriteriaReport& c) {
    return {{"aic", c.aic}, {"bic", c.bic}, {"edc", c.edc}, {"k", c.k}, {"n", c.n}};
}

inline json describe_json(const Descriptive& d) {
    return {{"n", d.n},       {"min", d.min}, {"q1", d.q1}, {"median", d.median}, {"mean", d.mean},
            {"q3", d.q3},     {"max", d.max}, {"sd", d.sd}, {"cs", d.skewness},   {"ck", d.kurtosis}};
}

/// Histogram with Freedman-Diaconis bin width (Sturges when the IQR vanishes).
inline std::pair<std::vector<double>, std::vector<int>> histogram(const std::vector<double>& values) {
    const Descriptive d = describe(values);
    const double n = static_cast<double>(values.size());
    double width = 2.0 * (d.q3 - d.q1) / std::cbrt(n);
    int bins = width > 0.0 ? static_cast<int>(std::ceil((d.max - d.min) / width))
                           : static_cast<int>(std::ceil(std::log2(n) + 1.0));
    bins = std::clamp(bins, 1, 200);
    width = (d.max - d.min) / bins;
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = d.min + width * i;
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int k = width > 0.0 ? static_cast<int>((v - d.min) / width) : 0;
        ++counts[static_cast<std::size_t>(std::clamp(k, 0, bins - 1))];
    }
    return {edges, counts};
}

/// Plot arrays: histogram, density and cdf on a 200-point grid, ECDF and
/// QQ pairs (normal quantile, sorted residual).
inline json plot_json(const std::optional<Dataset>& data, const HExtreme& g) {
    json plot;
    double lo, hi;
    if (data) {
        const auto [mn, mx] = std::minmax_element(data->values.begin(), data->values.end());
        lo = *mn * 0.5;
        hi = *mx * 1.1;
    } else {
        lo = g.quantile(1e-3);
        hi = g.quantile(1.0 - 1e-3);
    }
    json pdf_grid = json::array(), cdf_grid = json::array();
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) xs.push_back(lo + (hi - lo) * i / 199.0);
    const auto cdfs = g.cdf_sorted(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        pdf_grid.push_back({xs[i], g.pdf(xs[i])});
        cdf_grid.push_back({xs[i], cdfs[i]});
    }
    plot["pdf_grid"] = pdf_grid;
    plot["cdf_grid"] = cdf_grid;
    if (data) {
        const auto [edges, counts] = histogram(data->values);
        plot["hist_edges"] = edges;
        plot["hist_counts"] = counts;
        const Ecdf e(*data);
        json ecdf_pts = json::array();
        for (double y : e.sorted()) ecdf_pts.push_back({y, e(y)});
        plot["ecdf"] = ecdf_pts;
        auto r = rq_residuals(*data, g.theta());
        std::sort(r.begin(), r.end());
        json qq = json::array();
        const double n = static_cast<double>(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            qq.push_back({normal_quantile((static_cast<double>(i) + 0.5) / n), r[i]});
        }
        plot["qq"] = qq;
    } else {
        plot["hist_edges"] = nullptr;
        plot["hist_counts"] = nullptr;
        plot["ecdf"] = nullptr;
        plot["qq"] = nullptr;
    }
    return plot;
}

inline json gof_json(const GofReport& r) {
    return {{"ks", r.ks_stat},
            {"cvm", r.cvm_stat},
            {"ks_p", r.ks_pvalue},
            {"cvm_p", r.cvm_pvalue},
            {"M", r.bootstrap_M},
            {"seed", r.seed},
            {"failures", r.failures},
            {"wide_p_warning", r.wide_pvalue_warning},
            {"quality_warning", r.quality_warning}};
}

inline json fit_json(const FitResult& f) {
    return {{"theta_hat", theta_json(f.theta_hat)},
            {"method", std::string(to_string(f.method))},
            {"loglik", f.loglik},
            {"objective", f.objective},
            {"converged", f.converged},
            {"iterations", f.iterations},
            {"k", f.k_params},
            {"diagnostics", f.diagnostics}};
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline json cmd_eval(const RunConfig& c) {
    const ParamVector p = require_theta(c);
    const HExtreme g(p);
    const auto data = load_data(c);
    json j = skeleton(c);
    j["theta_hat"] = theta_json(p);
    json rows = json::array();
    std::vector<double> ys;
    if (data) {
        ys = data->values;
    } else {
        const double lo = g.quantile(1e-3), hi = g.quantile(1.0 - 1e-3);
        for (int i = 0; i < 200; ++i) ys.push_back(lo + (hi - lo) * i / 199.0);
    }
    for (double y : ys) {
        rows.push_back({{"y", y}, {"pdf", g.pdf(y)}, {"cdf", g.cdf(y)}, {"survival", g.sf(y)}, {"hazard", g.hazard(y)}});
    }
    j["table"] = rows;
    if (data) {
        j["loglik"] = log_likelihood(p, *data);
        j["criteria"] = criteria_json(info_criteria(j["loglik"].get<double>(), 6, data->size()));
    }
    j["plot"] = plot_json(data, g);
    return j;
}

inline FitResult run_fit(const Dataset& d, const RunConfig& c) {
    const SubModelKind kind = default_submodel(c);
    FitOptions o;
    switch (c.method) {
        case FitMethod::pipeline: return pipeline_fit(d, kind, o);
        case FitMethod::lse: return lse_fit(d, c.theta ? require_theta(c) : initial_guess(d, kind), o);
        case FitMethod::mle: return mle_fit(d, c.theta ? require_theta(c) : initial_guess(d, kind), o);
    }
    throw UsageError("unknown method");
}

inline json cmd_fit(const RunConfig& c) {
    const Dataset d = require_data(c);
    const FitResult f = run_fit(d, c);
    json j = skeleton(c);
    j["theta_hat"] = theta_json(f.theta_hat);
    j["loglik"] = f.loglik;
    j["criteria"] = criteria_json(info_criteria(f.loglik, f.k_params, d.size()));
    j["fit"] = fit_json(f);
    j["plot"] = plot_json(d, HExtreme(f.theta_hat));
    return j;
}

inline json cmd_gof(const RunConfig& c) {
    const Dataset d = require_data(c);
    if (c.bootstrap_M < 10) throw UsageError("--bootstrap-m must be at least 10");
    json j = skeleton(c);
    ParamVector p;
    if (c.theta) {
        p = require_theta(c);
    } else {
        const FitResult f = run_fit(d, c);
        p = f.theta_hat;
        j["fit"] = fit_json(f);
    }
    BootstrapOptions bo;
    bo.threads = c.threads;
    const GofReport r = bootstrap_pvalues(d, p, c.bootstrap_M, c.seed, bo);
    j["theta_hat"] = theta_json(p);
    j["loglik"] = log_likelihood(p, d);
    j["criteria"] = criteria_json(info_criteria(j["loglik"].get<double>(), 6, d.size()));
    j["gof"] = gof_json(r);
    j["residuals"] = r.rq_residuals;
    j["plot"] = plot_json(d, HExtreme(p));
    return j;
}

inline json cmd_sample(const RunConfig& c) {
    const ParamVector p = require_theta(c);
    if (c.n == 0) throw UsageError("--n must be positive");
    json j = skeleton(c);
    j["theta_hat"] = theta_json(p);
    j["sample"] = HExtreme(p).sample(c.n, c.seed);
    return j;
}

inline json report_one(const Dataset& d, RunConfig c, const std::string& name) {
    c.dataset = name;
    const SubModelKind kind = default_submodel(c);
    json j = skeleton(c);
    j["dataset"] = name;
    j["descriptive"] = describe_json(describe(d.values));
    const ParamVector p0 = initial_guess(d, kind);
    const double ll0 = log_likelihood(p0, d);
    const FitResult fit = pipeline_fit(d, kind);
    const FitResult lse = lse_fit(d, p0);
    json rows = json::array();
    auto row = [&](const std::string& label, const ParamVector& p, double ll) {
        const CriteriaReport cr = info_criteria(ll, 6, d.size());
        rows.push_back({{"model", label}, {"theta", theta_json(p)}, {"loglik", ll}, {"aic", cr.aic},
                        {"bic", cr.bic}, {"edc", cr.edc}});
    };
    row(std::string(to_string(kind)), p0, ll0);
    row("hextreme_lse", lse.theta_hat, lse.loglik);
    row("hextreme_mle", fit.theta_hat, fit.loglik);
    j["models"] = rows;
    j["fit"] = fit_json(fit);
    j["theta_hat"] = theta_json(fit.theta_hat);
    j["loglik"] = fit.loglik;
    j["criteria"] = criteria_json(info_criteria(fit.loglik, 6, d.size()));
    BootstrapOptions bo;
    bo.threads = c.threads;
    const GofReport r = bootstrap_pvalues(d, fit.theta_hat, c.bootstrap_M, c.seed, bo);
    j["gof"] = gof_json(r);
    j["residuals"] = r.rq_residuals;
    j["plot"] = plot_json(d, HExtreme(fit.theta_hat));
    return j;
}

inline json cmd_report(const RunConfig& c) {
    if (c.bootstrap_M < 10) throw UsageError("--bootstrap-m must be at least 10");
    if (auto d = load_data(c)) {
        return report_one(*d, c, c.dataset ? *c.dataset : d->name);
    }
    json j = skeleton(c);
    json reports = json::array();
    for (const char* name : {"piracicaba_x", "carbon_y", "failures_z"}) {
        reports.push_back(report_one(ingest_bundled(name), c, name));
    }
    j["reports"] = reports;
    return j;
}

inline json run(const RunConfig& c) {
    switch (c.command) {
        case Command::eval: return cmd_eval(c);
        case Command::fit: return cmd_fit(c);
        case Command::gof: return cmd_gof(c);
        case Command::sample: return cmd_sample(c);
        case Command::report: return cmd_report(c);
    }
    throw UsageError("unknown command");
}

// ---------------------------------------------------------------------------
// CSV rendering: long format with a fixed column order.
// ---------------------------------------------------------------------------

inline std::string to_csv(const json& j) {
    std::ostringstream os;
    os.precision(17);
    const std::string cmd = j["meta"]["command"].get<std::string>();
    if (cmd == "eval") {
        os << "y,pdf,cdf,survival,hazard\n";
        for (const auto& r : j["table"]) {
            os << r["y"].get<double>() << ',' << r["pdf"].get<double>() << ',' << r["cdf"].get<double>() << ','
               << r["survival"].get<double>() << ',' << r["hazard"].get<double>() << '\n';
        }
        return os.str();
    }
    if (cmd == "sample") {
        os << "value\n";
        for (const auto& v : j["sample"]) os << v.get<double>() << '\n';
        return os.str();
    }
    os << "section,key,value\n";
    auto emit = [&](const json& doc, const std::string& prefix) {
        if (!doc["theta_hat"].is_null()) {
            for (std::size_t i = 0; i < 6; ++i) {
                os << prefix << "theta,theta" << i + 1 << ',' << doc["theta_hat"][i].get<double>() << '\n';
            }
        }
        if (!doc["loglik"].is_null()) os << prefix << "fit,loglik," << doc["loglik"].get<double>() << '\n';
        if (!doc["criteria"].is_null()) {
            for (const char* k : {"aic", "bic", "edc"}) {
                os << prefix << "criteria," << k << ',' << doc["criteria"][k].get<double>() << '\n';
            }
        }
        if (!doc["gof"].is_null()) {
            for (const char* k : {"ks", "cvm", "ks_p", "cvm_p", "M"}) {
                os << prefix << "gof," << k << ',' << doc["gof"][k] << '\n';
            }
        }
        if (!doc["residuals"].is_null()) {
            std::size_t i = 0;
            for (const auto& r : doc["residuals"]) os << prefix << "residual," << ++i << ',' << r.get<double>() << '\n';
        }
    };
    if (j.contains("reports")) {
        for (const auto& r : j["reports"]) emit(r, r["dataset"].get<std::string>() + ":");
    } else {
        emit(j, "");
    }
    return os.str();
}

}  // namespace hextreme::cli

#endif  // HEXTREME_CLI_HPP
