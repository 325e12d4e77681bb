#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cli.hpp"

namespace {

using hextreme::cli::json;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

int fail(int code, const std::string& kind, const std::string& message, std::size_t line = 0) {
    json err = {{"error", {{"kind", kind}, {"message", message}}}};
    if (line > 0) err["error"]["line"] = line;
    std::cerr << err.dump() << '\n';
    return code;
}

hextreme::ParamVector parse_theta(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw hextreme::cli::UsageError("--theta: '" + item + "' is not a number");
        }
    }
    if (v.size() != 6) throw hextreme::cli::UsageError("--theta needs exactly six comma-separated values");
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hextreme;
    using namespace hextreme::cli;

    CLI::App app{"Fit and evaluate the extreme value H-function distribution family", "hextreme"};
    app.set_version_flag("--version", std::string(HEXTREME_VERSION));
    app.require_subcommand(1, 1);

    RunConfig cfg;
    std::string data_path, dataset, submodel, method = "pipeline", theta, out, format = "json";
    int threads = 0;
    long long n = 1000;

    auto add_common = [&](CLI::App* sub) {
        auto* d = sub->add_option("--data", data_path, "Data file: one positive value per line, optional header");
        auto* b = sub->add_option("--dataset", dataset, "Bundled dataset")
                      ->check(CLI::IsMember({"piracicaba_x", "carbon_y", "failures_z"}));
        d->excludes(b);
        sub->add_option("--submodel", submodel, "Sub-model used for the starting values")
            ->check(CLI::IsMember({"gamma", "weibull", "frechet", "exponential"}));
        sub->add_option("--method", method, "Estimation method")->check(CLI::IsMember({"lse", "mle", "pipeline"}));
        sub->add_option("--theta", theta, "Parameter vector v1,...,v6");
        sub->add_option("--bootstrap-m", cfg.bootstrap_M, "Bootstrap replicates (at least 10)");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--threads", threads, "Worker threads for the bootstrap (0: all cores)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--n", n, "Sample size for the sample command")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "Output file (default: standard output)");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    };
    struct Sub {
        const char* name;
        const char* help;
        Command cmd;
    };
    const Sub subs[] = {
        {"eval", "Density, cdf, survival and hazard at the data points or on a grid", Command::eval},
        {"fit", "Estimate the parameters", Command::fit},
        {"gof", "Goodness of fit with parametric bootstrap p-values", Command::gof},
        {"sample", "Draw a seeded sample", Command::sample},
        {"report", "Descriptive statistics, fits, criteria and goodness of fit per dataset", Command::report},
    };
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub);
        sub->callback([&cfg, c = s.cmd] { cfg.command = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (!data_path.empty()) cfg.input_path = data_path;
        if (!dataset.empty()) cfg.dataset = dataset;
        if (!submodel.empty()) {
            cfg.submodel = *submodel_from_string(submodel);
            cfg.submodel_given = true;
        }
        cfg.method = method == "lse" ? FitMethod::lse : method == "mle" ? FitMethod::mle : FitMethod::pipeline;
        if (!theta.empty()) cfg.theta = parse_theta(theta);
        cfg.threads = static_cast<unsigned>(threads);
        cfg.n = static_cast<std::size_t>(n);
        if (!out.empty()) cfg.output_path = out;
        cfg.format = format == "csv" ? Format::csv : Format::json;

        const json doc = run(cfg);
        const std::string text = cfg.format == Format::json ? doc.dump(2) + "\n" : to_csv(doc);
        if (cfg.output_path) {
            std::ofstream f(*cfg.output_path, std::ios::binary);
            if (!f) return fail(kData, "io", "cannot write '" + *cfg.output_path + "'");
            f << text;
        } else {
            std::cout << text;
        }
        return kOk;
    } catch (const UsageError& e) {
        return fail(kUsage, "usage", e.what());
    } catch (const DataError& e) {
        return fail(kData, "data", e.what(), e.line());
    } catch (const ParseError& e) {
        return fail(kData, "parse", e.what(), e.line());
    } catch (const DomainError& e) {
        return fail(kNumeric, "domain", e.what());
    } catch (const NumericError& e) {
        return fail(kNumeric, "numeric", e.what());
    } catch (const EstimationError& e) {
        return fail(kNumeric, "estimation", e.what());
    } catch (const std::exception& e) {
        return fail(kNumeric, "internal", e.what());
    }
}
