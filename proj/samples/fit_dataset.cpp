// Fits a data file with the sub-model start, the least-squares stage and the
// maximum-likelihood stage, then reports criteria and bootstrap p-values.
//
//   fit_dataset data/carbon_y.txt weibull 200

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "hextreme/hextreme.hpp"

namespace {

hextreme::Dataset read(const char* path) {
    std::ifstream in(path);
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        double x;
        if (ss >> x) v.push_back(x);
    }
    return hextreme::Dataset(std::move(v), path);
}

void row(const char* label, const hextreme::ParamVector& p, const hextreme::Dataset& d) {
    const auto c = hextreme::info_criteria(hextreme::log_likelihood(p, d), 6, d.size());
    std::printf("%-10s AIC %9.3f  BIC %9.3f  KS %.4f\n", label, c.aic, c.bic, hextreme::ks_statistic(d, p));
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hextreme;
    if (argc < 3) {
        std::fprintf(stderr, "usage: %s DATA_FILE gamma|weibull|frechet|exponential [M]\n", argv[0]);
        return 1;
    }
    const auto kind = submodel_from_string(argv[2]);
    if (!kind) {
        std::fprintf(stderr, "unknown sub-model '%s'\n", argv[2]);
        return 1;
    }
    const int M = argc > 3 ? std::atoi(argv[3]) : 100;

    try {
        const Dataset d = read(argv[1]);
        const ParamVector start = initial_guess(d, *kind);
        const FitResult lse = lse_fit(d, start);
        const FitResult mle = pipeline_fit(d, *kind);

        row(argv[2], start, d);
        row("lse", lse.theta_hat, d);
        row("mle", mle.theta_hat, d);
        std::ostringstream theta;
        theta << mle.theta_hat;
        std::printf("theta_hat %s\n", theta.str().c_str());

        const GofReport g = bootstrap_pvalues(d, mle.theta_hat, M, 1);
        std::printf("bootstrap M=%d: KS p %.3f, CVM p %.3f%s\n", M, g.ks_pvalue, g.cvm_pvalue,
                    g.wide_pvalue_warning ? " (few replicates)" : "");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
