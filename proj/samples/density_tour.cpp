// Evaluates one member of the family: density, cdf, quantiles, moments,
// entropy and the shape of the density.
//
//   density_tour 1 1 1 0 2 0

#include <cstdio>
#include <cstdlib>

#include "hextreme/hextreme.hpp"

int main(int argc, char** argv) {
    using namespace hextreme;
    ParamVector p(1, 1, 1, 0, 2, 0);
    if (argc == 7) {
        p = ParamVector(std::atof(argv[1]), std::atof(argv[2]), std::atof(argv[3]), std::atof(argv[4]),
                        std::atof(argv[5]), std::atof(argv[6]));
    } else if (argc != 1) {
        std::fprintf(stderr, "usage: %s [t1 t2 t3 t4 t5 t6]\n", argv[0]);
        return 1;
    }
    if (!is_integrable(p)) {
        std::fprintf(stderr, "not a density: %s\n", std::string(to_string(classify(p))).c_str());
        return 1;
    }

    const HExtreme g(p);
    const HValue h = h_full(p);
    std::printf("normalizer %.12g via %s (abs err ~ %.1e)\n", h.value, std::string(to_string(h.method)).c_str(),
                h.abs_error_estimate);

    std::printf("%10s %14s %14s %14s\n", "y", "pdf", "cdf", "hazard");
    for (double q : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
        const double y = g.quantile(q);
        std::printf("%10.5f %14.8g %14.8g %14.8g\n", y, g.pdf(y), g.cdf(y), g.hazard(y));
    }

    std::printf("mean %.8g  E[Y^2] %.8g  entropy %.8g\n", moment(1.0, p), moment(2.0, p), entropy(p));

    const ShapeReport s = shape_classify(p);
    std::printf("shape: %s", std::string(to_string(s.shape)).c_str());
    for (double y : s.critical_points) std::printf("  critical point %.8g", y);
    std::printf("\n");
    return 0;
}
