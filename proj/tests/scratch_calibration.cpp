// Scratch harness used while pinning calibration references; not part of the
// test suite.
#include <cstdio>

#include "dagcheck/experiments.hpp"

using namespace dagcheck;

int main(int argc, char** argv) {
    Type1Config config;
    config.samples = argc > 1 ? std::atoi(argv[1]) : 200;
    config.replications = argc > 2 ? std::atoi(argv[2]) : 300;
    config.max_conditioning = argc > 3 ? std::atoi(argv[3]) : 4;
    config.seed = 20240817;
    config.workers = 2;
    const auto rows = run_type1(config);
    std::printf("%s", type1_csv(rows).c_str());
    return 0;
}
