// Scratch: fixed-seed null rejection rates to freeze into the unit tests.
#include <cmath>
#include <cstdio>

#include "dagcheck/ci.hpp"
#include "dagcheck/rng.hpp"

using namespace dagcheck;

namespace {

Dataset two_independent(int n, Rng& rng) {
    Eigen::MatrixXd m(n, 2);
    for (int r = 0; r < n; ++r) {
        m(r, 0) = rng.normal();
        m(r, 1) = rng.normal();
    }
    return Dataset(std::move(m), {"x", "y"});
}

Dataset sine_chain(int n, Rng& rng) {
    // x -> z -> y with y = sin(z) + noise; x _||_ y | z holds.
    Eigen::MatrixXd m(n, 3);
    for (int r = 0; r < n; ++r) {
        const double x = rng.normal();
        const double z = 0.8 * x + 0.6 * rng.normal();
        const double y = std::sin(3.0 * z) + 0.3 * rng.normal();
        m(r, 0) = x;
        m(r, 1) = y;
        m(r, 2) = z;
    }
    return Dataset(std::move(m), {"x", "y", "z"});
}

}  // namespace

int main() {
    {
        Rng rng(101);
        int rejects = 0;
        const int reps = 400;
        for (int rep = 0; rep < reps; ++rep) {
            const auto data = two_independent(1000, rng);
            if (pcorr_test(data, 0, 1, {}).reject(0.05)) ++rejects;
        }
        std::printf("pcorr null (N=1000, 400 reps, seed 101): %.4f\n", rejects / double(reps));
    }
    {
        Rng rng(102);
        int rejects = 0;
        const int reps = 400;
        for (int rep = 0; rep < reps; ++rep) {
            const auto data = two_independent(1000, rng);
            if (gcm_test(data, 0, 1, {}).reject(0.05)) ++rejects;
        }
        std::printf("gcm null z=0 (N=1000, 400 reps, seed 102): %.4f\n", rejects / double(reps));
    }
    {
        Rng rng(103);
        int rejects = 0;
        const int reps = 500;
        for (int rep = 0; rep < reps; ++rep) {
            const auto data = sine_chain(400, rng);
            if (gcm_test(data, 0, 1, {2}).reject(0.05)) ++rejects;
        }
        std::printf("gcm sine chain (N=400, 500 reps, seed 103): %.4f\n", rejects / double(reps));
    }
    {
        Rng rng(104);
        int rejects = 0;
        const int reps = 200;
        for (int rep = 0; rep < reps; ++rep) {
            const auto data = two_independent(500, rng);
            if (kci_test(data, 0, 1, {}).reject(0.05)) ++rejects;
        }
        std::printf("kci null z=0 (N=500, 200 reps, seed 104): %.4f\n", rejects / double(reps));
    }
    {
        Rng rng(105);
        int rejects = 0;
        const int reps = 500;
        for (int rep = 0; rep < reps; ++rep) {
            const auto data = sine_chain(400, rng);
            if (kci_test(data, 0, 1, {2}).reject(0.05)) ++rejects;
        }
        std::printf("kci sine chain (N=400, 500 reps, seed 105): %.4f\n", rejects / double(reps));
    }
    return 0;
}
