// Timing comparison between the threaded convolution kernel and the
// serial reference, plus the dense operator assembly.
#include <chrono>
#include <cstdio>
#include <random>

#include "grashof/spectral.hpp"
#include "grashof/steady.hpp"

using namespace grashof;
using clk = std::chrono::steady_clock;

namespace {

double ms_since(clk::time_point t0) {
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

}  // namespace

int main() {
    std::mt19937_64 rng(42);
    std::printf("%8s %6s %8s | %10s %10s %8s | %10s\n", "lambda", "dim", "modes", "serial ms", "omp ms", "speedup",
                "jac ms");
    for (double lambda : {9.0, 25.0, 64.0, 100.0}) {
        auto space = ModeSet::ball(3, lambda);
        SpectralField u = random_field(space, rng);
        SpectralField v = random_field(space, rng);

        const int reps = lambda <= 25 ? 50 : 5;
        auto t0 = clk::now();
        SpectralField a;
        for (int r = 0; r < reps; ++r) a = bilinear_b_serial(u, v);
        const double serial = ms_since(t0) / reps;
        t0 = clk::now();
        SpectralField b;
        for (int r = 0; r < reps; ++r) b = bilinear_b(u, v);
        const double omp = ms_since(t0) / reps;
        if (norm_z(a - b) != 0.0) {
            std::printf("kernel mismatch at lambda=%g\n", lambda);
            return 1;
        }
        double jac = -1;
        if (lambda <= 25) {
            t0 = clk::now();
            Eigen::MatrixXd m = steady_jacobian(u, 2.0);
            jac = ms_since(t0);
        }
        std::printf("%8g %6d %8d | %10.3f %10.3f %8.2f | %10.3f\n", lambda, 3, space->size(), serial, omp,
                    serial / omp, jac);
    }
    return 0;
}
