// Compares the serial reference kernels against the OpenMP variants on the
// shapes the model actually uses, and reports training/inference style
// throughput per variant. Also double-checks that both variants produce
// bit-identical outputs on the benchmarked shapes.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "deeplight/common.hpp"
#include "deeplight/kernels.hpp"

using namespace deeplight;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<float> random_vec(size_t n, Rng& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.real() * 2.0 - 1.0);
    return v;
}

struct Case {
    const char* name;
    int L, Cin, Cout, k, off;
};

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e100;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        f();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int iters = 200;
    if (argc > 1) iters = std::atoi(argv[1]);
    Rng rng(42);

    const Case cases[] = {
        {"conv_fwd  h32->h32", 128, 32, 32, 5, -4},
        {"conv_fwd  2h->256 (h32)", 128, 64, 256, 5, -2},
        {"conv_fwd  2h->256 (h128)", 128, 256, 256, 5, -2},
    };

    std::printf("threads available: %d, iterations: %d\n", omp_get_max_threads(), iters);
    std::printf("%-26s %12s %12s %8s %9s\n", "kernel", "serial GMAC/s", "omp GMAC/s",
                "speedup", "bitequal");

    for (const Case& c : cases) {
        const auto in = random_vec(static_cast<size_t>(c.L) * c.Cin, rng);
        const auto W = random_vec(static_cast<size_t>(c.k) * c.Cin * c.Cout, rng);
        const auto b = random_vec(static_cast<size_t>(c.Cout), rng);
        std::vector<float> out_ref(static_cast<size_t>(c.L) * c.Cout);
        std::vector<float> out_omp(out_ref.size());

        const double macs = static_cast<double>(iters) * c.L * c.k * c.Cin * c.Cout;
        const double ts = time_best_of(3, [&] {
            for (int i = 0; i < iters; ++i)
                kern::ref::conv_forward(in.data(), c.L, c.Cin, W.data(), b.data(),
                                        c.Cout, c.k, c.off, out_ref.data());
        });
        const double tp = time_best_of(3, [&] {
            for (int i = 0; i < iters; ++i)
                kern::conv_forward(in.data(), c.L, c.Cin, W.data(), b.data(), c.Cout,
                                   c.k, c.off, out_omp.data());
        });
        const bool equal = std::memcmp(out_ref.data(), out_omp.data(),
                                       out_ref.size() * sizeof(float)) == 0;
        std::printf("%-26s %12.2f %12.2f %8.2fx %9s\n", c.name, macs / ts * 1e-9,
                    macs / tp * 1e-9, ts / tp, equal ? "yes" : "NO");
        if (!equal) return 1;
    }

    // backward kernels on the big shape
    {
        const Case c = {"conv_bwd  2h->256 (h32)", 128, 64, 256, 5, -2};
        const auto in = random_vec(static_cast<size_t>(c.L) * c.Cin, rng);
        const auto W = random_vec(static_cast<size_t>(c.k) * c.Cin * c.Cout, rng);
        const auto dout = random_vec(static_cast<size_t>(c.L) * c.Cout, rng);
        std::vector<float> WT(W.size());
        kern::transpose_conv_weights(W.data(), c.k, c.Cin, c.Cout, WT.data());
        std::vector<float> din_ref(in.size()), din_omp(in.size());
        std::vector<float> dW_ref(W.size()), dW_omp(W.size());
        std::vector<float> db_ref(static_cast<size_t>(c.Cout)), db_omp(db_ref.size());

        const double macs = 2.0 * iters * c.L * c.k * c.Cin * c.Cout;
        const double ts = time_best_of(3, [&] {
            for (int i = 0; i < iters; ++i) {
                kern::ref::conv_backward_input(WT.data(), dout.data(), c.L, c.Cin,
                                               c.Cout, c.k, c.off, din_ref.data());
                kern::ref::conv_backward_weights(in.data(), dout.data(), c.L, c.Cin,
                                                 c.Cout, c.k, c.off, dW_ref.data(),
                                                 db_ref.data());
            }
        });
        const double tp = time_best_of(3, [&] {
            for (int i = 0; i < iters; ++i) {
                kern::conv_backward_input(WT.data(), dout.data(), c.L, c.Cin, c.Cout,
                                          c.k, c.off, din_omp.data());
                kern::conv_backward_weights(in.data(), dout.data(), c.L, c.Cin, c.Cout,
                                            c.k, c.off, dW_omp.data(), db_omp.data());
            }
        });
        const bool equal =
            std::memcmp(din_ref.data(), din_omp.data(), din_ref.size() * sizeof(float)) == 0 &&
            std::memcmp(dW_ref.data(), dW_omp.data(), dW_ref.size() * sizeof(float)) == 0 &&
            std::memcmp(db_ref.data(), db_omp.data(), db_ref.size() * sizeof(float)) == 0;
        std::printf("%-26s %12.2f %12.2f %8.2fx %9s\n", c.name, macs / ts * 1e-9,
                    macs / tp * 1e-9, ts / tp, equal ? "yes" : "NO");
        if (!equal) return 1;
    }
    return 0;
}
