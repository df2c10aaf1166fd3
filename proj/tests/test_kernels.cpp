#include <doctest.h>

#include <cstring>
#include <vector>

#include "deeplight/common.hpp"
#include "deeplight/kernels.hpp"

using namespace deeplight;

namespace {

std::vector<float> random_vec(size_t n, Rng& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.real() * 2.0 - 1.0);
    return v;
}

// independent naive convolution in double: out[t][co] = b + sum W*in
std::vector<double> naive_conv(const std::vector<float>& in, int L, int Cin,
                               const std::vector<float>& W, const std::vector<float>& b,
                               int Cout, int k, int off) {
    std::vector<double> out(static_cast<size_t>(L) * Cout);
    for (int t = 0; t < L; ++t)
        for (int co = 0; co < Cout; ++co) {
            double acc = b[static_cast<size_t>(co)];
            for (int j = 0; j < k; ++j) {
                const int s = t + off + j;
                if (s < 0 || s >= L) continue;
                for (int ci = 0; ci < Cin; ++ci)
                    acc += static_cast<double>(
                               W[(static_cast<size_t>(j) * Cin + ci) * Cout + co]) *
                           in[static_cast<size_t>(s) * Cin + ci];
            }
            out[static_cast<size_t>(t) * Cout + co] = acc;
        }
    return out;
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("conv kernels match a naive double-precision oracle") {
    Rng rng(7);
    // both blocked (multiple of 32) and fallback channel counts
    const int shapes[][4] = {{17, 32, 32, 5}, {9, 64, 256, 5}, {5, 8, 12, 3},
                             {1, 32, 32, 5},  {3, 16, 20, 7}};
    for (const auto& sh : shapes) {
        const int L = sh[0], Cin = sh[1], Cout = sh[2], k = sh[3];
        for (int off : {-(k - 1), 0, -(k / 2)}) {
            auto in = random_vec(static_cast<size_t>(L) * Cin, rng);
            auto W = random_vec(static_cast<size_t>(k) * Cin * Cout, rng);
            auto b = random_vec(static_cast<size_t>(Cout), rng);
            std::vector<float> out(static_cast<size_t>(L) * Cout);
            kern::ref::conv_forward(in.data(), L, Cin, W.data(), b.data(), Cout, k,
                                    off, out.data());
            auto want = naive_conv(in, L, Cin, W, b, Cout, k, off);
            for (size_t i = 0; i < out.size(); ++i)
                CHECK(out[i] == doctest::Approx(want[i]).epsilon(1e-4));
        }
    }
}

TEST_CASE("OpenMP kernels are bit-identical to the serial reference") {
    Rng rng(21);
    const int shapes[][4] = {{64, 32, 32, 5}, {33, 64, 256, 5}, {7, 8, 12, 3},
                             {128, 256, 256, 5}};
    for (const auto& sh : shapes) {
        const int L = sh[0], Cin = sh[1], Cout = sh[2], k = sh[3];
        const int off = -(k / 2);
        auto in = random_vec(static_cast<size_t>(L) * Cin, rng);
        auto W = random_vec(static_cast<size_t>(k) * Cin * Cout, rng);
        auto b = random_vec(static_cast<size_t>(Cout), rng);

        std::vector<float> o1(static_cast<size_t>(L) * Cout), o2(o1.size());
        kern::ref::conv_forward(in.data(), L, Cin, W.data(), b.data(), Cout, k, off,
                                o1.data());
        kern::conv_forward(in.data(), L, Cin, W.data(), b.data(), Cout, k, off,
                           o2.data());
        CHECK(bit_equal(o1, o2));

        auto dout = random_vec(static_cast<size_t>(L) * Cout, rng);
        std::vector<float> WT(W.size());
        kern::transpose_conv_weights(W.data(), k, Cin, Cout, WT.data());
        std::vector<float> d1(in.size()), d2(in.size());
        kern::ref::conv_backward_input(WT.data(), dout.data(), L, Cin, Cout, k, off,
                                       d1.data());
        kern::conv_backward_input(WT.data(), dout.data(), L, Cin, Cout, k, off,
                                  d2.data());
        CHECK(bit_equal(d1, d2));

        std::vector<float> w1(W.size()), w2(W.size());
        std::vector<float> b1(static_cast<size_t>(Cout)), b2(b1.size());
        kern::ref::conv_backward_weights(in.data(), dout.data(), L, Cin, Cout, k, off,
                                         w1.data(), b1.data());
        kern::conv_backward_weights(in.data(), dout.data(), L, Cin, Cout, k, off,
                                    w2.data(), b2.data());
        CHECK(bit_equal(w1, w2));
        CHECK(bit_equal(b1, b2));
    }
}

TEST_CASE("fc kernels agree between variants and with a naive oracle") {
    Rng rng(5);
    const int L = 37, C = 256, K = 12;
    auto z = random_vec(static_cast<size_t>(L) * C, rng);
    auto W = random_vec(static_cast<size_t>(C) * K, rng);
    auto b = random_vec(static_cast<size_t>(K), rng);
    std::vector<float> o1(static_cast<size_t>(L) * K), o2(o1.size());
    kern::ref::fc_forward(z.data(), L, C, W.data(), b.data(), K, o1.data());
    kern::fc_forward(z.data(), L, C, W.data(), b.data(), K, o2.data());
    CHECK(bit_equal(o1, o2));
    for (int t = 0; t < L; ++t)
        for (int kk = 0; kk < K; ++kk) {
            double acc = b[static_cast<size_t>(kk)];
            for (int c = 0; c < C; ++c)
                acc += static_cast<double>(z[static_cast<size_t>(t) * C + c]) *
                       W[static_cast<size_t>(c) * K + kk];
            CHECK(o1[static_cast<size_t>(t) * K + kk] ==
                  doctest::Approx(acc).epsilon(1e-4));
        }

    auto dout = random_vec(static_cast<size_t>(L) * K, rng);
    std::vector<float> dz1(z.size()), dz2(z.size()), dW1(W.size()), dW2(W.size());
    std::vector<float> db1(static_cast<size_t>(K)), db2(db1.size());
    kern::ref::fc_backward(z.data(), dout.data(), L, C, K, W.data(), dz1.data(),
                           dW1.data(), db1.data());
    kern::fc_backward(z.data(), dout.data(), L, C, K, W.data(), dz2.data(),
                      dW2.data(), db2.data());
    CHECK(bit_equal(dz1, dz2));
    CHECK(bit_equal(dW1, dW2));
    CHECK(bit_equal(db1, db2));
}

TEST_CASE("transpose round-trips") {
    Rng rng(3);
    const int k = 5, Cin = 12, Cout = 20;
    auto W = random_vec(static_cast<size_t>(k) * Cin * Cout, rng);
    std::vector<float> WT(W.size()), back(W.size());
    kern::transpose_conv_weights(W.data(), k, Cin, Cout, WT.data());
    kern::transpose_conv_weights(WT.data(), k, Cout, Cin, back.data());
    CHECK(bit_equal(W, back));
}
