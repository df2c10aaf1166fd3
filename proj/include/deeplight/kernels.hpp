#pragma once

#include <cstddef>
#include <cstdint>

// 1-D convolution / fully-connected kernels used by the sequence model.
// kern::* are the OpenMP-parallel versions; kern::ref::* are the serial
// reference implementations kept for testing and benchmarking.
//
// Both variants call the same per-row helpers, and every output element is
// produced by exactly one row call with a fixed accumulation order, so the
// parallel kernels are bit-identical to the reference for any thread count.
//
// Weight layout for convolutions is [tap][c_in][c_out]; `off` is the input
// offset of tap 0, so tap j reads in[t + off + j] (zero outside [0, L)):
//   off = -(k-1)  left-causal      off = 0  right-causal
//   off = -(k/2)  centred, length preserving
// Backward-by-input takes the transposed layout [tap][c_out][c_in].

namespace deeplight::kern {

namespace detail {

constexpr int kBlock = 32;  // channel counts here are multiples of 32

template <class T>
inline void conv_row(const T* __restrict in, int L, int Cin, const T* __restrict W,
                     const T* __restrict bias, int Cout, int k, int off,
                     T* __restrict out, int t) {
    T* __restrict orow = out + static_cast<size_t>(t) * Cout;
    if (Cout % kBlock == 0) {
        for (int co0 = 0; co0 < Cout; co0 += kBlock) {
            T acc[kBlock];
            for (int c = 0; c < kBlock; ++c) acc[c] = bias[co0 + c];
            for (int j = 0; j < k; ++j) {
                const int s = t + off + j;
                if (s < 0 || s >= L) continue;
                const T* __restrict x = in + static_cast<size_t>(s) * Cin;
                const T* __restrict wj =
                    W + static_cast<size_t>(j) * Cin * Cout + co0;
                for (int ci = 0; ci < Cin; ++ci) {
                    const T v = x[ci];
                    const T* __restrict wrow = wj + static_cast<size_t>(ci) * Cout;
                    for (int c = 0; c < kBlock; ++c) acc[c] += wrow[c] * v;
                }
            }
            for (int c = 0; c < kBlock; ++c) orow[co0 + c] = acc[c];
        }
        return;
    }
    for (int co = 0; co < Cout; ++co) orow[co] = bias[co];
    for (int j = 0; j < k; ++j) {
        const int s = t + off + j;
        if (s < 0 || s >= L) continue;
        const T* __restrict x = in + static_cast<size_t>(s) * Cin;
        for (int ci = 0; ci < Cin; ++ci) {
            const T v = x[ci];
            const T* __restrict wrow =
                W + (static_cast<size_t>(j) * Cin + ci) * Cout;
            for (int co = 0; co < Cout; ++co) orow[co] += wrow[co] * v;
        }
    }
}

// din[s][ci] = sum over taps/channels of W^T * dout, gather form
template <class T>
inline void conv_din_row(const T* __restrict WT, const T* __restrict dout, int L,
                         int Cin, int Cout, int k, int off, T* __restrict din, int s) {
    T* __restrict drow = din + static_cast<size_t>(s) * Cin;
    if (Cin % kBlock == 0) {
        for (int ci0 = 0; ci0 < Cin; ci0 += kBlock) {
            T acc[kBlock] = {};
            for (int j = 0; j < k; ++j) {
                const int t = s - off - j;
                if (t < 0 || t >= L) continue;
                const T* __restrict g = dout + static_cast<size_t>(t) * Cout;
                const T* __restrict wj =
                    WT + static_cast<size_t>(j) * Cout * Cin + ci0;
                for (int co = 0; co < Cout; ++co) {
                    const T v = g[co];
                    const T* __restrict wrow = wj + static_cast<size_t>(co) * Cin;
                    for (int c = 0; c < kBlock; ++c) acc[c] += wrow[c] * v;
                }
            }
            for (int c = 0; c < kBlock; ++c) drow[ci0 + c] = acc[c];
        }
        return;
    }
    for (int ci = 0; ci < Cin; ++ci) drow[ci] = T(0);
    for (int j = 0; j < k; ++j) {
        const int t = s - off - j;
        if (t < 0 || t >= L) continue;
        const T* __restrict g = dout + static_cast<size_t>(t) * Cout;
        for (int co = 0; co < Cout; ++co) {
            const T v = g[co];
            const T* __restrict wrow = WT + (static_cast<size_t>(j) * Cout + co) * Cin;
            for (int ci = 0; ci < Cin; ++ci) drow[ci] += wrow[ci] * v;
        }
    }
}

// one (tap, ci) row of the weight gradient, accumulated over positions
template <class T>
inline void conv_dw_row(const T* __restrict in, const T* __restrict dout, int L,
                        int Cin, int Cout, int off, T* __restrict dW, int j, int ci) {
    T* __restrict wrow = dW + (static_cast<size_t>(j) * Cin + ci) * Cout;
    if (Cout % kBlock == 0) {
        for (int co0 = 0; co0 < Cout; co0 += kBlock) {
            T acc[kBlock] = {};
            for (int t = 0; t < L; ++t) {
                const int s = t + off + j;
                if (s < 0 || s >= L) continue;
                const T v = in[static_cast<size_t>(s) * Cin + ci];
                const T* __restrict g = dout + static_cast<size_t>(t) * Cout + co0;
                for (int c = 0; c < kBlock; ++c) acc[c] += g[c] * v;
            }
            for (int c = 0; c < kBlock; ++c) wrow[co0 + c] = acc[c];
        }
        return;
    }
    for (int co = 0; co < Cout; ++co) wrow[co] = T(0);
    for (int t = 0; t < L; ++t) {
        const int s = t + off + j;
        if (s < 0 || s >= L) continue;
        const T v = in[static_cast<size_t>(s) * Cin + ci];
        const T* __restrict g = dout + static_cast<size_t>(t) * Cout;
        for (int co = 0; co < Cout; ++co) wrow[co] += g[co] * v;
    }
}

template <class T>
inline void fc_row(const T* __restrict z, const T* __restrict W,
                   const T* __restrict b, int C, int K, T* __restrict out, int t) {
    const T* __restrict zrow = z + static_cast<size_t>(t) * C;
    T* __restrict orow = out + static_cast<size_t>(t) * K;
    for (int kk = 0; kk < K; ++kk) orow[kk] = b[kk];
    for (int c = 0; c < C; ++c) {
        const T v = zrow[c];
        const T* __restrict wrow = W + static_cast<size_t>(c) * K;
        for (int kk = 0; kk < K; ++kk) orow[kk] += wrow[kk] * v;
    }
}

template <class T>
inline void fc_dz_row(const T* __restrict dout, const T* __restrict W, int C, int K,
                      T* __restrict dz, int t) {
    const T* __restrict g = dout + static_cast<size_t>(t) * K;
    T* __restrict drow = dz + static_cast<size_t>(t) * C;
    for (int c = 0; c < C; ++c) {
        T acc = T(0);
        const T* __restrict wrow = W + static_cast<size_t>(c) * K;
        for (int kk = 0; kk < K; ++kk) acc += wrow[kk] * g[kk];
        drow[c] = acc;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// serial reference
// ---------------------------------------------------------------------------

namespace ref {

template <class T>
void conv_forward(const T* in, int L, int Cin, const T* W, const T* bias, int Cout,
                  int k, int off, T* out) {
    for (int t = 0; t < L; ++t)
        detail::conv_row(in, L, Cin, W, bias, Cout, k, off, out, t);
}

template <class T>
void conv_backward_input(const T* WT, const T* dout, int L, int Cin, int Cout, int k,
                         int off, T* din) {
    for (int s = 0; s < L; ++s)
        detail::conv_din_row(WT, dout, L, Cin, Cout, k, off, din, s);
}

template <class T>
void conv_backward_weights(const T* in, const T* dout, int L, int Cin, int Cout,
                           int k, int off, T* dW, T* db) {
    for (int j = 0; j < k; ++j)
        for (int ci = 0; ci < Cin; ++ci)
            detail::conv_dw_row(in, dout, L, Cin, Cout, off, dW, j, ci);
    for (int co = 0; co < Cout; ++co) {
        T acc = T(0);
        for (int t = 0; t < L; ++t) acc += dout[static_cast<size_t>(t) * Cout + co];
        db[co] = acc;
    }
}

template <class T>
void fc_forward(const T* z, int L, int C, const T* W, const T* b, int K, T* out) {
    for (int t = 0; t < L; ++t) detail::fc_row(z, W, b, C, K, out, t);
}

template <class T>
void fc_backward(const T* z, const T* dout, int L, int C, int K, const T* W, T* dz,
                 T* dW, T* db) {
    for (int t = 0; t < L; ++t) detail::fc_dz_row(dout, W, C, K, dz, t);
    for (int c = 0; c < C; ++c) {
        T* wrow = dW + static_cast<size_t>(c) * K;
        for (int kk = 0; kk < K; ++kk) wrow[kk] = T(0);
        for (int t = 0; t < L; ++t) {
            const T v = z[static_cast<size_t>(t) * C + c];
            const T* g = dout + static_cast<size_t>(t) * K;
            for (int kk = 0; kk < K; ++kk) wrow[kk] += g[kk] * v;
        }
    }
    for (int kk = 0; kk < K; ++kk) {
        T acc = T(0);
        for (int t = 0; t < L; ++t) acc += dout[static_cast<size_t>(t) * K + kk];
        db[kk] = acc;
    }
}

}  // namespace ref

// ---------------------------------------------------------------------------
// OpenMP variants
// ---------------------------------------------------------------------------

template <class T>
void conv_forward(const T* in, int L, int Cin, const T* W, const T* bias, int Cout,
                  int k, int off, T* out) {
#pragma omp parallel for schedule(static) if (L >= 16)
    for (int t = 0; t < L; ++t)
        detail::conv_row(in, L, Cin, W, bias, Cout, k, off, out, t);
}

template <class T>
void conv_backward_input(const T* WT, const T* dout, int L, int Cin, int Cout, int k,
                         int off, T* din) {
#pragma omp parallel for schedule(static) if (L >= 16)
    for (int s = 0; s < L; ++s)
        detail::conv_din_row(WT, dout, L, Cin, Cout, k, off, din, s);
}

template <class T>
void conv_backward_weights(const T* in, const T* dout, int L, int Cin, int Cout,
                           int k, int off, T* dW, T* db) {
    const int rows = k * Cin;
#pragma omp parallel for schedule(static) if (rows >= 64)
    for (int r = 0; r < rows; ++r)
        detail::conv_dw_row(in, dout, L, Cin, Cout, off, dW, r / Cin, r % Cin);
    for (int co = 0; co < Cout; ++co) {
        T acc = T(0);
        for (int t = 0; t < L; ++t) acc += dout[static_cast<size_t>(t) * Cout + co];
        db[co] = acc;
    }
}

template <class T>
void transpose_conv_weights(const T* W, int k, int Cin, int Cout, T* WT) {
    for (int j = 0; j < k; ++j)
        for (int ci = 0; ci < Cin; ++ci)
            for (int co = 0; co < Cout; ++co)
                WT[(static_cast<size_t>(j) * Cout + co) * Cin + ci] =
                    W[(static_cast<size_t>(j) * Cin + ci) * Cout + co];
}

template <class T>
void fc_forward(const T* z, int L, int C, const T* W, const T* b, int K, T* out) {
#pragma omp parallel for schedule(static) if (L >= 64)
    for (int t = 0; t < L; ++t) detail::fc_row(z, W, b, C, K, out, t);
}

template <class T>
void fc_backward(const T* z, const T* dout, int L, int C, int K, const T* W, T* dz,
                 T* dW, T* db) {
#pragma omp parallel for schedule(static) if (L >= 64)
    for (int t = 0; t < L; ++t) detail::fc_dz_row(dout, W, C, K, dz, t);
    // dW/db accumulate over t; rows are independent per output channel
#pragma omp parallel for schedule(static) if (C >= 128)
    for (int c = 0; c < C; ++c) {
        T* wrow = dW + static_cast<size_t>(c) * K;
        for (int kk = 0; kk < K; ++kk) wrow[kk] = T(0);
        for (int t = 0; t < L; ++t) {
            const T v = z[static_cast<size_t>(t) * C + c];
            const T* g = dout + static_cast<size_t>(t) * K;
            for (int kk = 0; kk < K; ++kk) wrow[kk] += g[kk] * v;
        }
    }
    for (int kk = 0; kk < K; ++kk) {
        T acc = T(0);
        for (int t = 0; t < L; ++t) acc += dout[static_cast<size_t>(t) * K + kk];
        db[kk] = acc;
    }
}

}  // namespace deeplight::kern
