#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "deeplight/common.hpp"
#include "deeplight/kernels.hpp"

namespace deeplight {

// ---------------------------------------------------------------------------
// The sequence labeling CNN: embedding -> two directional causal
// convolutions (ReLU, dropout while training) -> concatenation -> a third,
// centred convolution (ReLU) -> per-position linear classifier.
//
// Float32 storage with 64-bit accumulation in loss reductions; the whole
// forward/backward path is templated on the scalar so gradient checks run
// in double.
// ---------------------------------------------------------------------------

struct ModelConfig {
    int vocab_size = 315;
    int hidden = 32;       // h: embedding and directional conv channels
    int c3_out = 256;
    int n_classes = 12;
    int kernel_width = 5;  // all three convolutions
    float dropout_p = 0.3f;
    uint64_t seed = 0;

    int64_t param_count() const;
    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);
};

template <class T>
struct ParamsT {
    std::vector<T> emb;  // [V][h]
    std::vector<T> wf;   // [k][h][h], left-causal taps
    std::vector<T> bf;   // [h]
    std::vector<T> wb;   // [k][h][h], right-causal taps
    std::vector<T> bb;   // [h]
    std::vector<T> w3;   // [k][2h][c3]
    std::vector<T> b3;   // [c3]
    std::vector<T> wfc;  // [c3][n_classes]
    std::vector<T> bfc;  // [n_classes]

    void resize(const ModelConfig& c) {
        const size_t h = static_cast<size_t>(c.hidden);
        const size_t k = static_cast<size_t>(c.kernel_width);
        emb.assign(static_cast<size_t>(c.vocab_size) * h, T(0));
        wf.assign(k * h * h, T(0));
        bf.assign(h, T(0));
        wb.assign(k * h * h, T(0));
        bb.assign(h, T(0));
        w3.assign(k * 2 * h * static_cast<size_t>(c.c3_out), T(0));
        b3.assign(static_cast<size_t>(c.c3_out), T(0));
        wfc.assign(static_cast<size_t>(c.c3_out) * c.n_classes, T(0));
        bfc.assign(static_cast<size_t>(c.n_classes), T(0));
    }

    // declaration order; also the serialization order
    template <class F>
    void for_each(F&& f) {
        f("emb", emb); f("wf", wf); f("bf", bf); f("wb", wb); f("bb", bb);
        f("w3", w3); f("b3", b3); f("wfc", wfc); f("bfc", bfc);
    }
    template <class F>
    void for_each(F&& f) const {
        f("emb", emb); f("wf", wf); f("bf", bf); f("wb", wb); f("bb", bb);
        f("w3", w3); f("b3", b3); f("wfc", wfc); f("bfc", bfc);
    }

    size_t total_size() const {
        size_t n = 0;
        for_each([&](const char*, const std::vector<T>& v) { n += v.size(); });
        return n;
    }
};

using Params = ParamsT<float>;

struct CnnShModel {
    ModelConfig cfg;
    Params p;
    std::array<uint8_t, 32> layout_hash{};  // of the vocabulary layout JSON
};

// fresh model, weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] from cfg.seed
CnnShModel init_model(const ModelConfig& cfg, const std::array<uint8_t, 32>& layout_hash);

template <class T>
void init_params(ParamsT<T>& p, const ModelConfig& cfg, uint64_t seed) {
    p.resize(cfg);
    Rng rng(Rng::mix(seed, 0x1417));
    auto fill = [&rng](std::vector<T>& v, double fan_in) {
        const double bound = 1.0 / std::sqrt(fan_in);
        for (auto& x : v) x = static_cast<T>((rng.real() * 2.0 - 1.0) * bound);
    };
    fill(p.emb, cfg.hidden);
    fill(p.wf, static_cast<double>(cfg.kernel_width) * cfg.hidden);
    fill(p.wb, static_cast<double>(cfg.kernel_width) * cfg.hidden);
    fill(p.w3, static_cast<double>(cfg.kernel_width) * 2 * cfg.hidden);
    fill(p.wfc, cfg.c3_out);
    // biases start at zero
}

// ---------------------------------------------------------------------------
// forward / backward
// ---------------------------------------------------------------------------

template <class T>
struct WorkspaceT {
    int L = 0;
    std::vector<T> e, ar, br, mask_a, mask_b, cat, z, scores;
    std::vector<T> dscores, dz, dcat, dar, dbr, de, de2;
    std::vector<T> wfT, wbT, w3T;
    std::vector<double> row_loss;

    void prepare(const ModelConfig& c, int len) {
        L = len;
        const size_t h = static_cast<size_t>(c.hidden);
        const size_t n = static_cast<size_t>(len);
        e.assign(n * h, T(0));
        ar.assign(n * h, T(0));
        br.assign(n * h, T(0));
        mask_a.assign(n * h, T(1));
        mask_b.assign(n * h, T(1));
        cat.assign(n * 2 * h, T(0));
        z.assign(n * static_cast<size_t>(c.c3_out), T(0));
        scores.assign(n * static_cast<size_t>(c.n_classes), T(0));
    }

    void prepare_backward(const ModelConfig& c) {
        const size_t h = static_cast<size_t>(c.hidden);
        const size_t n = static_cast<size_t>(L);
        const size_t k = static_cast<size_t>(c.kernel_width);
        dscores.assign(n * static_cast<size_t>(c.n_classes), T(0));
        dz.assign(n * static_cast<size_t>(c.c3_out), T(0));
        dcat.assign(n * 2 * h, T(0));
        dar.assign(n * h, T(0));
        dbr.assign(n * h, T(0));
        de.assign(n * h, T(0));
        de2.assign(n * h, T(0));
        wfT.assign(k * h * h, T(0));
        wbT.assign(k * h * h, T(0));
        w3T.assign(k * 2 * h * static_cast<size_t>(c.c3_out), T(0));
        row_loss.assign(n, 0.0);
    }
};

using Workspace = WorkspaceT<float>;

// Scores land in ws.scores ([L][n_classes]). With training=true the two
// directional branches get inverted dropout; rng must be non-null then.
template <class T>
void forward_t(const ModelConfig& c, const ParamsT<T>& p,
               const std::vector<int32_t>& ids, bool training, Rng* rng,
               WorkspaceT<T>& ws) {
    const int L = static_cast<int>(ids.size());
    if (L < 1) throw Error("forward: empty input");
    const int h = c.hidden;
    const int k = c.kernel_width;
    ws.prepare(c, L);

    for (int t = 0; t < L; ++t) {
        const int32_t id = ids[static_cast<size_t>(t)];
        if (id < 0 || id >= c.vocab_size)
            throw IdOutOfRange("input id " + std::to_string(id) + " outside vocab of " +
                               std::to_string(c.vocab_size));
        const T* row = p.emb.data() + static_cast<size_t>(id) * h;
        T* dst = ws.e.data() + static_cast<size_t>(t) * h;
        for (int i = 0; i < h; ++i) dst[i] = row[i];
    }

    kern::conv_forward(ws.e.data(), L, h, p.wf.data(), p.bf.data(), h, k, -(k - 1),
                       ws.ar.data());
    kern::conv_forward(ws.e.data(), L, h, p.wb.data(), p.bb.data(), h, k, 0,
                       ws.br.data());
    for (auto& x : ws.ar) x = x > T(0) ? x : T(0);
    for (auto& x : ws.br) x = x > T(0) ? x : T(0);

    if (training && c.dropout_p > 0.0f) {
        if (!rng) throw Error("training forward needs an rng for dropout");
        const double keep = 1.0 - c.dropout_p;
        const T scale = static_cast<T>(1.0 / keep);
        for (auto& m : ws.mask_a) m = rng->real() < c.dropout_p ? T(0) : scale;
        for (auto& m : ws.mask_b) m = rng->real() < c.dropout_p ? T(0) : scale;
    }

    for (int t = 0; t < L; ++t) {
        const size_t th = static_cast<size_t>(t) * h;
        T* crow = ws.cat.data() + static_cast<size_t>(t) * 2 * h;
        for (int i = 0; i < h; ++i) crow[i] = ws.ar[th + i] * ws.mask_a[th + i];
        for (int i = 0; i < h; ++i) crow[h + i] = ws.br[th + i] * ws.mask_b[th + i];
    }

    kern::conv_forward(ws.cat.data(), L, 2 * h, p.w3.data(), p.b3.data(), c.c3_out, k,
                       -(k / 2), ws.z.data());
    for (auto& x : ws.z) x = x > T(0) ? x : T(0);

    kern::fc_forward(ws.z.data(), L, c.c3_out, p.wfc.data(), p.bfc.data(), c.n_classes,
                     ws.scores.data());
}

// Mean masked softmax cross-entropy plus exact gradients for every
// parameter. An all-false mask yields zero loss and zero gradients.
template <class T>
double loss_and_grad_t(const ModelConfig& c, const ParamsT<T>& p,
                       const std::vector<int32_t>& ids,
                       const std::vector<uint8_t>& labels,
                       const std::vector<uint8_t>& mask, bool training, Rng* rng,
                       WorkspaceT<T>& ws, ParamsT<T>& grads) {
    const int L = static_cast<int>(ids.size());
    if (labels.size() != ids.size() || mask.size() != ids.size())
        throw ShapeMismatch("labels/mask length must match input length");
    const int K = c.n_classes;

    grads.resize(c);  // zero-filled
    int n_masked = 0;
    for (int t = 0; t < L; ++t)
        if (mask[static_cast<size_t>(t)]) {
            if (labels[static_cast<size_t>(t)] >= K)
                throw LabelOutOfRange("label " +
                                      std::to_string(labels[static_cast<size_t>(t)]) +
                                      " outside " + std::to_string(K) + " classes");
            ++n_masked;
        }
    if (n_masked == 0) return 0.0;

    forward_t(c, p, ids, training, rng, ws);
    ws.prepare_backward(c);

    const T inv_n = static_cast<T>(1.0 / n_masked);
    for (int t = 0; t < L; ++t) {
        if (!mask[static_cast<size_t>(t)]) continue;
        const T* srow = ws.scores.data() + static_cast<size_t>(t) * K;
        T* drow = ws.dscores.data() + static_cast<size_t>(t) * K;
        T mx = srow[0];
        for (int kk = 1; kk < K; ++kk) mx = std::max(mx, srow[kk]);
        T sum = T(0);
        for (int kk = 0; kk < K; ++kk) sum += std::exp(srow[kk] - mx);
        const int y = labels[static_cast<size_t>(t)];
        ws.row_loss[static_cast<size_t>(t)] =
            static_cast<double>(std::log(sum)) -
            static_cast<double>(srow[y] - mx);
        for (int kk = 0; kk < K; ++kk) {
            const T pk = std::exp(srow[kk] - mx) / sum;
            drow[kk] = (pk - (kk == y ? T(1) : T(0))) * inv_n;
        }
    }
    double loss = 0.0;
    for (double rl : ws.row_loss) loss += rl;
    loss /= n_masked;

    const int h = c.hidden;
    const int k = c.kernel_width;

    kern::fc_backward(ws.z.data(), ws.dscores.data(), L, c.c3_out, K, p.wfc.data(),
                      ws.dz.data(), grads.wfc.data(), grads.bfc.data());
    for (size_t i = 0; i < ws.dz.size(); ++i)
        if (ws.z[i] <= T(0)) ws.dz[i] = T(0);

    kern::transpose_conv_weights(p.w3.data(), k, 2 * h, c.c3_out, ws.w3T.data());
    kern::conv_backward_input(ws.w3T.data(), ws.dz.data(), L, 2 * h, c.c3_out, k,
                              -(k / 2), ws.dcat.data());
    kern::conv_backward_weights(ws.cat.data(), ws.dz.data(), L, 2 * h, c.c3_out, k,
                                -(k / 2), grads.w3.data(), grads.b3.data());

    // split the concatenation, undo dropout scaling, gate by ReLU
    for (int t = 0; t < L; ++t) {
        const size_t th = static_cast<size_t>(t) * h;
        const T* crow = ws.dcat.data() + static_cast<size_t>(t) * 2 * h;
        for (int i = 0; i < h; ++i)
            ws.dar[th + i] =
                ws.ar[th + i] > T(0) ? crow[i] * ws.mask_a[th + i] : T(0);
        for (int i = 0; i < h; ++i)
            ws.dbr[th + i] =
                ws.br[th + i] > T(0) ? crow[h + i] * ws.mask_b[th + i] : T(0);
    }

    kern::transpose_conv_weights(p.wf.data(), k, h, h, ws.wfT.data());
    kern::transpose_conv_weights(p.wb.data(), k, h, h, ws.wbT.data());
    kern::conv_backward_input(ws.wfT.data(), ws.dar.data(), L, h, h, k, -(k - 1),
                              ws.de.data());
    kern::conv_backward_weights(ws.e.data(), ws.dar.data(), L, h, h, k, -(k - 1),
                                grads.wf.data(), grads.bf.data());
    kern::conv_backward_input(ws.wbT.data(), ws.dbr.data(), L, h, h, k, 0,
                              ws.de2.data());
    kern::conv_backward_weights(ws.e.data(), ws.dbr.data(), L, h, h, k, 0,
                                grads.wb.data(), grads.bb.data());
    for (size_t i = 0; i < ws.de.size(); ++i) ws.de[i] += ws.de2[i];

    for (int t = 0; t < L; ++t) {
        const size_t id = static_cast<size_t>(ids[static_cast<size_t>(t)]);
        T* grow = grads.emb.data() + id * h;
        const T* drow = ws.de.data() + static_cast<size_t>(t) * h;
        for (int i = 0; i < h; ++i) grow[i] += drow[i];
    }
    return loss;
}

// float conveniences over a model
std::vector<float> forward(const CnnShModel& m, const std::vector<int32_t>& ids,
                           bool training = false, Rng* rng = nullptr);
double loss_and_grad(const CnnShModel& m, const std::vector<int32_t>& ids,
                     const std::vector<uint8_t>& labels,
                     const std::vector<uint8_t>& mask, bool training, Rng* rng,
                     Workspace& ws, Params& grads);

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct OptimizerState {
    Params m;  // first moments, shaped like the parameters
    Params v;  // second moments
    int64_t step = 0;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;

    static OptimizerState create(const ModelConfig& cfg) {
        OptimizerState s;
        s.m.resize(cfg);
        s.v.resize(cfg);
        return s;
    }
};

// one Adam update over a flat span; exposed for the scalar reference tests
void adam_update_span(float* __restrict w, const float* __restrict g,
                      float* __restrict m, float* __restrict v, size_t n,
                      int64_t step, float lr, float beta1, float beta2, float eps);

void adam_step(Params& p, const Params& grads, OptimizerState& state, float lr);

// ---------------------------------------------------------------------------
// model files: magic "DLSH", version, config JSON, vocabulary layout hash,
// tensors in declaration order as little-endian float32
// ---------------------------------------------------------------------------

void save_model(const CnnShModel& m, const std::string& path);
CnnShModel load_model(const std::string& path);
// throws VocabularyMismatch unless the model was saved with this exact layout
CnnShModel load_model(const std::string& path,
                      const std::array<uint8_t, 32>& expect_layout_hash);

}  // namespace deeplight
