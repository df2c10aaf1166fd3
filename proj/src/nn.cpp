#include "deeplight/nn.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace deeplight {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts need byte swaps");

int64_t ModelConfig::param_count() const {
    const int64_t h = hidden, k = kernel_width, c3 = c3_out, K = n_classes;
    return static_cast<int64_t>(vocab_size) * h  // emb
           + 2 * (k * h * h + h)                 // directional convs
           + k * 2 * h * c3 + c3                 // third conv
           + c3 * K + K;                         // classifier
}

std::string ModelConfig::to_json() const {
    nlohmann::json j = {{"vocab_size", vocab_size}, {"hidden", hidden},
                        {"c3_out", c3_out},         {"n_classes", n_classes},
                        {"kernel_width", kernel_width}, {"dropout_p", dropout_p},
                        {"seed", seed}};
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
    ModelConfig c;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad model config: ") + e.what());
    }
    c.vocab_size = j.at("vocab_size").get<int>();
    c.hidden = j.at("hidden").get<int>();
    c.c3_out = j.at("c3_out").get<int>();
    c.n_classes = j.at("n_classes").get<int>();
    c.kernel_width = j.at("kernel_width").get<int>();
    c.dropout_p = j.at("dropout_p").get<float>();
    c.seed = j.at("seed").get<uint64_t>();
    return c;
}

CnnShModel init_model(const ModelConfig& cfg, const std::array<uint8_t, 32>& layout_hash) {
    CnnShModel m;
    m.cfg = cfg;
    m.layout_hash = layout_hash;
    init_params(m.p, cfg, cfg.seed);
    return m;
}

std::vector<float> forward(const CnnShModel& m, const std::vector<int32_t>& ids,
                           bool training, Rng* rng) {
    Workspace ws;
    forward_t(m.cfg, m.p, ids, training, rng, ws);
    return ws.scores;
}

double loss_and_grad(const CnnShModel& m, const std::vector<int32_t>& ids,
                     const std::vector<uint8_t>& labels,
                     const std::vector<uint8_t>& mask, bool training, Rng* rng,
                     Workspace& ws, Params& grads) {
    return loss_and_grad_t(m.cfg, m.p, ids, labels, mask, training, rng, ws, grads);
}

void adam_update_span(float* __restrict w, const float* __restrict g,
                      float* __restrict m, float* __restrict v, size_t n,
                      int64_t step, float lr, float beta1, float beta2, float eps) {
    const float inv_bc1 = 1.0f / (1.0f - std::pow(beta1, static_cast<float>(step)));
    const float inv_bc2 = 1.0f / (1.0f - std::pow(beta2, static_cast<float>(step)));
    for (size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0f - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
        const float mhat = m[i] * inv_bc1;
        const float vhat = v[i] * inv_bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void adam_step(Params& p, const Params& grads, OptimizerState& state, float lr) {
    ++state.step;
    std::vector<std::vector<float>*> w, m, v;
    std::vector<const std::vector<float>*> g;
    p.for_each([&](const char*, std::vector<float>& t) { w.push_back(&t); });
    grads.for_each([&](const char*, const std::vector<float>& t) { g.push_back(&t); });
    state.m.for_each([&](const char*, std::vector<float>& t) { m.push_back(&t); });
    state.v.for_each([&](const char*, std::vector<float>& t) { v.push_back(&t); });
    for (size_t i = 0; i < w.size(); ++i) {
        if (g[i]->size() != w[i]->size() || m[i]->size() != w[i]->size() ||
            v[i]->size() != w[i]->size())
            throw ShapeMismatch("adam_step: gradient/moment shapes do not match");
        adam_update_span(w[i]->data(), g[i]->data(), m[i]->data(), v[i]->data(),
                         w[i]->size(), state.step, lr, state.beta1, state.beta2,
                         state.eps);
    }
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'D', 'L', 'S', 'H'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ofstream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t get_u32(std::ifstream& in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw FormatError("model file truncated");
    return v;
}
}  // namespace

void save_model(const CnnShModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model file: " + path);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    const std::string cfg = m.cfg.to_json();
    put_u32(out, static_cast<uint32_t>(cfg.size()));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    out.write(reinterpret_cast<const char*>(m.layout_hash.data()), 32);
    m.p.for_each([&](const char*, const std::vector<float>& t) {
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(float)));
    });
    if (!out) throw Error("short write: " + path);
}

CnnShModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("not a model file: " + path);
    const uint32_t version = get_u32(in);
    if (version != kVersion)
        throw FormatError("unsupported model version " + std::to_string(version));
    const uint32_t cfg_len = get_u32(in);
    if (cfg_len > (1u << 20)) throw FormatError("implausible config block");
    std::string cfg_text(cfg_len, '\0');
    in.read(cfg_text.data(), cfg_len);
    if (!in) throw FormatError("model file truncated");

    CnnShModel m;
    m.cfg = ModelConfig::from_json(cfg_text);
    in.read(reinterpret_cast<char*>(m.layout_hash.data()), 32);
    if (!in) throw FormatError("model file truncated");
    m.p.resize(m.cfg);
    m.p.for_each([&](const char* name, std::vector<float>& t) {
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(float)));
        if (!in) throw FormatError(std::string("model file truncated in tensor ") + name);
    });
    char extra;
    in.read(&extra, 1);
    if (!in.eof()) throw FormatError("trailing bytes after tensors");
    m.p.for_each([](const char* name, const std::vector<float>& t) {
        for (float x : t)
            if (!std::isfinite(x))
                throw FormatError(std::string("non-finite value in tensor ") + name);
    });
    return m;
}

CnnShModel load_model(const std::string& path,
                      const std::array<uint8_t, 32>& expect_layout_hash) {
    CnnShModel m = load_model(path);
    if (m.layout_hash != expect_layout_hash)
        throw VocabularyMismatch(
            "model was trained with a different vocabulary layout: " + path);
    return m;
}

}  // namespace deeplight
