#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>

#include "deeplight/nn.hpp"
#include "deeplight/normalizer.hpp"

using namespace deeplight;

namespace {

std::vector<int32_t> random_ids(int L, int V, Rng& rng) {
    std::vector<int32_t> ids(static_cast<size_t>(L));
    for (auto& id : ids) id = static_cast<int32_t>(rng.below(static_cast<uint64_t>(V)));
    return ids;
}

// central finite differences over every parameter, double precision
void gradient_check(const ModelConfig& cfg, int L, uint64_t seed, bool with_dropout) {
    ParamsT<double> p;
    init_params(p, cfg, seed);
    Rng rng(seed * 31 + 1);
    auto ids = random_ids(L, cfg.vocab_size, rng);
    std::vector<uint8_t> labels(static_cast<size_t>(L)), mask(static_cast<size_t>(L), 1);
    for (auto& l : labels) l = static_cast<uint8_t>(rng.below(12));
    if (L > 2) mask[1] = 0;  // a masked-out position among the checked ones

    // dropout must see the same mask sequence on every evaluation
    const uint64_t drop_seed = 77;
    auto loss_of = [&](ParamsT<double>& params, ParamsT<double>* grads) {
        WorkspaceT<double> ws;
        ParamsT<double> g;
        Rng drop(drop_seed);
        const double loss = loss_and_grad_t(cfg, params, ids, labels, mask,
                                            with_dropout, &drop, ws, g);
        if (grads) *grads = g;
        return loss;
    };

    ParamsT<double> analytic;
    loss_of(p, &analytic);

    const double eps = 1e-4;
    std::vector<std::vector<double>*> tensors, grad_tensors;
    p.for_each([&](const char*, std::vector<double>& t) { tensors.push_back(&t); });
    analytic.for_each(
        [&](const char*, std::vector<double>& t) { grad_tensors.push_back(&t); });

    double worst = 0.0;
    for (size_t ti = 0; ti < tensors.size(); ++ti) {
        auto& tensor = *tensors[ti];
        auto& grad = *grad_tensors[ti];
        for (size_t i = 0; i < tensor.size(); ++i) {
            const double keep = tensor[i];
            tensor[i] = keep + eps;
            const double lp = loss_of(p, nullptr);
            tensor[i] = keep - eps;
            const double lm = loss_of(p, nullptr);
            tensor[i] = keep;
            const double fd = (lp - lm) / (2 * eps);
            const double denom = std::max({1e-4, std::abs(fd), std::abs(grad[i])});
            worst = std::max(worst, std::abs(fd - grad[i]) / denom);
        }
    }
    CAPTURE(worst);
    CHECK(worst < 1e-4);
}

}  // namespace

TEST_CASE("forward produces an Lx12 score grid") {
    ModelConfig cfg;
    cfg.vocab_size = 16;
    cfg.hidden = 8;
    cfg.c3_out = 16;
    cfg.seed = 3;
    CnnShModel m = init_model(cfg, {});
    auto scores = forward(m, {5});
    CHECK(scores.size() == 12);
    scores = forward(m, {5, 4, 3});
    CHECK(scores.size() == 36);
    CHECK_THROWS_AS(forward(m, {99}), IdOutOfRange);
}

TEST_CASE("a zero model outputs the classifier bias everywhere") {
    ModelConfig cfg;
    cfg.vocab_size = 8;
    cfg.hidden = 4;
    cfg.c3_out = 8;
    CnnShModel m;
    m.cfg = cfg;
    m.p.resize(cfg);  // all zero
    for (int k = 0; k < 12; ++k) m.p.bfc[static_cast<size_t>(k)] = 0.25f * k;
    auto scores = forward(m, {1, 2, 3, 4});
    for (int t = 0; t < 4; ++t)
        for (int k = 0; k < 12; ++k)
            CHECK(scores[static_cast<size_t>(t) * 12 + k] == doctest::Approx(0.25f * k));
}

TEST_CASE("eval-mode forward is bit-identical across calls") {
    ModelConfig cfg;
    cfg.vocab_size = 32;
    cfg.hidden = 32;
    cfg.seed = 11;
    CnnShModel m = init_model(cfg, {});
    Rng rng(4);
    auto ids = random_ids(50, cfg.vocab_size, rng);
    auto a = forward(m, ids);
    auto b = forward(m, ids);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

TEST_CASE("uniform scores cost ln 12 per token") {
    ModelConfig cfg;
    cfg.vocab_size = 8;
    cfg.hidden = 4;
    cfg.c3_out = 8;
    CnnShModel m;
    m.cfg = cfg;
    m.p.resize(cfg);  // zero scores -> uniform softmax
    Workspace ws;
    Params grads;
    std::vector<uint8_t> labels = {0, 3, 11, 7};
    std::vector<uint8_t> mask = {1, 1, 1, 1};
    const double loss = loss_and_grad(m, {1, 2, 3, 4}, labels, mask, false, nullptr,
                                      ws, grads);
    CHECK(loss == doctest::Approx(std::log(12.0)).epsilon(1e-6));
}

TEST_CASE("an all-masked sequence yields zero loss and zero gradients") {
    ModelConfig cfg;
    cfg.vocab_size = 8;
    cfg.hidden = 4;
    cfg.c3_out = 8;
    cfg.seed = 5;
    CnnShModel m = init_model(cfg, {});
    Workspace ws;
    Params grads;
    std::vector<uint8_t> labels = {1, 2, 3};
    std::vector<uint8_t> mask = {0, 0, 0};
    const double loss =
        loss_and_grad(m, {1, 2, 3}, labels, mask, false, nullptr, ws, grads);
    CHECK(loss == 0.0);
    grads.for_each([](const char*, const std::vector<float>& t) {
        for (float x : t) CHECK(x == 0.0f);
    });
    std::vector<uint8_t> bad = {12, 0, 0};
    std::vector<uint8_t> mask1 = {1, 0, 0};
    CHECK_THROWS_AS(loss_and_grad(m, {1, 2, 3}, bad, mask1, false, nullptr, ws, grads),
                    LabelOutOfRange);
}

TEST_CASE("analytic gradients match central finite differences") {
    ModelConfig small;
    small.vocab_size = 8;
    small.hidden = 4;
    small.c3_out = 16;
    small.kernel_width = 3;
    gradient_check(small, 5, 101, false);

    ModelConfig shorter = small;
    shorter.kernel_width = 5;  // L < k
    gradient_check(shorter, 2, 102, false);

    ModelConfig wider = small;
    wider.vocab_size = 12;
    wider.hidden = 8;
    wider.c3_out = 8;
    gradient_check(wider, 9, 103, false);

    // through the dropout path with a reproduced mask sequence
    gradient_check(small, 4, 104, true);
}

TEST_CASE("adam converges on a 1-d quadratic and tracks a scalar reference") {
    // reference implementation, one weight
    double w_ref = 1.0, m_ref = 0.0, v_ref = 0.0;
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;

    float w = 1.0f, m = 0.0f, v = 0.0f;
    for (int step = 1; step <= 200; ++step) {
        const float g = 2.0f * w;
        const double g_ref = 2.0 * w_ref;
        adam_update_span(&w, &g, &m, &v, 1, step, static_cast<float>(lr),
                         static_cast<float>(b1), static_cast<float>(b2),
                         static_cast<float>(eps));
        m_ref = b1 * m_ref + (1 - b1) * g_ref;
        v_ref = b2 * v_ref + (1 - b2) * g_ref * g_ref;
        const double mhat = m_ref / (1 - std::pow(b1, step));
        const double vhat = v_ref / (1 - std::pow(b2, step));
        w_ref -= lr * mhat / (std::sqrt(vhat) + eps);
        CHECK(w == doctest::Approx(w_ref).epsilon(1e-3));
    }
    CHECK(std::abs(w) < 0.05);
    CHECK(std::abs(w_ref) < 0.05);
}

TEST_CASE("adam: zero gradients leave parameters unchanged on the first step") {
    ModelConfig cfg;
    cfg.vocab_size = 8;
    cfg.hidden = 4;
    cfg.c3_out = 8;
    cfg.seed = 5;
    CnnShModel m = init_model(cfg, {});
    CnnShModel before = m;
    OptimizerState opt = OptimizerState::create(cfg);
    Params zero;
    zero.resize(cfg);
    adam_step(m.p, zero, opt, 0.1f);
    CHECK(opt.step == 1);
    bool same = true;
    std::vector<const std::vector<float>*> a, b;
    m.p.for_each([&](const char*, const std::vector<float>& t) { a.push_back(&t); });
    before.p.for_each([&](const char*, const std::vector<float>& t) { b.push_back(&t); });
    for (size_t i = 0; i < a.size(); ++i)
        same = same && std::memcmp(a[i]->data(), b[i]->data(),
                                   a[i]->size() * sizeof(float)) == 0;
    CHECK(same);
}

TEST_CASE("adam's first step is bounded by the learning rate") {
    Rng rng(9);
    const float lr = 0.01f;
    for (int trial = 0; trial < 100; ++trial) {
        float w = 0.5f, m = 0.0f, v = 0.0f;
        const float g = static_cast<float>(rng.real() * 20.0 - 10.0);
        if (g == 0.0f) continue;
        const float before = w;
        adam_update_span(&w, &g, &m, &v, 1, 1, lr, 0.9f, 0.999f, 1e-8f);
        CHECK(std::abs(w - before) <= lr * (1.0f + 1e-5f));
    }
}

TEST_CASE("adam rejects mismatched shapes") {
    ModelConfig cfg;
    cfg.vocab_size = 8;
    cfg.hidden = 4;
    cfg.c3_out = 8;
    CnnShModel m = init_model(cfg, {});
    OptimizerState opt = OptimizerState::create(cfg);
    ModelConfig other = cfg;
    other.hidden = 8;
    Params wrong;
    wrong.resize(other);
    CHECK_THROWS_AS(adam_step(m.p, wrong, opt, 0.1f), ShapeMismatch);
}

TEST_CASE("directionality: each branch only sees its side of the input") {
    ModelConfig cfg;
    cfg.vocab_size = 24;
    cfg.hidden = 8;
    cfg.c3_out = 8;
    cfg.seed = 17;
    CnnShModel m = init_model(cfg, {});
    Rng rng(3);
    const int L = 12;
    auto ids = random_ids(L, cfg.vocab_size, rng);

    Workspace base_ws;
    forward_t(m.cfg, m.p, ids, false, nullptr, base_ws);
    for (int s = 1; s < L; ++s) {
        auto perturbed = ids;
        perturbed[static_cast<size_t>(s)] =
            (perturbed[static_cast<size_t>(s)] + 7) % cfg.vocab_size;
        Workspace ws;
        forward_t(m.cfg, m.p, perturbed, false, nullptr, ws);
        const size_t h = static_cast<size_t>(cfg.hidden);
        // forward branch at positions before s must not change
        for (int t = 0; t < s; ++t)
            CHECK(std::memcmp(ws.ar.data() + static_cast<size_t>(t) * h,
                              base_ws.ar.data() + static_cast<size_t>(t) * h,
                              h * sizeof(float)) == 0);
        // backward branch at positions after s must not change
        for (int t = s + 1; t < L; ++t)
            CHECK(std::memcmp(ws.br.data() + static_cast<size_t>(t) * h,
                              base_ws.br.data() + static_cast<size_t>(t) * h,
                              h * sizeof(float)) == 0);
    }
}

TEST_CASE("dropout scales to the eval activations in expectation") {
    ModelConfig cfg;
    cfg.vocab_size = 16;
    cfg.hidden = 8;
    cfg.c3_out = 8;
    cfg.seed = 23;
    CnnShModel m = init_model(cfg, {});
    Rng idrng(2);
    auto ids = random_ids(6, cfg.vocab_size, idrng);

    Workspace eval_ws;
    forward_t(m.cfg, m.p, ids, false, nullptr, eval_ws);
    double eval_sum = 0.0;
    for (float x : eval_ws.cat) eval_sum += x;
    REQUIRE(eval_sum > 0.0);

    Rng drop(31);
    const int N = 10000;
    double mean_sum = 0.0;
    Workspace ws;
    for (int i = 0; i < N; ++i) {
        forward_t(m.cfg, m.p, ids, true, &drop, ws);
        double s = 0.0;
        for (float x : ws.cat) s += x;
        mean_sum += s;
    }
    mean_sum /= N;
    CHECK(std::abs(mean_sum - eval_sum) / eval_sum < 0.02);
}

TEST_CASE("model files round-trip bit-exactly and validate their layout") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "deeplight-tests";
    fs::create_directories(dir);
    const std::string path = (dir / "model.dlsh").string();

    const Vocabulary tn = Vocabulary::build(RuleTable::builtin(), true);
    const Vocabulary plain = Vocabulary::build(RuleTable::builtin(), false);
    ModelConfig cfg;
    cfg.hidden = 32;
    cfg.vocab_size = tn.total_size();
    cfg.seed = 99;
    CnnShModel m = init_model(cfg, tn.layout_hash());
    save_model(m, path);
    CnnShModel back = load_model(path);
    CHECK(back.cfg.hidden == cfg.hidden);
    CHECK(back.cfg.seed == cfg.seed);
    CHECK(back.layout_hash == m.layout_hash);
    std::vector<const std::vector<float>*> a, b;
    m.p.for_each([&](const char*, const std::vector<float>& t) { a.push_back(&t); });
    back.p.for_each([&](const char*, const std::vector<float>& t) { b.push_back(&t); });
    for (size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i]->size() == b[i]->size());
        CHECK(std::memcmp(a[i]->data(), b[i]->data(), a[i]->size() * sizeof(float)) == 0);
    }

    // loading against the wrong layout is a hard error
    CHECK_NOTHROW(load_model(path, tn.layout_hash()));
    CHECK_THROWS_AS(load_model(path, plain.layout_hash()), VocabularyMismatch);

    // truncation anywhere is detected
    const std::string full = read_text_file(path);
    const std::string cut = (dir / "cut.dlsh").string();
    write_text_file(cut, full.substr(0, full.size() / 2));
    CHECK_THROWS_AS(load_model(cut), FormatError);
    write_text_file(cut, full.substr(0, 6));
    CHECK_THROWS_AS(load_model(cut), FormatError);
    write_text_file(cut, full + "x");
    CHECK_THROWS_AS(load_model(cut), FormatError);
}

TEST_CASE("parameter count follows the config") {
    for (int h : {32, 64, 128}) {
        ModelConfig cfg;
        cfg.hidden = h;
        Params p;
        p.resize(cfg);
        CHECK(p.total_size() == static_cast<size_t>(cfg.param_count()));
    }
}

TEST_CASE("forward throughput is linear in sequence length") {
    ModelConfig cfg;
    cfg.hidden = 32;
    cfg.vocab_size = 64;
    cfg.seed = 1;
    CnnShModel m = init_model(cfg, {});
    Rng rng(8);
    auto time_per_token = [&](int L) {
        auto ids = random_ids(L, cfg.vocab_size, rng);
        Workspace ws;
        forward_t(m.cfg, m.p, ids, false, nullptr, ws);  // warm
        double best = 1e100;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            forward_t(m.cfg, m.p, ids, false, nullptr, ws);
            const auto t1 = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count() / L);
        }
        return best;
    };
    const double short_t = time_per_token(512);
    const double long_t = time_per_token(4096);
    // linear scaling: per-token cost should not grow materially with L
    CHECK(long_t < short_t * 4.0);
}
