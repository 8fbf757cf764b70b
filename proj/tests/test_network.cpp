#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "glucast/network.hpp"

using namespace glucast;
using namespace glucast::network;

namespace {

LstmParams zero_lstm(std::size_t input_dim, std::size_t hidden_dim) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    const std::size_t z = hidden_dim + input_dim;
    p.w_i = Matrix(hidden_dim, z);
    p.w_f = Matrix(hidden_dim, z);
    p.w_c = Matrix(hidden_dim, z);
    p.w_o = Matrix(hidden_dim, z);
    p.b_i.assign(hidden_dim, 0.0);
    p.b_f.assign(hidden_dim, 0.0);
    p.b_c.assign(hidden_dim, 0.0);
    p.b_o.assign(hidden_dim, 0.0);
    return p;
}

training::TrainConfig test_config(std::uint64_t seed) {
    training::TrainConfig cfg;
    cfg.seed = seed;
    cfg.ph_minutes = 30;
    cfg.window_len = 12;
    return cfg;
}

pipeline::Scaler unit_scaler() { return pipeline::Scaler{0.0, 1.0}; }

// ---------------------------------------------------------------------------
// Scalar reference cell: one hidden unit, one input, written with plain
// doubles and libm only. This is the cross-check the vector code must hit
// to 1e-12; it shares nothing with the library implementation.

struct ScalarCellParams {
    double wi_h, wi_x, bi;
    double wf_h, wf_x, bf;
    double wc_h, wc_x, bc;
    double wo_h, wo_x, bo;
};

struct ScalarCellState {
    double h = 0.0;
    double c = 0.0;
};

ScalarCellState scalar_cell_step(const ScalarCellParams& p, double x, ScalarCellState s) {
    const double i = 1.0 / (1.0 + std::exp(-(p.wi_h * s.h + p.wi_x * x + p.bi)));
    const double f = 1.0 / (1.0 + std::exp(-(p.wf_h * s.h + p.wf_x * x + p.bf)));
    const double cc = std::tanh(p.wc_h * s.h + p.wc_x * x + p.bc);
    const double o = 1.0 / (1.0 + std::exp(-(p.wo_h * s.h + p.wo_x * x + p.bo)));
    ScalarCellState out;
    out.c = f * s.c + i * cc;
    out.h = o * std::tanh(out.c);
    return out;
}

}  // namespace

TEST_CASE("cell with zero parameters: gates sit at one half") {
    const LstmParams p = zero_lstm(1, 1);

    // x arbitrary, zero state: i=f=o=0.5, candidate 0, so c stays 0.
    LstmStepCache st = lstm_cell_step(p, {3.7}, {0.0}, {0.0});
    CHECK(st.i[0] == 0.5);
    CHECK(st.f[0] == 0.5);
    CHECK(st.o[0] == 0.5);
    CHECK(st.c_cand[0] == 0.0);
    CHECK(st.c[0] == 0.0);
    CHECK(st.h[0] == 0.0);

    // Carry c_prev = 1: c = 0.5, h = 0.5 * tanh(0.5).
    st = lstm_cell_step(p, {0.0}, {0.0}, {1.0});
    CHECK(st.c[0] == 0.5);
    CHECK(st.h[0] == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-15));
    CHECK(st.h[0] == doctest::Approx(0.23105857863000487).epsilon(1e-12));
}

TEST_CASE("cell concatenation order is hidden state first") {
    LstmParams p = zero_lstm(1, 1);
    // Weight only the h slot of the input gate's pre-activation.
    p.w_i(0, 0) = 1.0;
    LstmStepCache st = lstm_cell_step(p, {5.0}, {2.0}, {0.0});
    CHECK(st.i[0] == doctest::Approx(sigmoid(2.0)).epsilon(1e-15));
    CHECK(st.z == Vec{2.0, 5.0});

    // Now weight only the x slot.
    p.w_i(0, 0) = 0.0;
    p.w_i(0, 1) = 1.0;
    st = lstm_cell_step(p, {5.0}, {2.0}, {0.0});
    CHECK(st.i[0] == doctest::Approx(sigmoid(5.0)).epsilon(1e-15));
}

TEST_CASE("cell rejects mismatched shapes") {
    const LstmParams p = zero_lstm(1, 4);
    CHECK_THROWS_AS(lstm_cell_step(p, {1.0, 2.0}, Vec(4, 0.0), Vec(4, 0.0)), ShapeError);
    CHECK_THROWS_AS(lstm_cell_step(p, {1.0}, Vec(3, 0.0), Vec(4, 0.0)), ShapeError);
    CHECK_THROWS_AS(lstm_cell_step(p, {1.0}, Vec(4, 0.0), Vec(5, 0.0)), ShapeError);
}

TEST_CASE("vector cell matches the scalar reference over 1000 random steps") {
    SeededRng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        ScalarCellParams sp;
        sp.wi_h = rng.uniform(-1.5, 1.5);
        sp.wi_x = rng.uniform(-1.5, 1.5);
        sp.bi = rng.uniform(-1.0, 1.0);
        sp.wf_h = rng.uniform(-1.5, 1.5);
        sp.wf_x = rng.uniform(-1.5, 1.5);
        sp.bf = rng.uniform(-1.0, 1.0);
        sp.wc_h = rng.uniform(-1.5, 1.5);
        sp.wc_x = rng.uniform(-1.5, 1.5);
        sp.bc = rng.uniform(-1.0, 1.0);
        sp.wo_h = rng.uniform(-1.5, 1.5);
        sp.wo_x = rng.uniform(-1.5, 1.5);
        sp.bo = rng.uniform(-1.0, 1.0);

        LstmParams p = zero_lstm(1, 1);
        p.w_i(0, 0) = sp.wi_h;
        p.w_i(0, 1) = sp.wi_x;
        p.b_i[0] = sp.bi;
        p.w_f(0, 0) = sp.wf_h;
        p.w_f(0, 1) = sp.wf_x;
        p.b_f[0] = sp.bf;
        p.w_c(0, 0) = sp.wc_h;
        p.w_c(0, 1) = sp.wc_x;
        p.b_c[0] = sp.bc;
        p.w_o(0, 0) = sp.wo_h;
        p.w_o(0, 1) = sp.wo_x;
        p.b_o[0] = sp.bo;

        ScalarCellState ref;
        ref.h = rng.uniform(-1.0, 1.0);
        ref.c = rng.uniform(-2.0, 2.0);
        const double x = rng.uniform(-3.0, 3.0);

        const LstmStepCache got = lstm_cell_step(p, {x}, {ref.h}, {ref.c});
        const ScalarCellState want = scalar_cell_step(sp, x, ref);
        worst = std::max(worst, std::abs(got.h[0] - want.h));
        worst = std::max(worst, std::abs(got.c[0] - want.c));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("sequence run threads state and rejects empty input") {
    LstmParams p = zero_lstm(1, 1);
    p.w_c(0, 1) = 10.0;  // candidate saturates to sign(x)
    p.b_i[0] = 100.0;    // input gate pinned open
    p.b_f[0] = 100.0;    // forget gate pinned open: c accumulates

    const LstmSequenceCache seq = lstm_forward(p, {{1.0}, {1.0}, {1.0}});
    REQUIRE(seq.steps.size() == 3);
    CHECK(seq.steps[0].c[0] == doctest::Approx(std::tanh(10.0)).epsilon(1e-12));
    CHECK(seq.steps[2].c[0] == doctest::Approx(3.0 * std::tanh(10.0)).epsilon(1e-9));
    // State is threaded: step 1's c_prev is step 0's c.
    CHECK(seq.steps[1].c_prev[0] == seq.steps[0].c[0]);

    CHECK_THROWS_AS(lstm_forward(p, {}), InputError);
}

TEST_CASE("bidirectional output is fwd-last then bwd-last") {
    SeededRng rng(5);
    training::TrainConfig cfg = test_config(5);
    const Model m = init_model(cfg, unit_scaler());

    std::vector<Vec> xs;
    for (int t = 0; t < 6; ++t) xs.push_back(Vec(4, rng.uniform(-1.0, 1.0)));

    BiCaches caches;
    const Vec out = bilstm_forward(m.bi_fwd, m.bi_bwd, xs, &caches);
    REQUIRE(out.size() == 8);
    for (std::size_t u = 0; u < 4; ++u) {
        CHECK(out[u] == caches.fwd.steps.back().h[u]);
        CHECK(out[4 + u] == caches.bwd.steps.back().h[u]);
    }
}

TEST_CASE("bidirectional halves coincide for palindromes with tied weights") {
    training::TrainConfig cfg = test_config(17);
    const Model m = init_model(cfg, unit_scaler());

    std::vector<Vec> xs;
    SeededRng rng(9);
    for (int t = 0; t < 3; ++t) xs.push_back(Vec(4, rng.uniform(-1.0, 1.0)));
    std::vector<Vec> pal = {xs[0], xs[1], xs[2], xs[1], xs[0]};

    // Same parameters in both directions on a palindrome: the reversed
    // sequence is the sequence, so the two final states are identical.
    const Vec out = bilstm_forward(m.bi_fwd, m.bi_fwd, pal);
    for (std::size_t u = 0; u < 4; ++u) CHECK(out[u] == out[4 + u]);

    // On a non-palindrome they differ.
    const Vec out2 = bilstm_forward(m.bi_fwd, m.bi_fwd, xs);
    bool any_diff = false;
    for (std::size_t u = 0; u < 4; ++u) any_diff = any_diff || out2[u] != out2[4 + u];
    CHECK(any_diff);
}

TEST_CASE("dense layer applies activation after the affine map") {
    DenseParams p;
    p.in_dim = 2;
    p.out_dim = 2;
    p.w = Matrix(2, 2);
    p.w(0, 0) = 1.0;
    p.w(0, 1) = -1.0;
    p.w(1, 0) = 2.0;
    p.w(1, 1) = 0.0;
    p.b = {0.5, -5.0};
    p.act = Activation::relu;

    Vec pre;
    const Vec out = dense_forward(p, {1.0, 2.0}, &pre);
    CHECK(pre == Vec{-0.5, -3.0});
    CHECK(out == Vec{0.0, 0.0});  // relu clamps both

    p.act = Activation::linear;
    const Vec lin = dense_forward(p, {1.0, 2.0});
    CHECK(lin == Vec{-0.5, -3.0});

    CHECK_THROWS_AS(dense_forward(p, {1.0}), ShapeError);
}

TEST_CASE("a zeroed model predicts its output bias for any window") {
    training::TrainConfig cfg = test_config(3);
    Model m = init_model(cfg, unit_scaler());
    for (double* v : parameter_views(m)) *v = 0.0;
    m.dense.back().b[0] = 0.7;

    SeededRng rng(1);
    for (int trial = 0; trial < 3; ++trial) {
        Vec window(12);
        for (double& w : window) w = rng.uniform(0.0, 1.0);
        CHECK(model_forward(m, window) == 0.7);
    }
}

TEST_CASE("forward pass validates window length") {
    const Model m = init_model(test_config(1), unit_scaler());
    CHECK_THROWS_AS(model_forward(m, Vec(11, 0.5)), InputError);
    CHECK_NOTHROW(model_forward(m, Vec(12, 0.5)));
}

TEST_CASE("initialisation: forget bias one, the rest zero, Glorot bounds") {
    const Model m = init_model(test_config(123), unit_scaler());

    for (const LstmParams* p : {&m.lstm1, &m.bi_fwd, &m.bi_bwd}) {
        for (double b : p->b_f) CHECK(b == 1.0);
        for (double b : p->b_i) CHECK(b == 0.0);
        for (double b : p->b_c) CHECK(b == 0.0);
        for (double b : p->b_o) CHECK(b == 0.0);
        const double bound =
            std::sqrt(6.0 / static_cast<double>((p->hidden_dim + p->input_dim) + p->hidden_dim));
        for (const Matrix* w : {&p->w_i, &p->w_f, &p->w_c, &p->w_o}) {
            for (double v : w->data) {
                CHECK(std::abs(v) <= bound);
            }
        }
    }
    for (const DenseParams& d : m.dense) {
        for (double b : d.b) CHECK(b == 0.0);
        const double bound = std::sqrt(6.0 / static_cast<double>(d.in_dim + d.out_dim));
        for (double v : d.w.data) CHECK(std::abs(v) <= bound);
    }

    // Architecture is pinned.
    CHECK(m.lstm1.input_dim == 1);
    CHECK(m.lstm1.hidden_dim == 4);
    CHECK(m.bi_fwd.input_dim == 4);
    REQUIRE(m.dense.size() == 4);
    CHECK(m.dense[1].out_dim == 64);
    CHECK(m.dense[3].out_dim == 1);
    CHECK(m.dense[3].act == Activation::linear);
}

TEST_CASE("initialisation is seed-deterministic") {
    const Model a = init_model(test_config(9), unit_scaler());
    const Model b = init_model(test_config(9), unit_scaler());
    const Model c = init_model(test_config(10), unit_scaler());
    CHECK(same_parameters(a, b));
    CHECK_FALSE(same_parameters(a, c));
}

TEST_CASE("parameter views cover every trainable scalar exactly once") {
    Model m = init_model(test_config(4), unit_scaler());
    auto views = parameter_views(m);
    CHECK(views.size() == parameter_count(m));

    // Expected count: three LSTMs plus the dense stack.
    auto lstm_count = [](const LstmParams& p) {
        return 4 * (p.hidden_dim * (p.hidden_dim + p.input_dim) + p.hidden_dim);
    };
    std::size_t want = lstm_count(m.lstm1) + lstm_count(m.bi_fwd) + lstm_count(m.bi_bwd);
    for (const auto& d : m.dense) want += d.out_dim * d.in_dim + d.out_dim;
    CHECK(views.size() == want);

    // No aliasing.
    std::sort(views.begin(), views.end());
    CHECK(std::adjacent_find(views.begin(), views.end()) == views.end());

    Gradients g = zero_gradients(m);
    CHECK(parameter_views(g).size() == views.size());
}

TEST_CASE("analytic gradients match central differences across seeds") {
    // Full-model check: d(prediction)/d(theta) for every parameter, five
    // seeds, random windows. Relative error must stay within 1e-5.
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Model m = init_model(test_config(seed), unit_scaler());
        SeededRng rng(seed * 1000 + 7);
        Vec window(12);
        for (double& w : window) w = rng.uniform(0.0, 1.0);

        ForwardCache cache;
        model_forward(m, window, &cache);
        Gradients grads = zero_gradients(m);
        model_backward(m, cache, 1.0, grads);

        auto mviews = parameter_views(m);
        auto gviews = parameter_views(grads);
        REQUIRE(mviews.size() == gviews.size());

        for (std::size_t j = 0; j < mviews.size(); ++j) {
            const double saved = *mviews[j];
            const double h = 3e-6 * std::max(1.0, std::abs(saved));
            *mviews[j] = saved + h;
            const double up = model_forward(m, window);
            *mviews[j] = saved - h;
            const double dn = model_forward(m, window);
            *mviews[j] = saved;

            const double fd = (up - dn) / (2.0 * h);
            const double an = *gviews[j];
            const double rel = std::abs(fd - an) / std::max(std::abs(fd) + std::abs(an), 1e-4);
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst <= 1e-5);
    MESSAGE("worst relative gradient error: ", worst);
}

TEST_CASE("upstream factor scales gradients linearly") {
    Model m = init_model(test_config(6), unit_scaler());
    Vec window(12, 0.4);
    ForwardCache cache;
    model_forward(m, window, &cache);

    Gradients g1 = zero_gradients(m);
    model_backward(m, cache, 1.0, g1);
    Gradients g3 = zero_gradients(m);
    model_backward(m, cache, 3.0, g3);

    auto v1 = parameter_views(g1);
    auto v3 = parameter_views(g3);
    for (std::size_t j = 0; j < v1.size(); ++j) {
        CHECK(*v3[j] == doctest::Approx(3.0 * *v1[j]).epsilon(1e-12));
    }
}

TEST_CASE("backward accumulates instead of overwriting") {
    Model m = init_model(test_config(8), unit_scaler());
    Vec window(12, 0.3);
    ForwardCache cache;
    model_forward(m, window, &cache);

    Gradients once = zero_gradients(m);
    model_backward(m, cache, 1.0, once);
    Gradients twice = zero_gradients(m);
    model_backward(m, cache, 1.0, twice);
    model_backward(m, cache, 1.0, twice);

    auto v1 = parameter_views(once);
    auto v2 = parameter_views(twice);
    for (std::size_t j = 0; j < v1.size(); ++j) {
        CHECK(*v2[j] == doctest::Approx(2.0 * *v1[j]).epsilon(1e-12));
    }
}

TEST_CASE("checkpoints round-trip bit for bit") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "model_rt.json").string();

    training::TrainConfig cfg = test_config(31);
    cfg.epochs = 17;
    cfg.learning_rate = 0.00125;
    cfg.phase = training::Phase::pretrain2;
    Model m = init_model(cfg, pipeline::Scaler{52.5, 389.75});
    m.parent_checkpoint_hash = "00deadbeef00cafe";

    save_model(m, path);
    const Model back = load_model(path);

    CHECK(same_parameters(m, back));
    CHECK(back.window_len == m.window_len);
    CHECK(back.scaler == m.scaler);
    CHECK(back.train_config == cfg);
    CHECK(back.parent_checkpoint_hash == "00deadbeef00cafe");

    // Bit-identical predictions, not merely close.
    SeededRng rng(3);
    for (int t = 0; t < 5; ++t) {
        Vec window(12);
        for (double& w : window) w = rng.uniform(0.0, 1.0);
        CHECK(model_forward(m, window) == model_forward(back, window));
    }

    // Saving the loaded model reproduces the file byte for byte.
    const std::string path2 = (dir / "model_rt2.json").string();
    save_model(back, path2);
    CHECK(checkpoint_hash(path) == checkpoint_hash(path2));

    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("loader rejects files that do not describe this network") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string good_path = (dir / "model_good.json").string();
    const Model m = init_model(test_config(2), unit_scaler());
    save_model(m, good_path);

    std::ifstream in(good_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    auto write_variant = [&](const std::string& body) {
        const std::string p = (dir / "model_bad.json").string();
        std::ofstream out(p, std::ios::binary);
        out << body;
        out.close();
        return p;
    };

    SUBCASE("dense width tampered from 64 to 32") {
        std::string t = text;
        const auto at = t.find("\"out_dim\":64");
        REQUIRE(at != std::string::npos);
        t.replace(at, 12, "\"out_dim\":32");
        const std::string p = write_variant(t);
        CHECK_THROWS_AS(load_model(p), ShapeError);
        std::remove(p.c_str());
    }
    SUBCASE("unknown format version") {
        std::string t = text;
        const auto at = t.find("\"format_version\":1");
        REQUIRE(at != std::string::npos);
        t.replace(at, 18, "\"format_version\":9");
        const std::string p = write_variant(t);
        CHECK_THROWS_AS(load_model(p), InputError);
        std::remove(p.c_str());
    }
    SUBCASE("truncated file") {
        const std::string p = write_variant(text.substr(0, text.size() / 2));
        CHECK_THROWS_AS(load_model(p), InputError);
        std::remove(p.c_str());
    }
    SUBCASE("not json at all") {
        const std::string p = write_variant("pure garbage");
        CHECK_THROWS_AS(load_model(p), InputError);
        std::remove(p.c_str());
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_model((dir / "no_such_model.json").string()), InputError);
    }

    std::remove(good_path.c_str());
}

TEST_CASE("checkpoint digest is stable and sensitive") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / "hash_a.json").string();
    const std::string b = (dir / "hash_b.json").string();

    std::ofstream(a, std::ios::binary) << "identical bytes";
    std::ofstream(b, std::ios::binary) << "identical bytes";
    CHECK(checkpoint_hash(a) == checkpoint_hash(b));
    CHECK(checkpoint_hash(a).size() == 16);

    std::ofstream(b, std::ios::binary) << "identical bytez";
    CHECK(checkpoint_hash(a) != checkpoint_hash(b));

    // FNV-1a of the empty string is the offset basis.
    std::ofstream(b, std::ios::binary) << "";
    CHECK(checkpoint_hash(b) == "cbf29ce484222325");

    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("saving non-finite parameters is refused") {
    const auto dir = std::filesystem::temp_directory_path();
    Model m = init_model(test_config(2), unit_scaler());
    m.dense[0].b[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(save_model(m, (dir / "model_nan.json").string()), NumericError);
}
