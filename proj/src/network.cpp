#include "glucast/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace glucast::network {

namespace {

using nlohmann::json;

LstmParams make_lstm(std::size_t input_dim, std::size_t hidden_dim) {
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

DenseParams make_dense(std::size_t in_dim, std::size_t out_dim, Activation act) {
    DenseParams d;
    d.in_dim = in_dim;
    d.out_dim = out_dim;
    d.w = Matrix(out_dim, in_dim);
    d.b.assign(out_dim, 0.0);
    d.act = act;
    return d;
}

void glorot_fill(Matrix& w, std::size_t fan_in, std::size_t fan_out, SeededRng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.data) v = rng.uniform(-bound, bound);
}

// Sums the four gate back-projections W_g^T da_g into one dz vector.
Vec gate_backprop_z(const LstmParams& p, const Vec& da_i, const Vec& da_f, const Vec& da_c,
                    const Vec& da_o) {
    Vec dz = matvec_transposed(p.w_i, da_i);
    const Vec dz_f = matvec_transposed(p.w_f, da_f);
    const Vec dz_c = matvec_transposed(p.w_c, da_c);
    const Vec dz_o = matvec_transposed(p.w_o, da_o);
    for (std::size_t j = 0; j < dz.size(); ++j) dz[j] += dz_f[j] + dz_c[j] + dz_o[j];
    return dz;
}

void add_in_place(Vec& acc, const Vec& v) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

// Backward through one unrolled cell. dh_ext[t] is the gradient reaching
// h_t from outside the recurrence; dxs, when requested, receives the
// gradient with respect to each step's input.
void lstm_backward(const LstmParams& p, const LstmSequenceCache& cache,
                   const std::vector<Vec>& dh_ext, LstmGrads& g, std::vector<Vec>* dxs) {
    const std::size_t steps = cache.steps.size();
    const std::size_t h_dim = p.hidden_dim;
    if (dxs) dxs->assign(steps, Vec(p.input_dim, 0.0));

    Vec dh_rec(h_dim, 0.0);  // recurrent gradient flowing into h_t from t+1
    Vec dc_rec(h_dim, 0.0);
    Vec da_i(h_dim), da_f(h_dim), da_c(h_dim), da_o(h_dim);
    for (std::size_t t = steps; t-- > 0;) {
        const LstmStepCache& st = cache.steps[t];
        for (std::size_t h = 0; h < h_dim; ++h) {
            const double dh = dh_rec[h] + dh_ext[t][h];
            const double d_o = dh * st.tanh_c[h];
            da_o[h] = d_o * st.o[h] * (1.0 - st.o[h]);
            const double dc = dh * st.o[h] * (1.0 - st.tanh_c[h] * st.tanh_c[h]) + dc_rec[h];
            da_f[h] = dc * st.c_prev[h] * st.f[h] * (1.0 - st.f[h]);
            da_i[h] = dc * st.c_cand[h] * st.i[h] * (1.0 - st.i[h]);
            da_c[h] = dc * st.i[h] * (1.0 - st.c_cand[h] * st.c_cand[h]);
            dc_rec[h] = dc * st.f[h];
        }
        add_outer(g.w_i, da_i, st.z);
        add_outer(g.w_f, da_f, st.z);
        add_outer(g.w_c, da_c, st.z);
        add_outer(g.w_o, da_o, st.z);
        add_in_place(g.b_i, da_i);
        add_in_place(g.b_f, da_f);
        add_in_place(g.b_c, da_c);
        add_in_place(g.b_o, da_o);

        const Vec dz = gate_backprop_z(p, da_i, da_f, da_c, da_o);
        for (std::size_t h = 0; h < h_dim; ++h) dh_rec[h] = dz[h];
        if (dxs) {
            for (std::size_t d = 0; d < p.input_dim; ++d) (*dxs)[t][d] = dz[h_dim + d];
        }
    }
}

LstmGrads zero_lstm_grads(const LstmParams& p) {
    LstmGrads g;
    const std::size_t z = p.hidden_dim + p.input_dim;
    g.w_i = Matrix(p.hidden_dim, z);
    g.w_f = Matrix(p.hidden_dim, z);
    g.w_c = Matrix(p.hidden_dim, z);
    g.w_o = Matrix(p.hidden_dim, z);
    g.b_i.assign(p.hidden_dim, 0.0);
    g.b_f.assign(p.hidden_dim, 0.0);
    g.b_c.assign(p.hidden_dim, 0.0);
    g.b_o.assign(p.hidden_dim, 0.0);
    return g;
}

void collect(std::vector<double*>& out, Matrix& m) {
    for (double& v : m.data) out.push_back(&v);
}

void collect(std::vector<double*>& out, Vec& v) {
    for (double& x : v) out.push_back(&x);
}

template <typename LstmLike>
void collect_lstm(std::vector<double*>& out, LstmLike& p) {
    collect(out, p.w_i);
    collect(out, p.w_f);
    collect(out, p.w_c);
    collect(out, p.w_o);
    collect(out, p.b_i);
    collect(out, p.b_f);
    collect(out, p.b_c);
    collect(out, p.b_o);
}

}  // namespace

LstmStepCache lstm_cell_step(const LstmParams& p, const Vec& x, const Vec& h_prev,
                             const Vec& c_prev) {
    if (x.size() != p.input_dim || h_prev.size() != p.hidden_dim ||
        c_prev.size() != p.hidden_dim) {
        throw ShapeError("lstm_cell_step: expected input " + std::to_string(p.input_dim) +
                         ", state " + std::to_string(p.hidden_dim) + "; got input " +
                         std::to_string(x.size()) + ", h " + std::to_string(h_prev.size()) +
                         ", c " + std::to_string(c_prev.size()));
    }
    LstmStepCache st;
    st.z = concat(h_prev, x);
    st.c_prev = c_prev;
    st.i = sigmoid_map(add(matvec(p.w_i, st.z), p.b_i));
    st.f = sigmoid_map(add(matvec(p.w_f, st.z), p.b_f));
    st.c_cand = tanh_map(add(matvec(p.w_c, st.z), p.b_c));
    st.o = sigmoid_map(add(matvec(p.w_o, st.z), p.b_o));

    const std::size_t h_dim = p.hidden_dim;
    st.c.resize(h_dim);
    st.tanh_c.resize(h_dim);
    st.h.resize(h_dim);
    for (std::size_t h = 0; h < h_dim; ++h) {
        st.c[h] = st.f[h] * c_prev[h] + st.i[h] * st.c_cand[h];
        st.tanh_c[h] = std::tanh(st.c[h]);
        st.h[h] = st.o[h] * st.tanh_c[h];
    }
    return st;
}

LstmSequenceCache lstm_forward(const LstmParams& p, const std::vector<Vec>& xs) {
    if (xs.empty()) throw InputError("lstm_forward: empty input sequence");
    LstmSequenceCache cache;
    cache.steps.reserve(xs.size());
    Vec h(p.hidden_dim, 0.0);
    Vec c(p.hidden_dim, 0.0);
    for (const Vec& x : xs) {
        cache.steps.push_back(lstm_cell_step(p, x, h, c));
        h = cache.steps.back().h;
        c = cache.steps.back().c;
    }
    return cache;
}

Vec bilstm_forward(const LstmParams& pf, const LstmParams& pb, const std::vector<Vec>& xs,
                   BiCaches* caches) {
    if (xs.empty()) throw InputError("bilstm_forward: empty input sequence");
    BiCaches local;
    BiCaches& bc = caches ? *caches : local;
    bc.fwd = lstm_forward(pf, xs);
    const std::vector<Vec> rev(xs.rbegin(), xs.rend());
    bc.bwd = lstm_forward(pb, rev);
    return concat(bc.fwd.steps.back().h, bc.bwd.steps.back().h);
}

Vec dense_forward(const DenseParams& p, const Vec& v, Vec* pre_out) {
    Vec pre = add(matvec(p.w, v), p.b);
    if (pre_out) *pre_out = pre;
    if (p.act == Activation::relu) {
        for (double& x : pre) x = x > 0.0 ? x : 0.0;
    }
    return pre;
}

double model_forward(const Model& m, const Vec& window, ForwardCache* cache) {
    if (window.size() != m.window_len) {
        throw InputError("model_forward: model expects windows of length " +
                         std::to_string(m.window_len) + ", got " +
                         std::to_string(window.size()));
    }
    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;

    fc.xs1.clear();
    fc.xs1.reserve(window.size());
    for (double v : window) fc.xs1.push_back(Vec{v});

    fc.lstm1 = lstm_forward(m.lstm1, fc.xs1);
    fc.seq.clear();
    fc.seq.reserve(fc.lstm1.steps.size());
    for (const auto& st : fc.lstm1.steps) fc.seq.push_back(st.h);

    BiCaches bi;
    fc.bi_out = bilstm_forward(m.bi_fwd, m.bi_bwd, fc.seq, &bi);
    fc.bi_fwd = std::move(bi.fwd);
    fc.bi_bwd = std::move(bi.bwd);

    fc.dense_in.clear();
    fc.dense_pre.clear();
    Vec a = fc.bi_out;
    for (const DenseParams& layer : m.dense) {
        fc.dense_in.push_back(a);
        Vec pre;
        Vec activated = dense_forward(layer, a, &pre);
        fc.dense_pre.push_back(std::move(pre));
        a = std::move(activated);
    }
    if (a.size() != 1) {
        throw ShapeError("model_forward: head must end in one output, got " +
                         std::to_string(a.size()));
    }
    fc.prediction = a[0];
    return fc.prediction;
}

void model_backward(const Model& m, const ForwardCache& cache, double upstream,
                    Gradients& grads) {
    // Dense head, last layer first.
    Vec d{upstream};
    for (std::size_t l = m.dense.size(); l-- > 0;) {
        const DenseParams& layer = m.dense[l];
        Vec d_pre(layer.out_dim);
        for (std::size_t j = 0; j < layer.out_dim; ++j) {
            const double gate =
                layer.act == Activation::relu ? (cache.dense_pre[l][j] > 0.0 ? 1.0 : 0.0) : 1.0;
            d_pre[j] = d[j] * gate;
        }
        add_outer(grads.dense[l].w, d_pre, cache.dense_in[l]);
        add_in_place(grads.dense[l].b, d_pre);
        d = matvec_transposed(layer.w, d_pre);
    }

    // d now holds the gradient at the bi-directional concat output.
    const std::size_t h_dim = m.bi_fwd.hidden_dim;
    const std::size_t steps = cache.seq.size();
    std::vector<Vec> dh_ext(steps, Vec(h_dim, 0.0));

    // Forward direction: only its final hidden state reaches the head.
    dh_ext.back().assign(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(h_dim));
    std::vector<Vec> dseq_fwd;
    lstm_backward(m.bi_fwd, cache.bi_fwd, dh_ext, grads.bi_fwd, &dseq_fwd);

    // Backward direction ran over the reversed sequence, so its input
    // gradient at step t belongs to seq[steps-1-t].
    dh_ext.assign(steps, Vec(h_dim, 0.0));
    dh_ext.back().assign(d.begin() + static_cast<std::ptrdiff_t>(h_dim), d.end());
    std::vector<Vec> dseq_bwd_rev;
    lstm_backward(m.bi_bwd, cache.bi_bwd, dh_ext, grads.bi_bwd, &dseq_bwd_rev);

    std::vector<Vec> dh_seq(steps, Vec(h_dim, 0.0));
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t h = 0; h < h_dim; ++h) {
            dh_seq[t][h] = dseq_fwd[t][h] + dseq_bwd_rev[steps - 1 - t][h];
        }
    }
    lstm_backward(m.lstm1, cache.lstm1, dh_seq, grads.lstm1, nullptr);
}

Model init_model(const training::TrainConfig& cfg, const pipeline::Scaler& scaler) {
    cfg.validate();
    Model m;
    m.lstm1 = make_lstm(1, kLstmHidden);
    m.bi_fwd = make_lstm(kLstmHidden, kLstmHidden);
    m.bi_bwd = make_lstm(kLstmHidden, kLstmHidden);
    m.dense.push_back(make_dense(kBiOutWidth, 8, Activation::relu));
    m.dense.push_back(make_dense(8, 64, Activation::relu));
    m.dense.push_back(make_dense(64, 8, Activation::relu));
    m.dense.push_back(make_dense(8, 1, Activation::linear));
    m.window_len = cfg.window_len;
    m.scaler = scaler;
    m.train_config = cfg;

    SeededRng rng(cfg.seed);
    for (LstmParams* p : {&m.lstm1, &m.bi_fwd, &m.bi_bwd}) {
        const std::size_t fan_in = p->hidden_dim + p->input_dim;
        glorot_fill(p->w_i, fan_in, p->hidden_dim, rng);
        glorot_fill(p->w_f, fan_in, p->hidden_dim, rng);
        glorot_fill(p->w_c, fan_in, p->hidden_dim, rng);
        glorot_fill(p->w_o, fan_in, p->hidden_dim, rng);
        p->b_f.assign(p->hidden_dim, 1.0);  // open forget gates at start
    }
    for (DenseParams& layer : m.dense) {
        glorot_fill(layer.w, layer.in_dim, layer.out_dim, rng);
    }
    return m;
}

Gradients zero_gradients(const Model& m) {
    Gradients g;
    g.lstm1 = zero_lstm_grads(m.lstm1);
    g.bi_fwd = zero_lstm_grads(m.bi_fwd);
    g.bi_bwd = zero_lstm_grads(m.bi_bwd);
    for (const DenseParams& layer : m.dense) {
        DenseGrads dg;
        dg.w = Matrix(layer.out_dim, layer.in_dim);
        dg.b.assign(layer.out_dim, 0.0);
        g.dense.push_back(std::move(dg));
    }
    return g;
}

std::vector<double*> parameter_views(Model& m) {
    std::vector<double*> out;
    out.reserve(parameter_count(m));
    collect_lstm(out, m.lstm1);
    collect_lstm(out, m.bi_fwd);
    collect_lstm(out, m.bi_bwd);
    for (DenseParams& layer : m.dense) {
        collect(out, layer.w);
        collect(out, layer.b);
    }
    return out;
}

std::vector<double*> parameter_views(Gradients& g) {
    std::vector<double*> out;
    collect_lstm(out, g.lstm1);
    collect_lstm(out, g.bi_fwd);
    collect_lstm(out, g.bi_bwd);
    for (DenseGrads& layer : g.dense) {
        collect(out, layer.w);
        collect(out, layer.b);
    }
    return out;
}

std::size_t parameter_count(const Model& m) {
    std::size_t n = 0;
    for (const LstmParams* p : {&m.lstm1, &m.bi_fwd, &m.bi_bwd}) {
        n += 4 * p->w_i.data.size() + 4 * p->b_i.size();
    }
    for (const DenseParams& layer : m.dense) n += layer.w.data.size() + layer.b.size();
    return n;
}

bool same_parameters(const Model& a, const Model& b) {
    Model& am = const_cast<Model&>(a);
    Model& bm = const_cast<Model&>(b);
    if (parameter_count(a) != parameter_count(b)) return false;
    const auto av = parameter_views(am);
    const auto bv = parameter_views(bm);
    for (std::size_t i = 0; i < av.size(); ++i) {
        if (*av[i] != *bv[i]) return false;
    }
    return true;
}

namespace {

// Checkpoints are written by hand so every double goes out with 17
// significant digits; that is enough for an exact binary round-trip.
std::string fmt_double(double v) {
    if (!std::isfinite(v)) throw NumericError("checkpoint write: non-finite parameter");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_doubles(std::ostream& out, const Vec& v) {
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << fmt_double(v[i]);
    }
    out << ']';
}

void emit_lstm(std::ostream& out, const LstmParams& p) {
    out << "{\"w_i\":";
    emit_doubles(out, p.w_i.data);
    out << ",\"w_f\":";
    emit_doubles(out, p.w_f.data);
    out << ",\"w_c\":";
    emit_doubles(out, p.w_c.data);
    out << ",\"w_o\":";
    emit_doubles(out, p.w_o.data);
    out << ",\"b_i\":";
    emit_doubles(out, p.b_i);
    out << ",\"b_f\":";
    emit_doubles(out, p.b_f);
    out << ",\"b_c\":";
    emit_doubles(out, p.b_c);
    out << ",\"b_o\":";
    emit_doubles(out, p.b_o);
    out << '}';
}

const char* act_name(Activation a) {
    return a == Activation::relu ? "relu" : "linear";
}

Activation act_from_name(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "linear") return Activation::linear;
    throw InputError("checkpoint: unknown activation '" + s + "'");
}

void emit_lstm_spec(std::ostream& out, const LstmParams& p) {
    out << "{\"input_dim\":" << p.input_dim << ",\"hidden_dim\":" << p.hidden_dim << '}';
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

Vec read_doubles(const json& j, std::size_t expected, const std::string& what) {
    auto v = j.get<Vec>();
    if (v.size() != expected) {
        throw ShapeError("checkpoint: " + what + " has " + std::to_string(v.size()) +
                         " values, expected " + std::to_string(expected));
    }
    return v;
}

LstmParams read_lstm(const json& spec, const json& params, std::size_t want_in,
                     std::size_t want_hidden, const std::string& name) {
    const auto in_dim = spec.at("input_dim").get<std::size_t>();
    const auto hidden = spec.at("hidden_dim").get<std::size_t>();
    if (in_dim != want_in || hidden != want_hidden) {
        throw ShapeError("checkpoint: " + name + " must be " + std::to_string(want_in) + "->" +
                         std::to_string(want_hidden) + ", got " + std::to_string(in_dim) + "->" +
                         std::to_string(hidden));
    }
    LstmParams p = make_lstm(in_dim, hidden);
    const std::size_t wn = hidden * (hidden + in_dim);
    p.w_i.data = read_doubles(params.at("w_i"), wn, name + ".w_i");
    p.w_f.data = read_doubles(params.at("w_f"), wn, name + ".w_f");
    p.w_c.data = read_doubles(params.at("w_c"), wn, name + ".w_c");
    p.w_o.data = read_doubles(params.at("w_o"), wn, name + ".w_o");
    p.b_i = read_doubles(params.at("b_i"), hidden, name + ".b_i");
    p.b_f = read_doubles(params.at("b_f"), hidden, name + ".b_f");
    p.b_c = read_doubles(params.at("b_c"), hidden, name + ".b_c");
    p.b_o = read_doubles(params.at("b_o"), hidden, name + ".b_o");
    return p;
}

}  // namespace

void save_model(const Model& m, const std::string& path) {
    std::ostringstream out;
    out << "{\"format_version\":1";
    out << ",\"L\":" << m.window_len;

    out << ",\"layer_spec\":{\"lstm1\":";
    emit_lstm_spec(out, m.lstm1);
    out << ",\"bi_fwd\":";
    emit_lstm_spec(out, m.bi_fwd);
    out << ",\"bi_bwd\":";
    emit_lstm_spec(out, m.bi_bwd);
    out << ",\"dense\":[";
    for (std::size_t l = 0; l < m.dense.size(); ++l) {
        if (l) out << ',';
        out << "{\"in_dim\":" << m.dense[l].in_dim << ",\"out_dim\":" << m.dense[l].out_dim
            << ",\"activation\":\"" << act_name(m.dense[l].act) << "\"}";
    }
    out << "]}";

    out << ",\"parameters\":{\"lstm1\":";
    emit_lstm(out, m.lstm1);
    out << ",\"bi_fwd\":";
    emit_lstm(out, m.bi_fwd);
    out << ",\"bi_bwd\":";
    emit_lstm(out, m.bi_bwd);
    out << ",\"dense\":[";
    for (std::size_t l = 0; l < m.dense.size(); ++l) {
        if (l) out << ',';
        out << "{\"w\":";
        emit_doubles(out, m.dense[l].w.data);
        out << ",\"b\":";
        emit_doubles(out, m.dense[l].b);
        out << '}';
    }
    out << "]}";

    out << ",\"scaler\":{\"min\":" << fmt_double(m.scaler.min)
        << ",\"max\":" << fmt_double(m.scaler.max) << '}';

    const auto& c = m.train_config;
    out << ",\"train_config\":{\"epochs\":" << c.epochs << ",\"batch_size\":" << c.batch_size
        << ",\"learning_rate\":" << fmt_double(c.learning_rate) << ",\"seed\":" << c.seed
        << ",\"ph_minutes\":" << c.ph_minutes << ",\"window_len\":" << c.window_len
        << ",\"phase\":\"" << training::phase_name(c.phase) << "\"}";

    out << ",\"parent_checkpoint_hash\":\"" << json_escape(m.parent_checkpoint_hash) << "\"";
    out << "}\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open checkpoint for writing: " + path);
    f << out.str();
    if (!f) throw ConfigError("checkpoint write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open checkpoint: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const std::exception& e) {
        throw InputError("checkpoint " + path + ": " + e.what());
    }

    try {
        const auto version = j.at("format_version").get<int>();
        if (version != 1) {
            throw InputError("checkpoint " + path + ": unsupported format_version " +
                             std::to_string(version));
        }

        Model m;
        m.window_len = j.at("L").get<std::size_t>();
        if (m.window_len == 0) throw ShapeError("checkpoint: L must be positive");

        const json& spec = j.at("layer_spec");
        const json& params = j.at("parameters");
        m.lstm1 = read_lstm(spec.at("lstm1"), params.at("lstm1"), 1, kLstmHidden, "lstm1");
        m.bi_fwd =
            read_lstm(spec.at("bi_fwd"), params.at("bi_fwd"), kLstmHidden, kLstmHidden, "bi_fwd");
        m.bi_bwd =
            read_lstm(spec.at("bi_bwd"), params.at("bi_bwd"), kLstmHidden, kLstmHidden, "bi_bwd");

        const json& dense_spec = spec.at("dense");
        const json& dense_params = params.at("dense");
        const std::size_t want_in[] = {kBiOutWidth, 8, 64, 8};
        const std::size_t want_out[] = {8, 64, 8, 1};
        if (dense_spec.size() != 4 || dense_params.size() != 4) {
            throw ShapeError("checkpoint: dense head must have 4 layers (8, 64, 8, 1 units), got " +
                             std::to_string(dense_spec.size()));
        }
        for (std::size_t l = 0; l < 4; ++l) {
            const auto in_dim = dense_spec[l].at("in_dim").get<std::size_t>();
            const auto out_dim = dense_spec[l].at("out_dim").get<std::size_t>();
            if (in_dim != want_in[l] || out_dim != want_out[l]) {
                throw ShapeError("checkpoint: dense layer " + std::to_string(l) + " must be " +
                                 std::to_string(want_in[l]) + "->" + std::to_string(want_out[l]) +
                                 ", got " + std::to_string(in_dim) + "->" +
                                 std::to_string(out_dim));
            }
            DenseParams d = make_dense(in_dim, out_dim,
                                       act_from_name(dense_spec[l].at("activation").get<std::string>()));
            const Activation want_act = l == 3 ? Activation::linear : Activation::relu;
            if (d.act != want_act) {
                throw ShapeError("checkpoint: dense layer " + std::to_string(l) + " must use " +
                                 std::string(act_name(want_act)) + " activation");
            }
            d.w.data = read_doubles(dense_params[l].at("w"), in_dim * out_dim,
                                    "dense[" + std::to_string(l) + "].w");
            d.b = read_doubles(dense_params[l].at("b"), out_dim,
                               "dense[" + std::to_string(l) + "].b");
            m.dense.push_back(std::move(d));
        }

        m.scaler.min = j.at("scaler").at("min").get<double>();
        m.scaler.max = j.at("scaler").at("max").get<double>();
        if (!(m.scaler.max > m.scaler.min)) {
            throw InputError("checkpoint: scaler must have max > min");
        }

        const json& tc = j.at("train_config");
        m.train_config.epochs = tc.at("epochs").get<std::size_t>();
        m.train_config.batch_size = tc.at("batch_size").get<std::size_t>();
        m.train_config.learning_rate = tc.at("learning_rate").get<double>();
        m.train_config.seed = tc.at("seed").get<std::uint64_t>();
        m.train_config.ph_minutes = tc.at("ph_minutes").get<std::size_t>();
        m.train_config.window_len = tc.at("window_len").get<std::size_t>();
        m.train_config.phase = training::phase_from_name(tc.at("phase").get<std::string>());
        m.train_config.validate();

        m.parent_checkpoint_hash = j.at("parent_checkpoint_hash").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw InputError("checkpoint " + path + ": " + e.what());
    }
}

std::string checkpoint_hash(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open checkpoint: " + path);
    std::uint64_t h = 14695981039346656037ULL;  // FNV offset basis
    char buf[4096];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
        const std::streamsize n = f.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;  // FNV prime
        }
        if (!f) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace glucast::network
