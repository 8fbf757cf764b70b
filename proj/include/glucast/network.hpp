#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "glucast/errors.hpp"
#include "glucast/numerics.hpp"
#include "glucast/pipeline.hpp"
#include "glucast/train_config.hpp"

namespace glucast::network {

// Gate weights act on z = [h_prev, x], so every W is H x (H + D).
struct LstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Matrix w_i, w_f, w_c, w_o;
    Vec b_i, b_f, b_c, b_o;
};

// Everything one cell step computes, kept for the backward pass.
struct LstmStepCache {
    Vec z;                 // [h_prev, x]
    Vec i, f, c_cand, o;   // gates after their activations
    Vec c_prev, c, h;
    Vec tanh_c;
};

struct LstmSequenceCache {
    std::vector<LstmStepCache> steps;
};

enum class Activation { relu, linear };

struct DenseParams {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Matrix w;  // out_dim x in_dim
    Vec b;
    Activation act = Activation::relu;
};

// LSTM(1->4, full sequence) -> Bi-LSTM(4->4 per direction, last states
// concatenated to width 8) -> dense 8-8-64-8-1 head, relu except the
// final linear unit. Inputs and predictions are in scaled units.
struct Model {
    LstmParams lstm1;
    LstmParams bi_fwd;
    LstmParams bi_bwd;
    std::vector<DenseParams> dense;
    std::size_t window_len = 12;
    pipeline::Scaler scaler;
    training::TrainConfig train_config;
    std::string parent_checkpoint_hash;  // empty when trained from scratch
};

struct LstmGrads {
    Matrix w_i, w_f, w_c, w_o;
    Vec b_i, b_f, b_c, b_o;
};

struct DenseGrads {
    Matrix w;
    Vec b;
};

struct Gradients {
    LstmGrads lstm1, bi_fwd, bi_bwd;
    std::vector<DenseGrads> dense;
};

constexpr std::size_t kLstmHidden = 4;
constexpr std::size_t kBiOutWidth = 2 * kLstmHidden;

/// One cell update from (h_prev, c_prev) on input x.
LstmStepCache lstm_cell_step(const LstmParams& p, const Vec& x, const Vec& h_prev,
                             const Vec& c_prev);

/// Runs the cell over xs from zero initial state. xs must be nonempty.
LstmSequenceCache lstm_forward(const LstmParams& p, const std::vector<Vec>& xs);

struct BiCaches {
    LstmSequenceCache fwd;
    LstmSequenceCache bwd;  // computed over xs reversed
};

/// Both directions from zero states; returns concat(last forward hidden,
/// last backward hidden). The backward direction's last state is the one
/// produced at xs[0].
Vec bilstm_forward(const LstmParams& pf, const LstmParams& pb, const std::vector<Vec>& xs,
                   BiCaches* caches = nullptr);

/// activation(W v + b); the pre-activation is exposed for backprop.
Vec dense_forward(const DenseParams& p, const Vec& v, Vec* pre_out = nullptr);

struct ForwardCache {
    std::vector<Vec> xs1;     // window samples as 1-vectors
    LstmSequenceCache lstm1;
    std::vector<Vec> seq;     // lstm1 hidden sequence, fed to both directions
    LstmSequenceCache bi_fwd;
    LstmSequenceCache bi_bwd;           // runs over seq reversed
    Vec bi_out;                         // concat of the two final hidden states
    std::vector<Vec> dense_in;          // per layer
    std::vector<Vec> dense_pre;         // per layer, before activation
    double prediction = 0.0;
};

/// Forward pass on one scaled window. Throws InputError if the window
/// length disagrees with the model.
double model_forward(const Model& m, const Vec& window, ForwardCache* cache = nullptr);

/// Accumulates d(loss)/d(parameter) into grads given
/// upstream = d(loss)/d(prediction) for the cached forward pass.
void model_backward(const Model& m, const ForwardCache& cache, double upstream,
                    Gradients& grads);

/// Glorot-uniform weights drawn from a generator seeded with cfg.seed,
/// zero biases except the forget-gate bias, which starts at 1.
Model init_model(const training::TrainConfig& cfg, const pipeline::Scaler& scaler);

Gradients zero_gradients(const Model& m);

/// Pointers to every trainable scalar, in one fixed order shared between
/// a model and its gradients. The optimiser walks these in lockstep.
std::vector<double*> parameter_views(Model& m);
std::vector<double*> parameter_views(Gradients& g);
std::size_t parameter_count(const Model& m);

/// Checkpoint IO. Files are self-describing JSON; loading validates the
/// architecture and rejects anything that does not match this network.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

/// FNV-1a 64-bit digest of the file's bytes, as 16 lower-case hex chars.
std::string checkpoint_hash(const std::string& path);

bool same_parameters(const Model& a, const Model& b);

}  // namespace glucast::network
