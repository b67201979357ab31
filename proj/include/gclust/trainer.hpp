#pragma once

#include <cstdint>
#include <vector>

#include "gclust/data_io.hpp"
#include "gclust/encoder.hpp"
#include "gclust/objective.hpp"

namespace gclust {

struct TrainConfig {
    int epochs = 1000;
    double lr = 0.001;
    std::uint64_t seed = 0;
    LossConfig loss;
    int k = 4;
    int hidden = 512;
    int record_every = 50;  // history stride, in epochs
    double dropout = 0.0;   // hidden-layer drop probability; off by default
    double clip_norm = 0.0; // global gradient-norm clip; 0 disables
};

struct ParamGrads {
    Matrix w_enc;
    std::vector<double> b_enc;
    Matrix w_pool;
    std::vector<double> b_pool;
};

// Bias-corrected Adam with β1 = 0.9, β2 = 0.999, eps = 1e-8 (eps added outside
// the square root, so the first step is ≈ -lr·g/(|g|+eps) elementwise).
struct AdamState {
    Matrix m_w_enc, v_w_enc;
    std::vector<double> m_b_enc, v_b_enc;
    Matrix m_w_pool, v_w_pool;
    std::vector<double> m_b_pool, v_b_pool;
    long step = 0;

    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    explicit AdamState(const ModelParams& p);
};

void adam_step(ModelParams& params, const ParamGrads& grads, AdamState& state, double lr);

// Reverse-mode pass from d(total)/dC down to the parameters:
//   softmax:   dL = C ⊙ (G - rowsum(G ⊙ C))
//   pool head: dW_pool = Hᵀ dL,  db_pool = colsum(dL),  dH = dL W_poolᵀ
//   activation: dZ1 = dH ⊙ selu'(Z1)   (through the dropout mask when one was used)
//   conv layer: dW_enc = (ÃX)ᵀ dZ1,  db_enc = colsum(dZ1)
// `mixed` is the same spmm(adj, x) product the forward pass consumed.
ParamGrads backward_mixed(const ForwardCache& cache, const Matrix& grad_assign,
                          const Matrix& mixed, const ModelParams& params,
                          const Matrix* dropout_mask = nullptr);

// Contract-shaped wrapper over backward_mixed. grad_features is the objective's
// d(total)/dX (distance-term contribution): features are data, not parameters,
// so nothing propagates from it — it is shape-checked and terminates here. It
// exists so finite-difference validation can exercise the full objective
// signature.
ParamGrads backward(const ForwardCache& cache, const Matrix& grad_assign,
                    const Matrix& grad_features, const NormalizedAdjacency& adj, const Matrix& x,
                    const ModelParams& params);

struct HistoryEntry {
    int epoch = 0;  // number of optimizer updates applied when recorded
    LossBreakdown loss;
    double mean_entropy = 0.0;  // mean per-node assignment entropy (nats)
};

// Entries at epoch 0 (initial parameters), every record_every updates, and the
// final parameters. Epoch indices are strictly increasing.
struct TrainHistory {
    std::vector<HistoryEntry> entries;
};

struct TrainResult {
    ModelParams params;
    Matrix assignments;  // final C, from a forward pass over the final parameters
    TrainHistory history;
};

// Full-batch training: forward, objective, hand-written backward, Adam — once
// per epoch over the whole graph. Deterministic for fixed (config, dataset).
// Throws std::runtime_error naming the epoch if the loss goes non-finite.
TrainResult train(const Dataset& ds, const TrainConfig& cfg);

}  // namespace gclust
