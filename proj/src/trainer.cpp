#include "gclust/trainer.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "gclust/rng.hpp"

namespace gclust {

namespace {

void validate(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (cfg.lr <= 0.0) throw std::invalid_argument("train: lr must be positive");
    if (cfg.k < 1) throw std::invalid_argument("train: k must be >= 1");
    if (cfg.hidden < 1) throw std::invalid_argument("train: hidden width must be >= 1");
    if (cfg.record_every < 1) throw std::invalid_argument("train: record_every must be >= 1");
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
        throw std::invalid_argument("train: dropout must be in [0,1)");
    if (cfg.loss.w_dist > 0.0 && cfg.k < 2)
        throw std::invalid_argument("train: the centroid-distance term needs k >= 2");
    if (cfg.loss.w_dist > 0.0 && cfg.loss.epsilon <= 0.0)
        throw std::invalid_argument("train: epsilon must be positive when w_dist > 0");
    if (cfg.loss.delta <= 0.0) throw std::invalid_argument("train: delta must be positive");
}

void adam_update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, double lr, double bc1, double bc2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = AdamState::kBeta1 * m[i] + (1.0 - AdamState::kBeta1) * g[i];
        v[i] = AdamState::kBeta2 * v[i] + (1.0 - AdamState::kBeta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        p[i] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::kEps);
    }
}

double squared_norm(const ParamGrads& g) {
    double acc = 0.0;
    for (double x : g.w_enc.data) acc += x * x;
    for (double x : g.b_enc) acc += x * x;
    for (double x : g.w_pool.data) acc += x * x;
    for (double x : g.b_pool) acc += x * x;
    return acc;
}

void scale_grads(ParamGrads& g, double s) {
    for (double& x : g.w_enc.data) x *= s;
    for (double& x : g.b_enc) x *= s;
    for (double& x : g.w_pool.data) x *= s;
    for (double& x : g.b_pool) x *= s;
}

// Inverted dropout: each hidden unit survives with probability 1-rate and is
// scaled by 1/(1-rate), so the masked layer keeps its expectation.
Matrix make_dropout_mask(int rows, int cols, double rate, std::mt19937_64& eng) {
    Matrix mask(rows, cols);
    const double keep = 1.0 - rate;
    const double scale = 1.0 / keep;
    for (double& x : mask.data) x = next_uniform(eng) < keep ? scale : 0.0;
    return mask;
}

}  // namespace

AdamState::AdamState(const ModelParams& p)
    : m_w_enc(p.w_enc.rows, p.w_enc.cols),
      v_w_enc(p.w_enc.rows, p.w_enc.cols),
      m_b_enc(p.b_enc.size(), 0.0),
      v_b_enc(p.b_enc.size(), 0.0),
      m_w_pool(p.w_pool.rows, p.w_pool.cols),
      v_w_pool(p.w_pool.rows, p.w_pool.cols),
      m_b_pool(p.b_pool.size(), 0.0),
      v_b_pool(p.b_pool.size(), 0.0) {}

void adam_step(ModelParams& params, const ParamGrads& grads, AdamState& state, double lr) {
    if (grads.w_enc.rows != params.w_enc.rows || grads.w_enc.cols != params.w_enc.cols ||
        grads.w_pool.rows != params.w_pool.rows || grads.w_pool.cols != params.w_pool.cols ||
        grads.b_enc.size() != params.b_enc.size() || grads.b_pool.size() != params.b_pool.size())
        throw std::invalid_argument("adam_step: gradient shapes do not match parameters");

    ++state.step;
    const double bc1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(state.step));
    adam_update(params.w_enc.data, grads.w_enc.data, state.m_w_enc.data, state.v_w_enc.data, lr,
                bc1, bc2);
    adam_update(params.b_enc, grads.b_enc, state.m_b_enc, state.v_b_enc, lr, bc1, bc2);
    adam_update(params.w_pool.data, grads.w_pool.data, state.m_w_pool.data, state.v_w_pool.data,
                lr, bc1, bc2);
    adam_update(params.b_pool, grads.b_pool, state.m_b_pool, state.v_b_pool, lr, bc1, bc2);
}

ParamGrads backward_mixed(const ForwardCache& cache, const Matrix& grad_assign,
                          const Matrix& mixed, const ModelParams& params,
                          const Matrix* dropout_mask) {
    if (grad_assign.rows != cache.c.rows || grad_assign.cols != cache.c.cols)
        throw std::invalid_argument("backward: upstream gradient shape mismatch");
    if (mixed.rows != cache.z1.rows || mixed.cols != params.feature_dim)
        throw std::invalid_argument("backward: mixed-feature shape mismatch");

    const Matrix& c = cache.c;
    const int n = c.rows;
    const int k = c.cols;

    // Softmax rows: dL_row = C_row ⊙ (G_row - <G_row, C_row>).
    Matrix d_logits(n, k);
    for (int i = 0; i < n; ++i) {
        const double* crow = c[i];
        const double* grow = grad_assign[i];
        double dot = 0.0;
        for (int j = 0; j < k; ++j) dot += grow[j] * crow[j];
        double* drow = d_logits[i];
        for (int j = 0; j < k; ++j) drow[j] = crow[j] * (grow[j] - dot);
    }

    ParamGrads grads;
    grads.w_pool = matmul_tn(cache.hidden, d_logits);
    grads.b_pool = column_sums(d_logits);

    Matrix d_hidden = matmul_nt(d_logits, params.w_pool);
    if (dropout_mask != nullptr)
        for (std::size_t i = 0; i < d_hidden.size(); ++i)
            d_hidden.data[i] *= dropout_mask->data[i];
    for (std::size_t i = 0; i < d_hidden.size(); ++i)
        d_hidden.data[i] *= selu_grad(cache.z1.data[i]);

    grads.w_enc = matmul_tn(mixed, d_hidden);
    grads.b_enc = column_sums(d_hidden);
    return grads;
}

ParamGrads backward(const ForwardCache& cache, const Matrix& grad_assign,
                    const Matrix& grad_features, const NormalizedAdjacency& adj, const Matrix& x,
                    const ModelParams& params) {
    if (grad_features.rows != x.rows || grad_features.cols != x.cols)
        throw std::invalid_argument("backward: feature gradient shape mismatch");
    return backward_mixed(cache, grad_assign, spmm(adj, x), params);
}

TrainResult train(const Dataset& ds, const TrainConfig& cfg) {
    validate(cfg);
    if (ds.graph.edge_count == 0) throw std::invalid_argument("train: dataset has no edges");

    const NormalizedAdjacency adj = normalize_adjacency(ds.graph);
    // Ã(XW) == (ÃX)W, and ÃX is parameter-free: compute it once, not per epoch.
    const Matrix mixed = spmm(adj, ds.features);

    ModelParams params = init_params(cfg.seed, ds.features.cols, cfg.hidden, cfg.k);
    AdamState state(params);
    // Distinct stream from parameter init so enabling dropout cannot silently
    // shift the initial weights.
    std::mt19937_64 dropout_eng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

    TrainHistory history;
    auto record = [&](int epoch, const LossBreakdown& loss) {
        history.entries.push_back({epoch, loss, loss.entropy_term});
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Matrix mask;
        const Matrix* mask_ptr = nullptr;
        if (cfg.dropout > 0.0) {
            mask = make_dropout_mask(ds.graph.n, cfg.hidden, cfg.dropout, dropout_eng);
            mask_ptr = &mask;
        }
        const ForwardCache cache = forward_mixed(params, mixed, mask_ptr);
        const ObjectiveValue obj = total_loss(cache, ds.graph, ds.features, cfg.loss);
        if (!std::isfinite(obj.breakdown.total))
            throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
        if (epoch % cfg.record_every == 0) record(epoch, obj.breakdown);

        ParamGrads grads = backward_mixed(cache, obj.grad_c, mixed, params, mask_ptr);
        if (cfg.clip_norm > 0.0) {
            const double norm = std::sqrt(squared_norm(grads));
            if (norm > cfg.clip_norm) scale_grads(grads, cfg.clip_norm / norm);
        }
        adam_step(params, grads, state, cfg.lr);
    }

    // Final state: evaluate the trained parameters (no dropout at evaluation).
    TrainResult result;
    const ForwardCache final_cache = forward_mixed(params, mixed);
    const ObjectiveValue final_obj = total_loss(final_cache, ds.graph, ds.features, cfg.loss);
    record(cfg.epochs, final_obj.breakdown);
    result.params = std::move(params);
    result.assignments = final_cache.c;
    result.history = std::move(history);
    return result;
}

}  // namespace gclust
