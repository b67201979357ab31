#include "gclust/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gclust/rng.hpp"

namespace gclust {

namespace {

Matrix glorot_uniform(std::mt19937_64& eng, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (double& x : w.data) x = next_uniform(eng, -bound, bound);
    return w;
}

}  // namespace

ModelParams init_params(std::uint64_t seed, int feature_dim, int hidden, int k) {
    if (feature_dim < 1 || hidden < 1 || k < 1)
        throw std::invalid_argument("init_params: dimensions must be >= 1");
    std::mt19937_64 eng(seed);
    ModelParams p;
    p.feature_dim = feature_dim;
    p.hidden = hidden;
    p.k = k;
    p.w_enc = glorot_uniform(eng, feature_dim, hidden);
    p.b_enc.assign(hidden, 0.0);
    p.w_pool = glorot_uniform(eng, hidden, k);
    p.b_pool.assign(k, 0.0);
    return p;
}

Matrix row_softmax(const Matrix& logits) {
    Matrix c(logits.rows, logits.cols);
    for (int i = 0; i < logits.rows; ++i) {
        const double* lrow = logits[i];
        double* crow = c[i];
        double mx = lrow[0];
        for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, lrow[j]);
        double sum = 0.0;
        for (int j = 0; j < logits.cols; ++j) {
            crow[j] = std::exp(lrow[j] - mx);
            sum += crow[j];
        }
        for (int j = 0; j < logits.cols; ++j) crow[j] /= sum;
    }
    return c;
}

ForwardCache forward_mixed(const ModelParams& params, const Matrix& mixed,
                           const Matrix* dropout_mask) {
    if (mixed.cols != params.feature_dim)
        throw std::invalid_argument("forward: feature dimension mismatch");

    ForwardCache cache;
    cache.z1 = matmul(mixed, params.w_enc);
    add_row_vector(cache.z1, params.b_enc);

    cache.hidden = Matrix(cache.z1.rows, cache.z1.cols);
    for (std::size_t i = 0; i < cache.z1.size(); ++i)
        cache.hidden.data[i] = selu(cache.z1.data[i]);
    if (dropout_mask != nullptr) {
        if (dropout_mask->rows != cache.hidden.rows || dropout_mask->cols != cache.hidden.cols)
            throw std::invalid_argument("forward: dropout mask shape mismatch");
        for (std::size_t i = 0; i < cache.hidden.size(); ++i)
            cache.hidden.data[i] *= dropout_mask->data[i];
    }

    cache.logits = matmul(cache.hidden, params.w_pool);
    add_row_vector(cache.logits, params.b_pool);
    cache.c = row_softmax(cache.logits);

    // NaN anywhere upstream propagates into C; one cheap scan catches it all.
    if (!all_finite(cache.c))
        throw std::runtime_error("forward: non-finite assignment matrix (exploding parameters?)");
    return cache;
}

ForwardCache forward(const ModelParams& params, const NormalizedAdjacency& adj, const Matrix& x) {
    return forward_mixed(params, spmm(adj, x));
}

}  // namespace gclust
