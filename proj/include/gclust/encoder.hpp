#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gclust/graph.hpp"
#include "gclust/matrix.hpp"

namespace gclust {

// One-layer graph-convolution encoder with a linear pooling head:
//
//   Z1 = (Ã X) W_enc + b_enc      (n×h)
//   H  = selu(Z1)                 (n×h), optionally dropout-masked in training
//   L  = H W_pool + b_pool        (n×k)
//   C  = row_softmax(L)           (n×k), row-stochastic soft assignments
//
// SELU is the activation; the pooling head is a plain linear layer. Softmax
// subtracts the per-row max so 1000-epoch runs with large logits stay finite.
struct ModelParams {
    int feature_dim = 0;  // F
    int hidden = 0;       // h
    int k = 0;            // cluster count
    Matrix w_enc;              // F×h
    std::vector<double> b_enc; // h
    Matrix w_pool;             // h×k
    std::vector<double> b_pool; // k
};

// Intermediates kept for the hand-written backward pass.
struct ForwardCache {
    Matrix z1;      // pre-activation, n×h
    Matrix hidden;  // post-activation (and post-dropout when masked), n×h
    Matrix logits;  // n×k
    Matrix c;       // soft assignments, n×k
};

constexpr double kSeluLambda = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

inline double selu(double x) {
    return x > 0.0 ? kSeluLambda * x : kSeluLambda * (kSeluAlpha * std::exp(x) - kSeluAlpha);
}

// Derivative with respect to the pre-activation.
inline double selu_grad(double x) {
    return x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
}

// Glorot-uniform weights (±sqrt(6/(fan_in+fan_out))), zero biases.
// Bit-reproducible for a fixed seed.
ModelParams init_params(std::uint64_t seed, int feature_dim, int hidden, int k);

// Row-wise softmax with per-row max subtraction.
Matrix row_softmax(const Matrix& logits);

// Full forward pass. Throws std::runtime_error if the output is non-finite
// (exploding parameters). Pure in (params, adj, x).
ForwardCache forward(const ModelParams& params, const NormalizedAdjacency& adj, const Matrix& x);

// Forward pass over the precomputed product mixed = spmm(adj, x). The product
// is parameter-independent, so training hoists it out of the epoch loop;
// forward(params, adj, x) == forward_mixed(params, spmm(adj, x)).
//
// dropout_mask, when non-null, is an n×h matrix multiplied elementwise into
// the hidden layer (inverted-dropout scaling baked into the mask). Off by
// default; evaluation always runs unmasked.
ForwardCache forward_mixed(const ModelParams& params, const Matrix& mixed,
                           const Matrix* dropout_mask = nullptr);

}  // namespace gclust
