#pragma once

#include "gclust/encoder.hpp"
#include "gclust/graph.hpp"
#include "gclust/matrix.hpp"

namespace gclust {

// The clustering objective: spectral modularity relaxation + collapse
// regularization, optionally extended with three diversity-preserving
// penalties (centroid distance, assignment variance, assignment entropy).
//
//   total = modularity + collapse
//         + w_dist * distance + w_var * variance + w_ent * entropy
//
// Every term comes with its analytic gradient with respect to the soft
// assignment matrix C; the distance term additionally differentiates through
// the feature matrix (validation only — features are data, not parameters).
struct LossConfig {
    double w_dist = 0.0;
    double w_var = 0.0;
    double w_ent = 0.0;
    double epsilon = 1.0;  // minimum acceptable squared centroid distance
    double delta = 1e-8;   // log stabilizer inside the entropy term
};

// Unweighted per-term values plus the weighted total.
// Invariant: total == modularity_term + collapse_term
//                   + w_dist*distance_term + w_var*variance_term + w_ent*entropy_term.
struct LossBreakdown {
    double modularity_term = 0.0;
    double collapse_term = 0.0;
    double distance_term = 0.0;
    double variance_term = 0.0;
    double entropy_term = 0.0;
    double total = 0.0;
};

struct TermValue {
    double value = 0.0;
    Matrix grad_c;  // dvalue/dC, n×k
};

struct DistanceValue {
    double value = 0.0;
    Matrix grad_c;  // n×k
    Matrix grad_x;  // n×F
};

struct ObjectiveValue {
    LossBreakdown breakdown;
    Matrix grad_c;  // dtotal/dC
    Matrix grad_x;  // dtotal/dX (distance contribution only; zero otherwise)
};

// -(1/2m) Tr(Cᵀ B C) with B = A - d dᵀ/(2m), computed without materializing B
// via Tr(CᵀBC) = Tr(CᵀAC) - (1/2m)‖dᵀC‖². Bounded in [-1, 1]; 0 for any
// column-constant C. Throws std::invalid_argument on an edgeless graph.
TermValue modularity_loss(const Matrix& c, const SparseGraph& g);

// (√k/n)·‖s‖₂ - 1 where s is the cluster-size vector (column sums of C).
// 0 for perfectly balanced soft assignments, √k - 1 for total collapse.
// Throws std::invalid_argument if C is all zeros.
TermValue collapse_loss(const Matrix& c);

// Mean over ordered centroid pairs of hinge(epsilon - ‖μ_i - μ_j‖²), with soft
// centroids μ_i = Σ_v C_vi X_v / Σ_v C_vi. Gradient flows through both the
// numerator and denominator of μ. Clusters with mass < 1e-12 have no centroid:
// their pairs are skipped, the pair count renormalized, and a warning logged;
// fewer than two surviving clusters yields loss 0.
DistanceValue distance_loss(const Matrix& c, const Matrix& x, double epsilon);

// -(1/k) Σ_i Var(C_:i), population (1/n) variance per column. In [-1/4, 0];
// 0 when every column is constant.
TermValue variance_loss(const Matrix& c);

// -(1/n) Σ_v Σ_i C_vi ln(C_vi + delta): mean per-node Shannon entropy of the
// soft assignments (natural log). Near 0 for one-hot rows, near ln k for
// uniform rows.
TermValue entropy_loss(const Matrix& c, double delta);

// Weighted combination per LossConfig. All five term values are always
// computed (reporting needs them); gradients are accumulated only for terms
// with nonzero weight. With all three extension weights zero the total is
// exactly modularity + collapse.
ObjectiveValue total_loss(const ForwardCache& cache, const SparseGraph& g, const Matrix& x,
                          const LossConfig& cfg);

}  // namespace gclust
