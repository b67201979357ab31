#pragma once

#include <cstdint>
#include <vector>

#include "gclust/matrix.hpp"
#include "gclust/metrics.hpp"

namespace gclust {

// Geometric diagnostics of a clustering in feature space. All of them operate
// on the raw input features: aicd/micd on soft centroids, aicv/silhouette on
// the hard partition.
struct DiversityReport {
    double aicd = 0.0;        // mean pairwise Euclidean centroid distance
    double micd = 0.0;        // minimum pairwise centroid distance; micd <= aicd
    double aicv = 0.0;        // mean within-cluster per-dimension variance, >= 0
    double silhouette = 0.0;  // mean silhouette in [-1, 1]
};

struct CentroidDistances {
    double aicd = 0.0;
    double micd = 0.0;
};

// Soft centroids as in the distance loss; distances over unordered pairs of
// clusters with mass >= 1e-12. Throws std::invalid_argument with fewer than
// two such clusters.
CentroidDistances centroid_diagnostics(const Matrix& c, const Matrix& x);

// For each non-empty cluster: population variance per feature dimension,
// averaged over dimensions; returns the unweighted mean over clusters.
// Singleton clusters contribute 0.
double intra_cluster_variance(const HardPartition& p, const Matrix& x);

// Mean silhouette s(v) = (b-a)/max(a,b) with Euclidean distances; nodes in
// singleton clusters score 0 by convention. Quadratic in node count, so above
// sample_cap nodes it evaluates on a seeded uniform subsample (without
// replacement); at or below the cap the result is seed-independent. Throws
// std::invalid_argument when fewer than two clusters are non-empty.
double silhouette(const HardPartition& p, const Matrix& x, int sample_cap = 5000,
                  std::uint64_t seed = 0);

struct FeatureRichness {
    double mean_bits = 0.0;  // mean per-node Shannon entropy, log base 2
    int skipped_rows = 0;    // rows with zero feature sum (no distribution)
};

// Treats each node's feature vector as a distribution p_v = x_v / sum(x_v) and
// returns the mean entropy in bits. Requires non-negative entries; throws when
// every row sums to zero.
FeatureRichness feature_richness(const Matrix& x);

DiversityReport compute_diversity(const Matrix& c, const HardPartition& p, const Matrix& x,
                                  int sample_cap = 5000, std::uint64_t seed = 0);

}  // namespace gclust
