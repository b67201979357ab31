#pragma once

#include <vector>

#include "gclust/graph.hpp"
#include "gclust/matrix.hpp"

namespace gclust {

// Cluster id per node, in [0, k). Derived from a soft assignment matrix by
// per-row argmax with ties broken toward the lowest index; some clusters may
// end up empty.
using HardPartition = std::vector<int>;

HardPartition hard_partition(const Matrix& c);

// All four headline metrics are reported as percentages to match how results
// tables are conventionally printed: conductance, NMI, F1 in [0,100];
// modularity Q in [-50, 100].
struct MetricsReport {
    double conductance = 0.0;
    double modularity_q = 0.0;
    double nmi = 0.0;  // NaN when the dataset has no labels
    double f1 = 0.0;   // NaN when the dataset has no labels
    std::vector<int> cluster_sizes;
};

// Mean over non-empty clusters S of cut(S) / max(1e-12, min(vol(S), 2m - vol(S))),
// unweighted, ×100. Lower is better. A cluster covering every node has cut 0
// and scores 0 by the clamp convention.
double conductance(const HardPartition& p, const SparseGraph& g);

// Newman modularity of the hard partition:
// (1/2m) Σ_{u,v in same cluster} (A_uv - d_u d_v / 2m), ×100.
double modularity_q(const HardPartition& p, const SparseGraph& g);

// Normalized mutual information ×100: I(U;V) / ((H(U)+H(V))/2), natural logs,
// from the contingency table. Identical partitions (up to relabeling) score
// 100 — including the degenerate case where both entropies are zero; a
// constant prediction against varied labels scores 0.
double nmi(const std::vector<int>& labels, const HardPartition& pred);

// Pairwise F1 ×100 over unordered node pairs, where a positive pair shares a
// cluster. Computed from contingency pair counts (no O(n²) enumeration).
// F1 = 0 when precision + recall = 0.
double pairwise_f1(const std::vector<int>& labels, const HardPartition& pred);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
};

// Paired two-tailed Student t-test over per-seed metric values (pairing is by
// position; callers align the two vectors by seed). Sample (n-1) standard
// deviation; p from the regularized incomplete beta function. Degenerate
// zero-variance inputs map to the sentinels t = ±inf, p = 0 (nonzero mean
// difference) or t = 0, p = 1 (identical columns).
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

// Two-tailed p-value of a Student-t statistic with df degrees of freedom.
double student_t_two_tailed_p(double t, int df);

// I_x(a, b), evaluated with the standard continued-fraction expansion.
double regularized_incomplete_beta(double a, double b, double x);

// Convenience bundle: all four metrics plus per-cluster sizes. labels may be
// null (unlabeled dataset), in which case nmi and f1 are NaN.
MetricsReport compute_metrics(const HardPartition& p, const SparseGraph& g,
                              const std::vector<int>* labels);

}  // namespace gclust
