#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gclust/matrix.hpp"

namespace gclust {

// Undirected graph in CSR form.
//
// Invariants maintained by build_graph:
//   - adjacency is symmetric: (u,v) stored iff (v,u) stored;
//   - neighbor lists are sorted and duplicate-free, no self-loops;
//   - degree[v] == number of stored neighbors of v;
//   - sum(degree) == 2 * edge_count exactly.
//
// The modularity null model B = A - d*d^T/(2m) is never materialized; the
// degree vector and total volume here are what the objective and metrics
// modules consume instead.
struct SparseGraph {
    int n = 0;
    std::vector<int> row_offsets;   // size n+1
    std::vector<int> col_indices;   // size 2*edge_count
    std::vector<double> degree;     // size n
    std::int64_t edge_count = 0;    // number of undirected edges (m)

    double volume() const { return 2.0 * static_cast<double>(edge_count); }  // 2m
};

// Symmetrically normalized adjacency D^{-1/2} A D^{-1/2}: the same CSR pattern
// as the graph it came from with value 1/sqrt(d_u * d_v) per stored edge.
// Rows of isolated nodes are empty. No self-loop augmentation.
struct NormalizedAdjacency {
    int n = 0;
    std::vector<int> row_offsets;
    std::vector<int> col_indices;
    std::vector<double> values;
};

// Builds the CSR graph from an edge list. Duplicate edges and both
// orientations collapse to a single undirected edge. Throws
// std::invalid_argument on endpoints outside [0,n) or self-loops.
SparseGraph build_graph(int n, const std::vector<std::pair<int, int>>& edges);

NormalizedAdjacency normalize_adjacency(const SparseGraph& g);

// Sparse-dense product: normalized adjacency (n×n) times m (n×c).
Matrix spmm(const NormalizedAdjacency& adj, const Matrix& m);

// Plain adjacency product A·m for the modularity term (all edge weights 1).
Matrix adjacency_multiply(const SparseGraph& g, const Matrix& m);

}  // namespace gclust
