#include "gclust/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gclust {

SparseGraph build_graph(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 0) throw std::invalid_argument("build_graph: negative node count");

    // Canonicalize to (min,max), reject bad endpoints, then dedup.
    std::vector<std::pair<int, int>> canon;
    canon.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("build_graph: endpoint out of range: (" +
                                        std::to_string(u) + "," + std::to_string(v) + ")");
        if (u == v)
            throw std::invalid_argument("build_graph: self-loop at node " + std::to_string(u));
        canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    SparseGraph g;
    g.n = n;
    g.edge_count = static_cast<std::int64_t>(canon.size());
    g.degree.assign(n, 0.0);

    std::vector<int> counts(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& [u, v] : canon) {
        ++counts[u + 1];
        ++counts[v + 1];
    }
    g.row_offsets.assign(counts.begin(), counts.end());
    for (int i = 0; i < n; ++i) g.row_offsets[i + 1] += g.row_offsets[i];

    g.col_indices.assign(2 * canon.size(), 0);
    std::vector<int> cursor(g.row_offsets.begin(), g.row_offsets.end() - 1);
    for (const auto& [u, v] : canon) {
        g.col_indices[cursor[u]++] = v;
        g.col_indices[cursor[v]++] = u;
    }
    for (int v = 0; v < n; ++v) {
        std::sort(g.col_indices.begin() + g.row_offsets[v],
                  g.col_indices.begin() + g.row_offsets[v + 1]);
        g.degree[v] = static_cast<double>(g.row_offsets[v + 1] - g.row_offsets[v]);
    }
    return g;
}

NormalizedAdjacency normalize_adjacency(const SparseGraph& g) {
    NormalizedAdjacency adj;
    adj.n = g.n;
    adj.row_offsets = g.row_offsets;
    adj.col_indices = g.col_indices;
    adj.values.resize(g.col_indices.size());
    for (int u = 0; u < g.n; ++u) {
        for (int idx = g.row_offsets[u]; idx < g.row_offsets[u + 1]; ++idx) {
            const int v = adj.col_indices[idx];
            adj.values[idx] = 1.0 / std::sqrt(g.degree[u] * g.degree[v]);
        }
    }
    return adj;
}

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& m) {
    if (m.rows != adj.n) throw std::invalid_argument("spmm: row count does not match graph");
    Matrix out(adj.n, m.cols);
    for (int u = 0; u < adj.n; ++u) {
        double* orow = out[u];
        for (int idx = adj.row_offsets[u]; idx < adj.row_offsets[u + 1]; ++idx) {
            const double w = adj.values[idx];
            const double* mrow = m[adj.col_indices[idx]];
            for (int j = 0; j < m.cols; ++j) orow[j] += w * mrow[j];
        }
    }
    return out;
}

Matrix adjacency_multiply(const SparseGraph& g, const Matrix& m) {
    if (m.rows != g.n) throw std::invalid_argument("adjacency_multiply: row count does not match graph");
    Matrix out(g.n, m.cols);
    for (int u = 0; u < g.n; ++u) {
        double* orow = out[u];
        for (int idx = g.row_offsets[u]; idx < g.row_offsets[u + 1]; ++idx) {
            const double* mrow = m[g.col_indices[idx]];
            for (int j = 0; j < m.cols; ++j) orow[j] += mrow[j];
        }
    }
    return out;
}

}  // namespace gclust
