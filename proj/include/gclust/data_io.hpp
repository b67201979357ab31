#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gclust/diversity.hpp"
#include "gclust/graph.hpp"
#include "gclust/matrix.hpp"
#include "gclust/metrics.hpp"
#include "gclust/objective.hpp"

namespace gclust {

// An attributed graph with optional ground-truth communities.
// Invariants: features.rows == graph.n; labels, when present, has length n
// with ids dense in [0, number of classes).
struct Dataset {
    std::string name;
    SparseGraph graph;
    Matrix features;
    std::vector<int> labels;  // empty when the dataset is unlabeled

    bool has_labels() const { return !labels.empty(); }
};

// Directory format (plain text, one dataset per directory):
//   edges.tsv    one undirected edge per line: "u<TAB>v", 0-based node ids
//   features.tsv one node per line, TAB-separated decimal feature values
//   labels.tsv   optional, one class id per line (any non-negative integers;
//                remapped to dense ids in ascending value order)
// Node count and feature dimension come from features.tsv.
Dataset load_dataset(const std::string& dir);

// Inverse of load_dataset. Features are written with 17 significant digits, so
// a save/load round trip is bit-exact for 64-bit values. Creates the directory
// if needed.
void save_dataset(const Dataset& ds, const std::string& dir);

// Stochastic block model with Gaussian node features: every intra-block node
// pair is edged independently with probability p_in, inter-block with p_out;
// node features are the block's mean vector (mean_sep times an axis-aligned
// unit vector, axis = block index mod feature_dim) plus N(0, noise_sd²) noise.
// Labels are block ids. Bit-reproducible for a fixed seed.
struct SbmSpec {
    std::vector<int> block_sizes;
    double p_in = 0.3;
    double p_out = 0.01;
    int feature_dim = 16;
    double mean_sep = 2.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
};

Dataset generate_sbm(const SbmSpec& spec);

// One evaluated training run: everything a results table row needs.
struct ResultRow {
    std::uint64_t seed = 0;
    std::string method;
    MetricsReport metrics;
    DiversityReport diversity;
    int k = 0;
    int epochs = 0;
    int hidden = 0;
    double lr = 0.0;
    LossConfig loss;
};

// Writes three files derived from `path` (e.g. out/results.csv):
//   results.csv         header + one row per run, metrics at 2 decimals
//   results.full.csv    same rows at full (%.17g) precision
//   results.summary.csv mean and sample-std per metric column
void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);

// Generic CSV read-back (header + string cells) for the significance-test
// command, which joins two results files by their seed columns.
struct ResultsTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;  // -1 when absent
    std::vector<double> column_as_doubles(const std::string& name) const;
};

ResultsTable read_results_csv(const std::string& path);

}  // namespace gclust
