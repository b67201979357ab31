#include "gclust/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gclust/rng.hpp"

namespace gclust {

CentroidDistances centroid_diagnostics(const Matrix& c, const Matrix& x) {
    if (c.rows != x.rows)
        throw std::invalid_argument("centroid_diagnostics: C and X row counts differ");
    const int k = c.cols;
    const int f = x.cols;
    constexpr double kMinMass = 1e-12;

    const std::vector<double> mass = column_sums(c);
    std::vector<int> live;
    for (int i = 0; i < k; ++i)
        if (mass[i] >= kMinMass) live.push_back(i);
    if (live.size() < 2)
        throw std::invalid_argument("centroid_diagnostics: fewer than two non-empty clusters");

    Matrix mu = matmul_tn(c, x);
    for (int i : live) {
        double* row = mu[i];
        for (int j = 0; j < f; ++j) row[j] /= mass[i];
    }

    double sum = 0.0;
    double min_dist = std::numeric_limits<double>::infinity();
    int pairs = 0;
    for (std::size_t a = 0; a < live.size(); ++a) {
        for (std::size_t b = a + 1; b < live.size(); ++b) {
            double dist_sq = 0.0;
            for (int j = 0; j < f; ++j) {
                const double diff = mu[live[a]][j] - mu[live[b]][j];
                dist_sq += diff * diff;
            }
            const double dist = std::sqrt(dist_sq);
            sum += dist;
            min_dist = std::min(min_dist, dist);
            ++pairs;
        }
    }
    return {sum / pairs, min_dist};
}

double intra_cluster_variance(const HardPartition& p, const Matrix& x) {
    if (static_cast<int>(p.size()) != x.rows)
        throw std::invalid_argument("intra_cluster_variance: partition length != feature rows");
    if (p.empty()) throw std::invalid_argument("intra_cluster_variance: empty partition");
    const int f = x.cols;
    int k = 0;
    for (int id : p) k = std::max(k, id + 1);

    std::vector<double> count(k, 0.0);
    Matrix sums(k, f), sq_sums(k, f);
    for (int v = 0; v < x.rows; ++v) {
        const int s = p[v];
        count[s] += 1.0;
        const double* row = x[v];
        for (int j = 0; j < f; ++j) {
            sums[s][j] += row[j];
            sq_sums[s][j] += row[j] * row[j];
        }
    }

    double total = 0.0;
    int nonempty = 0;
    for (int s = 0; s < k; ++s) {
        if (count[s] == 0.0) continue;
        ++nonempty;
        double var_sum = 0.0;
        for (int j = 0; j < f; ++j) {
            const double mean = sums[s][j] / count[s];
            // E[x²] - mean² can drift negative by rounding; clamp at 0.
            var_sum += std::max(0.0, sq_sums[s][j] / count[s] - mean * mean);
        }
        total += var_sum / f;
    }
    return total / nonempty;
}

double silhouette(const HardPartition& p, const Matrix& x, int sample_cap, std::uint64_t seed) {
    if (static_cast<int>(p.size()) != x.rows)
        throw std::invalid_argument("silhouette: partition length != feature rows");
    if (sample_cap < 2) throw std::invalid_argument("silhouette: sample_cap must be >= 2");
    const int n = x.rows;
    const int f = x.cols;
    int k = 0;
    for (int id : p) k = std::max(k, id + 1);

    // Node set to evaluate: everything, or a seeded uniform subsample.
    std::vector<int> nodes(static_cast<std::size_t>(n));
    std::iota(nodes.begin(), nodes.end(), 0);
    if (n > sample_cap) {
        std::mt19937_64 eng(seed);
        for (int i = 0; i < sample_cap; ++i) {
            const int j = i + static_cast<int>(next_uniform(eng) * (n - i));
            std::swap(nodes[i], nodes[j]);
        }
        nodes.resize(sample_cap);
        std::sort(nodes.begin(), nodes.end());
    }
    const int ns = static_cast<int>(nodes.size());

    std::vector<int> cluster_sizes(k, 0);
    for (int v : nodes) ++cluster_sizes[p[v]];
    int nonempty = 0;
    for (int s = 0; s < k; ++s) nonempty += cluster_sizes[s] > 0 ? 1 : 0;
    if (nonempty < 2) throw std::invalid_argument("silhouette: fewer than two non-empty clusters");

    double total = 0.0;
    std::vector<double> dist_sum(k);
    for (int a = 0; a < ns; ++a) {
        const int v = nodes[a];
        const int cv = p[v];
        if (cluster_sizes[cv] < 2) continue;  // singleton scores 0: skip from the sum

        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        const double* xv = x[v];
        for (int b = 0; b < ns; ++b) {
            if (b == a) continue;
            const int u = nodes[b];
            const double* xu = x[u];
            double d_sq = 0.0;
            for (int j = 0; j < f; ++j) {
                const double diff = xv[j] - xu[j];
                d_sq += diff * diff;
            }
            dist_sum[p[u]] += std::sqrt(d_sq);
        }

        const double a_val = dist_sum[cv] / (cluster_sizes[cv] - 1);
        double b_val = std::numeric_limits<double>::infinity();
        for (int s = 0; s < k; ++s) {
            if (s == cv || cluster_sizes[s] == 0) continue;
            b_val = std::min(b_val, dist_sum[s] / cluster_sizes[s]);
        }
        const double denom = std::max(a_val, b_val);
        if (denom > 0.0) total += (b_val - a_val) / denom;
    }
    return total / ns;
}

FeatureRichness feature_richness(const Matrix& x) {
    if (x.rows == 0) throw std::invalid_argument("feature_richness: empty matrix");
    FeatureRichness out;
    double total = 0.0;
    int counted = 0;
    for (int v = 0; v < x.rows; ++v) {
        const double* row = x[v];
        double sum = 0.0;
        for (int j = 0; j < x.cols; ++j) {
            if (row[j] < 0.0)
                throw std::invalid_argument("feature_richness: negative feature entry");
            sum += row[j];
        }
        if (sum == 0.0) {
            ++out.skipped_rows;
            continue;
        }
        double h = 0.0;
        for (int j = 0; j < x.cols; ++j) {
            if (row[j] == 0.0) continue;
            const double p = row[j] / sum;
            h -= p * std::log2(p);
        }
        total += h;
        ++counted;
    }
    if (counted == 0) throw std::invalid_argument("feature_richness: every row sums to zero");
    out.mean_bits = total / counted;
    return out;
}

DiversityReport compute_diversity(const Matrix& c, const HardPartition& p, const Matrix& x,
                                  int sample_cap, std::uint64_t seed) {
    DiversityReport rep;
    const CentroidDistances cd = centroid_diagnostics(c, x);
    rep.aicd = cd.aicd;
    rep.micd = cd.micd;
    rep.aicv = intra_cluster_variance(p, x);
    rep.silhouette = silhouette(p, x, sample_cap, seed);
    return rep;
}

}  // namespace gclust
