#include "gclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gclust {

namespace {

int cluster_count(const std::vector<int>& ids) {
    int k = 0;
    for (int id : ids) {
        if (id < 0) throw std::invalid_argument("partition: negative cluster id");
        k = std::max(k, id + 1);
    }
    return k;
}

// Contingency table n_ij plus marginals for a pair of labelings.
struct Contingency {
    int n = 0;
    std::vector<double> joint;  // ka×kb, row-major
    std::vector<double> row;    // ka
    std::vector<double> col;    // kb
    int ka = 0, kb = 0;

    Contingency(const std::vector<int>& a, const std::vector<int>& b) {
        if (a.size() != b.size())
            throw std::invalid_argument("contingency: label vectors differ in length");
        if (a.empty()) throw std::invalid_argument("contingency: empty labeling");
        n = static_cast<int>(a.size());
        ka = cluster_count(a);
        kb = cluster_count(b);
        joint.assign(static_cast<std::size_t>(ka) * kb, 0.0);
        row.assign(ka, 0.0);
        col.assign(kb, 0.0);
        for (int i = 0; i < n; ++i) {
            joint[static_cast<std::size_t>(a[i]) * kb + b[i]] += 1.0;
            row[a[i]] += 1.0;
            col[b[i]] += 1.0;
        }
    }
};

double entropy_nats(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts) {
        if (c <= 0.0) continue;
        const double p = c / n;
        h -= p * std::log(p);
    }
    return h;
}

double pairs_of(double c) { return c * (c - 1.0) / 2.0; }

}  // namespace

HardPartition hard_partition(const Matrix& c) {
    HardPartition p(static_cast<std::size_t>(c.rows));
    for (int i = 0; i < c.rows; ++i) {
        const double* row = c[i];
        int best = 0;
        for (int j = 1; j < c.cols; ++j)
            if (row[j] > row[best]) best = j;
        p[i] = best;
    }
    return p;
}

double conductance(const HardPartition& p, const SparseGraph& g) {
    if (static_cast<int>(p.size()) != g.n)
        throw std::invalid_argument("conductance: partition length != node count");
    if (g.edge_count == 0) throw std::invalid_argument("conductance: graph has no edges");
    const int k = cluster_count(p);
    const double two_m = g.volume();

    std::vector<double> cut(k, 0.0), vol(k, 0.0);
    std::vector<bool> seen(k, false);
    for (int u = 0; u < g.n; ++u) {
        const int cu = p[u];
        seen[cu] = true;
        vol[cu] += g.degree[u];
        for (int idx = g.row_offsets[u]; idx < g.row_offsets[u + 1]; ++idx)
            if (p[g.col_indices[idx]] != cu) cut[cu] += 1.0;
    }

    double sum = 0.0;
    int nonempty = 0;
    for (int s = 0; s < k; ++s) {
        if (!seen[s]) continue;
        ++nonempty;
        sum += cut[s] / std::max(1e-12, std::min(vol[s], two_m - vol[s]));
    }
    return 100.0 * sum / nonempty;
}

double modularity_q(const HardPartition& p, const SparseGraph& g) {
    if (static_cast<int>(p.size()) != g.n)
        throw std::invalid_argument("modularity_q: partition length != node count");
    if (g.edge_count == 0) throw std::invalid_argument("modularity_q: graph has no edges");
    const int k = cluster_count(p);
    const double two_m = g.volume();

    // Σ_S [2 e_in(S) - vol(S)²/2m]: 2 e_in via directed same-cluster adjacency.
    std::vector<double> internal(k, 0.0), vol(k, 0.0);
    for (int u = 0; u < g.n; ++u) {
        const int cu = p[u];
        vol[cu] += g.degree[u];
        for (int idx = g.row_offsets[u]; idx < g.row_offsets[u + 1]; ++idx)
            if (p[g.col_indices[idx]] == cu) internal[cu] += 1.0;
    }
    double q = 0.0;
    for (int s = 0; s < k; ++s) q += internal[s] - vol[s] * vol[s] / two_m;
    return 100.0 * q / two_m;
}

double nmi(const std::vector<int>& labels, const HardPartition& pred) {
    const Contingency ct(labels, pred);
    const double n = static_cast<double>(ct.n);
    const double hu = entropy_nats(ct.row, n);
    const double hv = entropy_nats(ct.col, n);
    const double denom = 0.5 * (hu + hv);
    // Both partitions constant: identical up to relabeling.
    if (denom == 0.0) return 100.0;

    double mi = 0.0;
    for (int i = 0; i < ct.ka; ++i) {
        for (int j = 0; j < ct.kb; ++j) {
            const double nij = ct.joint[static_cast<std::size_t>(i) * ct.kb + j];
            if (nij <= 0.0) continue;
            mi += (nij / n) * std::log(n * nij / (ct.row[i] * ct.col[j]));
        }
    }
    return 100.0 * mi / denom;
}

double pairwise_f1(const std::vector<int>& labels, const HardPartition& pred) {
    const Contingency ct(labels, pred);
    double tp = 0.0;
    for (double nij : ct.joint) tp += pairs_of(nij);
    double actual_pos = 0.0;  // same-label pairs
    for (double c : ct.row) actual_pos += pairs_of(c);
    double predicted_pos = 0.0;  // same-cluster pairs
    for (double c : ct.col) predicted_pos += pairs_of(c);

    const double precision = predicted_pos > 0.0 ? tp / predicted_pos : 0.0;
    const double recall = actual_pos > 0.0 ? tp / actual_pos : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 200.0 * precision * recall / (precision + recall);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("regularized_incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    // Continued fraction (modified Lentz); converges fastest for
    // x <= (a+1)/(a+b+2), otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    // Strictly greater-than: at the exact crossover both sides satisfy >=,
    // and recursing there would bounce between (a,b,x) and (b,a,1-x) forever.
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);

    // Modified Lentz evaluation of 1/(1 + e1/(1 + e2/(1 + ...))) with the
    // classic alternating even/odd coefficients.
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    auto clamp = [](double v) { return std::abs(v) < tiny ? tiny : v; };

    double c = 1.0;
    double d = 1.0 / clamp(1.0 - (a + b) * x / (a + 1.0));  // folds in the first odd term
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double coef = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 / clamp(1.0 + coef * d);
        c = clamp(1.0 + coef / c);
        h *= d * c;
        coef = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 / clamp(1.0 + coef * d);
        c = clamp(1.0 + coef / c);
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return front * h / a;
}

double student_t_two_tailed_p(double t, int df) {
    if (df < 1) throw std::invalid_argument("student_t_two_tailed_p: df must be >= 1");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired_ttest: unequal lengths");
    const int n = static_cast<int>(a.size());
    if (n < 2) throw std::invalid_argument("paired_ttest: need at least 2 pairs");

    std::vector<double> diff(a.size());
    for (int i = 0; i < n; ++i) diff[i] = a[i] - b[i];
    double mean = 0.0;
    for (double d : diff) mean += d;
    mean /= n;
    double ss = 0.0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / (n - 1));

    TTestResult r;
    if (sd == 0.0) {
        if (mean == 0.0) return {0.0, 1.0};
        const double inf = std::numeric_limits<double>::infinity();
        return {mean > 0.0 ? inf : -inf, 0.0};
    }
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = student_t_two_tailed_p(r.t, n - 1);
    return r;
}

MetricsReport compute_metrics(const HardPartition& p, const SparseGraph& g,
                              const std::vector<int>* labels) {
    MetricsReport rep;
    rep.conductance = conductance(p, g);
    rep.modularity_q = modularity_q(p, g);
    if (labels != nullptr) {
        rep.nmi = nmi(*labels, p);
        rep.f1 = pairwise_f1(*labels, p);
    } else {
        rep.nmi = std::numeric_limits<double>::quiet_NaN();
        rep.f1 = std::numeric_limits<double>::quiet_NaN();
    }
    rep.cluster_sizes.assign(cluster_count(p), 0);
    for (int id : p) ++rep.cluster_sizes[id];
    return rep;
}

}  // namespace gclust
