#include "gclust/objective.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace gclust {

TermValue modularity_loss(const Matrix& c, const SparseGraph& g) {
    if (c.rows != g.n) throw std::invalid_argument("modularity_loss: C rows != node count");
    if (g.edge_count == 0) throw std::invalid_argument("modularity_loss: graph has no edges");
    const double two_m = g.volume();

    // Tr(CᵀAC) = Σ_vk C_vk (AC)_vk and ‖dᵀC‖² from the degree-weighted column sums.
    const Matrix ac = adjacency_multiply(g, c);
    double trace_ac = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) trace_ac += c.data[i] * ac.data[i];

    std::vector<double> dtc(static_cast<std::size_t>(c.cols), 0.0);
    for (int v = 0; v < c.rows; ++v) {
        const double dv = g.degree[v];
        const double* crow = c[v];
        for (int j = 0; j < c.cols; ++j) dtc[j] += dv * crow[j];
    }
    double dtc_sq = 0.0;
    for (double s : dtc) dtc_sq += s * s;

    TermValue out;
    out.value = -(trace_ac - dtc_sq / two_m) / two_m;

    // d/dC of Tr(CᵀAC) is 2AC (A symmetric); of ‖dᵀC‖² is 2 d (dᵀC).
    out.grad_c = Matrix(c.rows, c.cols);
    const double scale = -2.0 / two_m;
    for (int v = 0; v < c.rows; ++v) {
        const double dv_over_2m = g.degree[v] / two_m;
        const double* acrow = ac[v];
        double* grow = out.grad_c[v];
        for (int j = 0; j < c.cols; ++j) grow[j] = scale * (acrow[j] - dv_over_2m * dtc[j]);
    }
    return out;
}

TermValue collapse_loss(const Matrix& c) {
    const int n = c.rows;
    const int k = c.cols;
    const std::vector<double> sizes = column_sums(c);
    double norm_sq = 0.0;
    for (double s : sizes) norm_sq += s * s;
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) throw std::invalid_argument("collapse_loss: all-zero assignment matrix");

    const double sqrt_k_over_n = std::sqrt(static_cast<double>(k)) / n;
    TermValue out;
    out.value = sqrt_k_over_n * norm - 1.0;
    out.grad_c = Matrix(n, k);
    for (int v = 0; v < n; ++v) {
        double* grow = out.grad_c[v];
        for (int j = 0; j < k; ++j) grow[j] = sqrt_k_over_n * sizes[j] / norm;
    }
    return out;
}

DistanceValue distance_loss(const Matrix& c, const Matrix& x, double epsilon) {
    if (c.rows != x.rows) throw std::invalid_argument("distance_loss: C and X row counts differ");
    if (epsilon <= 0.0) throw std::invalid_argument("distance_loss: epsilon must be positive");
    const int n = c.rows;
    const int k = c.cols;
    const int f = x.cols;
    constexpr double kMinMass = 1e-12;

    DistanceValue out;
    out.grad_c = Matrix(n, k);
    out.grad_x = Matrix(n, f);

    const std::vector<double> mass = column_sums(c);
    std::vector<bool> live(k);
    int live_count = 0;
    for (int i = 0; i < k; ++i) {
        live[i] = mass[i] >= kMinMass;
        live_count += live[i] ? 1 : 0;
    }
    if (live_count < k)
        std::fprintf(stderr,
                     "warning: distance_loss: %d of %d clusters empty (mass < 1e-12); "
                     "averaging over remaining pairs\n",
                     k - live_count, k);
    if (live_count < 2) return out;  // no centroid pair to separate

    // Soft centroids: μ = diag(1/mass) CᵀX, rows of dead clusters unused.
    Matrix mu = matmul_tn(c, x);
    for (int i = 0; i < k; ++i) {
        if (!live[i]) continue;
        double* row = mu[i];
        for (int j = 0; j < f; ++j) row[j] /= mass[i];
    }

    // Hinge over ordered pairs (i,j), i≠j: each unordered pair enters twice,
    // so accumulate unordered and double.
    const double pair_norm = static_cast<double>(live_count) * (live_count - 1);
    double hinge_sum = 0.0;
    Matrix grad_mu(k, f);  // d(loss)/dμ
    for (int i = 0; i < k; ++i) {
        if (!live[i]) continue;
        for (int j = i + 1; j < k; ++j) {
            if (!live[j]) continue;
            double dist_sq = 0.0;
            for (int t = 0; t < f; ++t) {
                const double diff = mu[i][t] - mu[j][t];
                dist_sq += diff * diff;
            }
            if (dist_sq >= epsilon) continue;
            hinge_sum += 2.0 * (epsilon - dist_sq);
            // d hinge/dμ_i = -2(μ_i - μ_j), doubled again for the ordered count.
            const double coef = -4.0 / pair_norm;
            for (int t = 0; t < f; ++t) {
                const double diff = mu[i][t] - mu[j][t];
                grad_mu[i][t] += coef * diff;
                grad_mu[j][t] -= coef * diff;
            }
        }
    }
    out.value = hinge_sum / pair_norm;

    // Chain through μ_i = (CᵀX)_i / mass_i:
    //   d/dC_vi = gμ_i · (X_v - μ_i) / mass_i
    //   d/dX_v  = Σ_i (C_vi / mass_i) gμ_i
    std::vector<double> gdotmu(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        if (!live[i]) continue;
        double acc = 0.0;
        for (int t = 0; t < f; ++t) acc += grad_mu[i][t] * mu[i][t];
        gdotmu[i] = acc;
    }
    const Matrix x_dot_gmu = matmul_nt(x, grad_mu);  // n×k
    for (int v = 0; v < n; ++v) {
        const double* crow = c[v];
        double* gc = out.grad_c[v];
        double* gx = out.grad_x[v];
        for (int i = 0; i < k; ++i) {
            if (!live[i]) continue;
            gc[i] = (x_dot_gmu[v][i] - gdotmu[i]) / mass[i];
            const double w = crow[i] / mass[i];
            if (w == 0.0) continue;
            const double* gmu_row = grad_mu[i];
            for (int t = 0; t < f; ++t) gx[t] += w * gmu_row[t];
        }
    }
    return out;
}

TermValue variance_loss(const Matrix& c) {
    const int n = c.rows;
    const int k = c.cols;
    const std::vector<double> sums = column_sums(c);

    TermValue out;
    out.grad_c = Matrix(n, k);
    std::vector<double> means(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) means[j] = sums[j] / n;

    double var_total = 0.0;
    for (int v = 0; v < n; ++v) {
        const double* crow = c[v];
        for (int j = 0; j < k; ++j) {
            const double dev = crow[j] - means[j];
            var_total += dev * dev;
        }
    }
    out.value = -var_total / (static_cast<double>(k) * n);

    // The mean's own dependence on C_vi cancels exactly in the population form.
    const double scale = -2.0 / (static_cast<double>(k) * n);
    for (int v = 0; v < n; ++v) {
        const double* crow = c[v];
        double* grow = out.grad_c[v];
        for (int j = 0; j < k; ++j) grow[j] = scale * (crow[j] - means[j]);
    }
    return out;
}

TermValue entropy_loss(const Matrix& c, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("entropy_loss: delta must be positive");
    const int n = c.rows;
    TermValue out;
    out.grad_c = Matrix(n, c.cols);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double p = c.data[i];
        const double lg = std::log(p + delta);
        acc += p * lg;
        out.grad_c.data[i] = -(lg + p / (p + delta)) / n;
    }
    out.value = -acc / n;
    return out;
}

ObjectiveValue total_loss(const ForwardCache& cache, const SparseGraph& g, const Matrix& x,
                          const LossConfig& cfg) {
    if (cfg.w_dist < 0.0 || cfg.w_var < 0.0 || cfg.w_ent < 0.0)
        throw std::invalid_argument("total_loss: weights must be non-negative");
    if (cfg.w_dist > 0.0 && cfg.epsilon <= 0.0)
        throw std::invalid_argument("total_loss: epsilon must be positive when the distance term is on");
    const Matrix& c = cache.c;

    ObjectiveValue out;
    out.grad_c = Matrix(c.rows, c.cols);
    out.grad_x = Matrix(x.rows, x.cols);

    TermValue mod = modularity_loss(c, g);
    TermValue col = collapse_loss(c);
    out.breakdown.modularity_term = mod.value;
    out.breakdown.collapse_term = col.value;
    for (std::size_t i = 0; i < out.grad_c.size(); ++i)
        out.grad_c.data[i] = mod.grad_c.data[i] + col.grad_c.data[i];

    // Term values are cheap relative to the encoder and always wanted for
    // reporting; gradients only matter when the term is switched on.
    if (cfg.epsilon > 0.0) {
        DistanceValue dist = distance_loss(c, x, cfg.epsilon);
        out.breakdown.distance_term = dist.value;
        if (cfg.w_dist > 0.0) {
            for (std::size_t i = 0; i < out.grad_c.size(); ++i)
                out.grad_c.data[i] += cfg.w_dist * dist.grad_c.data[i];
            for (std::size_t i = 0; i < out.grad_x.size(); ++i)
                out.grad_x.data[i] = cfg.w_dist * dist.grad_x.data[i];
        }
    }

    TermValue var = variance_loss(c);
    out.breakdown.variance_term = var.value;
    if (cfg.w_var > 0.0)
        for (std::size_t i = 0; i < out.grad_c.size(); ++i)
            out.grad_c.data[i] += cfg.w_var * var.grad_c.data[i];

    TermValue ent = entropy_loss(c, cfg.delta);
    out.breakdown.entropy_term = ent.value;
    if (cfg.w_ent > 0.0)
        for (std::size_t i = 0; i < out.grad_c.size(); ++i)
            out.grad_c.data[i] += cfg.w_ent * ent.grad_c.data[i];

    out.breakdown.total = mod.value + col.value + cfg.w_dist * out.breakdown.distance_term +
                          cfg.w_var * var.value + cfg.w_ent * ent.value;
    return out;
}

}  // namespace gclust
