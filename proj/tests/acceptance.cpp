// End-to-end acceptance gate. Each numbered criterion prints exactly one
// PASS/FAIL/SKIP line; the process exits nonzero if any of criteria 1-6 fail.
// Criterion 7 needs an external dataset and is informational either way.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gclust/cli.hpp"
#include "gclust/data_io.hpp"
#include "gclust/diversity.hpp"
#include "gclust/metrics.hpp"
#include "gclust/objective.hpp"
#include "gclust/trainer.hpp"
#include "oracles.hpp"
#include "reference_runs.hpp"

namespace fs = std::filesystem;
using gclust::Dataset;
using gclust::ForwardCache;
using gclust::LossConfig;
using gclust::Matrix;
using gclust::ModelParams;
using gclust::ParamGrads;
using gclust::SparseGraph;
using gclust::TrainConfig;
using gclust::TrainResult;

namespace {

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(int index, bool pass, const std::string& detail, const char* name,
            bool gating = true) {
    const char* verdict = pass ? "PASS" : (gating ? "FAIL" : "FAIL (non-gating)");
    std::printf("[%d/7] %s %s — %s\n", index, verdict, name, detail.c_str());
    std::fflush(stdout);
}

// ---------------------------------------------------------------- criterion 1

bool criterion_gradients(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 eng(1001);
    double worst = 0.0;

    for (int instance = 0; instance < 3; ++instance) {
        const int n = 8 + static_cast<int>(gclust::next_uniform(eng) * 13);   // ≤ 20
        const int feat = 3 + static_cast<int>(gclust::next_uniform(eng) * 6); // ≤ 8
        const int h = 3 + static_cast<int>(gclust::next_uniform(eng) * 4);    // ≤ 6
        const int k = 2 + static_cast<int>(gclust::next_uniform(eng) * 3);    // ≤ 4
        const SparseGraph g = oracle::random_graph(eng, n, 0.3);
        const Matrix x = oracle::random_matrix(eng, n, feat, 0.0, 1.0);
        const Matrix mixed = gclust::spmm(gclust::normalize_adjacency(g), x);
        ModelParams params = gclust::init_params(2000 + instance, feat, h, k);
        // Move off the zero-bias point: an isolated node has an all-zero mixed
        // row, so z1 would sit exactly on the activation kink where central
        // differences disagree with the one-sided analytic derivative.
        oracle::jitter_params(eng, params);

        // each term individually, then the fully weighted composite
        struct Config {
            const char* name;
            std::function<double(const Matrix&)> value;
            std::function<Matrix(const Matrix&)> grad;
        };
        const double eps = 1.0;
        const std::vector<Config> configs = {
            {"modularity", [&](const Matrix& c) { return gclust::modularity_loss(c, g).value; },
             [&](const Matrix& c) { return gclust::modularity_loss(c, g).grad_c; }},
            {"collapse", [](const Matrix& c) { return gclust::collapse_loss(c).value; },
             [](const Matrix& c) { return gclust::collapse_loss(c).grad_c; }},
            {"distance",
             [&](const Matrix& c) { return gclust::distance_loss(c, x, eps).value; },
             [&](const Matrix& c) { return gclust::distance_loss(c, x, eps).grad_c; }},
            {"variance", [](const Matrix& c) { return gclust::variance_loss(c).value; },
             [](const Matrix& c) { return gclust::variance_loss(c).grad_c; }},
            {"entropy", [](const Matrix& c) { return gclust::entropy_loss(c, 1e-8).value; },
             [](const Matrix& c) { return gclust::entropy_loss(c, 1e-8).grad_c; }},
        };

        auto check_config = [&](const std::function<double(const Matrix&)>& value,
                                const std::function<Matrix(const Matrix&)>& grad) {
            const ForwardCache cache = gclust::forward_mixed(params, mixed);
            const ParamGrads analytic =
                gclust::backward_mixed(cache, grad(cache.c), mixed, params);
            const auto eval = [&] { return value(gclust::forward_mixed(params, mixed).c); };
            double err = 0.0;
            err = std::max(err, oracle::max_rel_err(analytic.w_enc,
                                                    oracle::fd_gradient(params.w_enc, eval)));
            err = std::max(err, oracle::max_rel_err(analytic.b_enc,
                                                    oracle::fd_gradient(params.b_enc, eval)));
            err = std::max(err, oracle::max_rel_err(analytic.w_pool,
                                                    oracle::fd_gradient(params.w_pool, eval)));
            err = std::max(err, oracle::max_rel_err(analytic.b_pool,
                                                    oracle::fd_gradient(params.b_pool, eval)));
            return err;
        };

        for (const Config& c : configs) worst = std::max(worst, check_config(c.value, c.grad));

        LossConfig composite;
        composite.w_dist = 0.6;
        composite.w_var = 0.4;
        composite.w_ent = 0.2;
        composite.epsilon = eps;
        ForwardCache probe;  // adapter: total_loss reads only .c
        worst = std::max(
            worst, check_config(
                       [&](const Matrix& c) {
                           probe.c = c;
                           return gclust::total_loss(probe, g, x, composite).breakdown.total;
                       },
                       [&](const Matrix& c) {
                           probe.c = c;
                           return gclust::total_loss(probe, g, x, composite).grad_c;
                       }));
    }

    const double secs = elapsed_s(start);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max rel err %.3g (bound 1e-4) over 3 instances × 6 losses, %.1fs (bound 10s)",
                  worst, secs);
    detail = buf;
    return worst <= 1e-4 && secs < 10.0;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_oracles(std::string& detail) {
    std::mt19937_64 eng(1002);
    double worst_metric = 0.0, worst_trace = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        const int n = 12 + static_cast<int>(gclust::next_uniform(eng) * 53);  // ≤ 64
        const int k = 2 + static_cast<int>(gclust::next_uniform(eng) * 4);
        const SparseGraph g = oracle::random_graph(eng, n, 0.15);
        const std::vector<int> part = oracle::random_partition(eng, n, k);
        const std::vector<int> labels = oracle::random_partition(eng, n, 3);
        const Matrix x = oracle::random_matrix(eng, n, 4);
        const Matrix c = oracle::random_row_stochastic(eng, n, k);

        auto track = [&worst_metric](double a, double b) {
            worst_metric = std::max(worst_metric, std::abs(a - b));
        };
        track(gclust::conductance(part, g), oracle::conductance_brute(part, g));
        track(gclust::modularity_q(part, g), oracle::modularity_q_dense(part, g));
        track(gclust::nmi(labels, part), oracle::nmi_brute(labels, part));
        track(gclust::pairwise_f1(labels, part), oracle::pairwise_f1_brute(labels, part));
        const auto [aicd, micd] = oracle::centroid_distances_brute(c, x);
        const gclust::CentroidDistances d = gclust::centroid_diagnostics(c, x);
        track(d.aicd, aicd);
        track(d.micd, micd);
        track(gclust::intra_cluster_variance(part, x), oracle::aicv_brute(part, x));
        track(gclust::silhouette(part, x), oracle::silhouette_brute(part, x));

        worst_trace = std::max(worst_trace, std::abs(gclust::modularity_loss(c, g).value -
                                                     oracle::modularity_loss_dense(c, g)));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "50 instances: max |engine−oracle| %.3g (bound 1e-10), trace identity %.3g "
                  "(bound 1e-9)",
                  worst_metric, worst_trace);
    detail = buf;
    return worst_metric <= 1e-10 && worst_trace <= 1e-9;
}

// ---------------------------------------------------------------- criterion 3

// Runs the significance-test command on two written CSVs with stdout captured,
// and parses the t statistic printed for `metric`.
bool ttest_via_cli(const std::string& csv_a, const std::string& csv_b, const std::string& metric,
                   double& t_out) {
    const std::string capture = csv_a + "." + metric + ".out";
    std::fflush(stdout);
    const int saved = dup(1);
    if (!std::freopen(capture.c_str(), "w", stdout)) {
        dup2(saved, 1);
        close(saved);
        return false;
    }
    const int rc = gclust::cmd_ttest(csv_a, csv_b, metric);
    std::fflush(stdout);
    dup2(saved, 1);
    close(saved);

    if (rc != 0) return false;
    std::FILE* f = std::fopen(capture.c_str(), "r");
    if (!f) return false;
    char name[64];
    double t = 0.0, p = 0.0;
    bool found = false;
    char line[256];
    while (std::fgets(line, sizeof(line), f)) {
        if (std::sscanf(line, "%63s %lf %lf", name, &t, &p) == 3 && metric == name) {
            t_out = t;
            found = true;
        }
    }
    std::fclose(f);
    return found;
}

std::vector<gclust::ResultRow> rows_from_table(const std::array<refruns::BenchRow, 10>& table,
                                               const char* method) {
    std::vector<gclust::ResultRow> rows;
    for (const refruns::BenchRow& b : table) {
        gclust::ResultRow r;
        r.seed = b.seed;
        r.method = method;
        r.metrics.conductance = b.conductance;
        r.metrics.modularity_q = b.modularity;
        r.metrics.nmi = b.nmi;
        r.metrics.f1 = b.f1;
        r.k = 0;
        rows.push_back(r);
    }
    return rows;
}

bool criterion_significance(std::string& detail, const fs::path& scratch) {
    const std::string base_csv = (scratch / "base.csv").string();
    const std::string ent_csv = (scratch / "ent.csv").string();
    const std::string comb_csv = (scratch / "comb.csv").string();
    gclust::write_results_csv(rows_from_table(refruns::kCoauthorBaseline, "base"), base_csv);
    gclust::write_results_csv(rows_from_table(refruns::kCoauthorEntropyReg, "ent"), ent_csv);
    gclust::write_results_csv(rows_from_table(refruns::kCoauthorCombinedReg, "comb"), comb_csv);

    double t_nmi = 0.0, t_f1 = 0.0, t_f1_comb = 0.0;
    const bool ran = ttest_via_cli(base_csv, ent_csv, "nmi", t_nmi) &&
                     ttest_via_cli(base_csv, ent_csv, "f1", t_f1) &&
                     ttest_via_cli(base_csv, comb_csv, "f1", t_f1_comb);

    const bool nmi_ok = std::abs(t_nmi - (-4.64)) <= 0.01;
    const bool f1_ok = std::abs(t_f1 - (-2.51)) <= 0.02;
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "t_nmi=%.4f (want −4.64±0.01), t_f1=%.4f (want −2.51±0.02) vs the "
                  "entropy-regularized runs; combined-runs f1 t=%.4f for reference",
                  t_nmi, t_f1, t_f1_comb);
    detail = buf;
    return ran && nmi_ok && f1_ok;
}

// ---------------------------------------------------------------- criterion 4

gclust::SbmSpec recovery_spec(double mean_sep) {
    gclust::SbmSpec spec;
    spec.block_sizes = {100, 100, 100, 100};
    spec.p_in = 0.3;
    spec.p_out = 0.01;
    spec.feature_dim = 16;
    spec.mean_sep = mean_sep;
    spec.noise_sd = 1.0;
    spec.seed = 7;
    return spec;
}

const std::vector<std::uint64_t> kSeeds = {993, 550, 243, 16, 716};

bool criterion_recovery(std::string& detail) {
    const Dataset ds = gclust::generate_sbm(recovery_spec(2.0));
    const double planted_q = gclust::modularity_q(ds.labels, ds.graph);

    int good = 0;
    double max_secs = 0.0;
    for (std::uint64_t seed : kSeeds) {
        TrainConfig cfg;
        cfg.seed = seed;
        const auto start = std::chrono::steady_clock::now();
        const TrainResult result = gclust::train(ds, cfg);
        max_secs = std::max(max_secs, elapsed_s(start));
        const gclust::HardPartition p = gclust::hard_partition(result.assignments);
        const double run_nmi = gclust::nmi(ds.labels, p);
        const double run_q = gclust::modularity_q(p, ds.graph);
        if (run_nmi >= 95.0 && std::abs(run_q - planted_q) <= 2.0) ++good;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "nmi≥95 and |Q−planted Q(%.2f)|≤2 in %d/5 seeds (need ≥4), slowest seed %.1fs "
                  "(bound 60s)",
                  planted_q, good, max_secs);
    detail = buf;
    return good >= 4 && max_secs < 60.0;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_diversity(std::string& detail) {
    const Dataset ds = gclust::generate_sbm(recovery_spec(0.5));

    int micd_wins = 0, entropy_wins = 0;
    for (std::uint64_t seed : kSeeds) {
        TrainConfig base_cfg;
        base_cfg.seed = seed;
        const TrainResult base = gclust::train(ds, base_cfg);
        const double base_micd =
            gclust::centroid_diagnostics(base.assignments, ds.features).micd;
        const double base_entropy = base.history.entries.back().mean_entropy;

        TrainConfig dist_cfg = base_cfg;
        dist_cfg.loss.w_dist = 1.0;
        dist_cfg.loss.epsilon = 1.0;
        const TrainResult dist = gclust::train(ds, dist_cfg);
        if (gclust::centroid_diagnostics(dist.assignments, ds.features).micd >= base_micd)
            ++micd_wins;

        TrainConfig ent_cfg = base_cfg;
        ent_cfg.loss.w_ent = 0.1;
        const TrainResult ent = gclust::train(ds, ent_cfg);
        if (ent.history.entries.back().mean_entropy < base_entropy) ++entropy_wins;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "centroid-separation runs keep micd ≥ baseline in %d/5 seeds, entropy-penalty "
                  "runs end sharper in %d/5 (need ≥4 each)",
                  micd_wins, entropy_wins);
    detail = buf;
    return micd_wins >= 4 && entropy_wins >= 4;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_invariants(std::string& detail) {
    std::mt19937_64 eng(1006);
    int violations = 0;
    double worst_perm = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
        const int n = 4 + static_cast<int>(gclust::next_uniform(eng) * 29);
        const int k = 2 + static_cast<int>(gclust::next_uniform(eng) * 5);
        const int feat = 2 + static_cast<int>(gclust::next_uniform(eng) * 5);
        const SparseGraph g = oracle::random_graph(eng, n, 0.15 + gclust::next_uniform(eng) * 0.35);
        const Matrix c = oracle::random_row_stochastic(eng, n, k);
        const Matrix x = oracle::random_matrix(eng, n, feat, 0.0, 1.0);
        const double eps = std::pow(10.0, gclust::next_uniform(eng, -2.0, 1.0));

        const double dist = gclust::distance_loss(c, x, eps).value;
        const double collapse = gclust::collapse_loss(c).value;
        const double variance = gclust::variance_loss(c).value;
        const double entropy = gclust::entropy_loss(c, 1e-8).value;
        const double modularity = gclust::modularity_loss(c, g).value;

        if (!(dist >= 0.0 && dist <= eps)) ++violations;
        if (!(collapse >= -1e-12 && collapse <= std::sqrt(double(k)) - 1.0 + 1e-12)) ++violations;
        if (!(variance >= -0.25 && variance <= 0.0)) ++violations;
        if (!(entropy >= -1e-6 && entropy <= std::log(double(k)) + 1e-6)) ++violations;

        // random column permutation must leave every term unchanged
        std::vector<int> perm(k);
        for (int j = 0; j < k; ++j) perm[j] = j;
        for (int j = k - 1; j > 0; --j)
            std::swap(perm[j], perm[static_cast<int>(gclust::next_uniform(eng) * (j + 1))]);
        Matrix cp(n, k);
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < k; ++j) cp[v][perm[j]] = c[v][j];
        worst_perm = std::max({worst_perm,
                               std::abs(gclust::distance_loss(cp, x, eps).value - dist),
                               std::abs(gclust::collapse_loss(cp).value - collapse),
                               std::abs(gclust::variance_loss(cp).value - variance),
                               std::abs(gclust::entropy_loss(cp, 1e-8).value - entropy),
                               std::abs(gclust::modularity_loss(cp, g).value - modularity)});
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "1000 fuzz inputs: %d bound violations, worst column-permutation drift %.3g "
                  "(bound 1e-12)",
                  violations, worst_perm);
    detail = buf;
    return violations == 0 && worst_perm <= 1e-12;
}

// ---------------------------------------------------------------- criterion 7

bool criterion_real_dataset(std::string& detail, bool& skipped) {
    std::string dir;
    if (const char* env = std::getenv("GCLUST_CORA_DIR"); env && *env) dir = env;
    else if (fs::exists("data/cora/features.tsv")) dir = "data/cora";
    else if (fs::exists("/root/proj/data/cora/features.tsv")) dir = "/root/proj/data/cora";
    if (dir.empty()) {
        skipped = true;
        detail = "no citation-graph dataset present (set GCLUST_CORA_DIR or data/cora)";
        return true;
    }
    skipped = false;

    const Dataset ds = gclust::load_dataset(dir);
    const std::vector<std::uint64_t> seeds = {993, 550, 243, 16, 716, 383, 277, 274, 188, 796};
    double mean_q = 0.0, mean_nmi = 0.0;
    for (std::uint64_t seed : seeds) {
        TrainConfig cfg;
        cfg.seed = seed;
        cfg.k = 7;
        const TrainResult result = gclust::train(ds, cfg);
        const gclust::HardPartition p = gclust::hard_partition(result.assignments);
        mean_q += gclust::modularity_q(p, ds.graph);
        mean_nmi += gclust::nmi(ds.labels, p);
    }
    mean_q /= seeds.size();
    mean_nmi /= seeds.size();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "mean Q %.2f (want 72.77±5), mean NMI %.2f (want 43.92±6)",
                  mean_q, mean_nmi);
    detail = buf;
    return std::abs(mean_q - 72.77) <= 5.0 && std::abs(mean_nmi - 43.92) <= 6.0;
}

}  // namespace

int main() {
    const fs::path scratch =
        fs::temp_directory_path() / ("gclust_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    bool all_ok = true;
    std::string detail;

    const bool c1 = criterion_gradients(detail);
    report(1, c1, detail, "gradient-correctness");
    all_ok = all_ok && c1;

    const bool c2 = criterion_oracles(detail);
    report(2, c2, detail, "metric-oracle-equivalence");
    all_ok = all_ok && c2;

    const bool c3 = criterion_significance(detail, scratch);
    report(3, c3, detail, "significance-reproduction");
    all_ok = all_ok && c3;

    const bool c4 = criterion_recovery(detail);
    report(4, c4, detail, "synthetic-recovery");
    all_ok = all_ok && c4;

    const bool c5 = criterion_diversity(detail);
    report(5, c5, detail, "diversity-mechanism");
    all_ok = all_ok && c5;

    const bool c6 = criterion_invariants(detail);
    report(6, c6, detail, "invariant-fuzz");
    all_ok = all_ok && c6;

    bool skipped = false;
    const bool c7 = criterion_real_dataset(detail, skipped);
    if (skipped)
        std::printf("[7/7] SKIP real-dataset-benchmark — %s\n", detail.c_str());
    else
        report(7, c7, detail, "real-dataset-benchmark", /*gating=*/false);

    fs::remove_all(scratch);
    std::printf("acceptance: %s\n", all_ok ? "ALL GATING CRITERIA PASS" : "GATING FAILURES");
    return all_ok ? 0 : 1;
}
