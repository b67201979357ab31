#include "gclust/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"

#include "gclust/trainer.hpp"

namespace gclust {

namespace {

constexpr int kSilhouetteSampleCap = 5000;

std::string method_label(const LossConfig& loss) {
    std::string label;
    auto append = [&label](const char* part) {
        if (!label.empty()) label += '+';
        label += part;
    };
    if (loss.w_dist > 0.0) append("dist");
    if (loss.w_var > 0.0) append("var");
    if (loss.w_ent > 0.0) append("ent");
    return label.empty() ? "base" : label;
}

Dataset resolve_dataset(const ExperimentConfig& cfg) {
    if (cfg.sbm.has_value()) return generate_sbm(*cfg.sbm);
    if (cfg.dataset_dir.empty())
        throw std::invalid_argument("no data source: pass --dataset or --sbm");
    return load_dataset(cfg.dataset_dir);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw std::invalid_argument("need at least one seed");
    if (cfg.threads < 1) throw std::invalid_argument("--threads must be >= 1");
    if (cfg.loss.w_dist > 0.0 && cfg.k < 2)
        throw std::invalid_argument("the centroid-distance term needs --k >= 2");
    std::set<std::uint64_t> uniq(cfg.seeds.begin(), cfg.seeds.end());
    if (uniq.size() != cfg.seeds.size())
        throw std::invalid_argument("duplicate seeds in --seeds");
}

struct RunOutput {
    ResultRow row;
    LossBreakdown final_loss;
};

// Trains all seeds against one dataset/loss combination. Runs are independent;
// with threads > 1 they execute on a small worker pool and land in seed order.
std::vector<RunOutput> run_seeds(const Dataset& ds, const ExperimentConfig& cfg,
                                 const LossConfig& loss) {
    const int runs = static_cast<int>(cfg.seeds.size());
    std::vector<RunOutput> outputs(runs);
    std::vector<std::exception_ptr> errors(runs);

    auto run_one = [&](int i) {
        TrainConfig tc;
        tc.epochs = cfg.epochs;
        tc.lr = cfg.lr;
        tc.seed = cfg.seeds[i];
        tc.loss = loss;
        tc.k = cfg.k;
        tc.hidden = cfg.hidden;
        tc.record_every = cfg.record_every;
        const TrainResult trained = train(ds, tc);

        const HardPartition part = hard_partition(trained.assignments);
        RunOutput out;
        out.row.seed = cfg.seeds[i];
        out.row.method = method_label(loss);
        out.row.metrics =
            compute_metrics(part, ds.graph, ds.has_labels() ? &ds.labels : nullptr);
        out.row.diversity = compute_diversity(trained.assignments, part, ds.features,
                                              kSilhouetteSampleCap, cfg.seeds[i]);
        out.row.k = cfg.k;
        out.row.epochs = cfg.epochs;
        out.row.hidden = cfg.hidden;
        out.row.lr = cfg.lr;
        out.row.loss = loss;
        out.final_loss = trained.history.entries.back().loss;
        outputs[i] = std::move(out);
    };

    const int workers = std::min<int>(cfg.threads, runs);
    if (workers <= 1) {
        for (int i = 0; i < runs; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
                    try {
                        run_one(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return outputs;
}

void print_run(const RunOutput& out) {
    const LossBreakdown& l = out.final_loss;
    const MetricsReport& m = out.row.metrics;
    std::printf(
        "seed %lu  loss total=%.6g (modularity=%.6g collapse=%.6g distance=%.6g "
        "variance=%.6g entropy=%.6g)\n",
        static_cast<unsigned long>(out.row.seed), l.total, l.modularity_term, l.collapse_term,
        l.distance_term, l.variance_term, l.entropy_term);
    std::printf(
        "          conductance=%.2f modularity=%.2f nmi=%.2f f1=%.2f | aicd=%.4f micd=%.4f "
        "aicv=%.4f silhouette=%.4f\n",
        m.conductance, m.modularity_q, m.nmi, m.f1, out.row.diversity.aicd,
        out.row.diversity.micd, out.row.diversity.aicv, out.row.diversity.silhouette);
}

struct ColumnStats {
    double mean = 0.0;
    double sd = 0.0;
};

ColumnStats stats_of(const std::vector<double>& values) {
    ColumnStats s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

const char* const kSummaryMetrics[] = {"conductance", "modularity", "nmi",  "f1",
                                       "aicd",        "micd",       "aicv", "silhouette"};

double metric_of(const ResultRow& r, const std::string& name) {
    if (name == "conductance") return r.metrics.conductance;
    if (name == "modularity") return r.metrics.modularity_q;
    if (name == "nmi") return r.metrics.nmi;
    if (name == "f1") return r.metrics.f1;
    if (name == "aicd") return r.diversity.aicd;
    if (name == "micd") return r.diversity.micd;
    if (name == "aicv") return r.diversity.aicv;
    if (name == "silhouette") return r.diversity.silhouette;
    throw std::logic_error("unknown metric " + name);
}

}  // namespace

SbmSpec parse_sbm_spec(const std::string& text) {
    SbmSpec spec;
    bool have_sizes = false;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, comma - start);
        start = comma + 1;
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--sbm: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            if (key == "sizes") {
                spec.block_sizes.clear();
                std::size_t p = 0;
                while (p <= value.size()) {
                    const std::size_t x = std::min(value.find('x', p), value.size());
                    spec.block_sizes.push_back(std::stoi(value.substr(p, x - p)));
                    p = x + 1;
                }
                have_sizes = true;
            } else if (key == "p_in") {
                spec.p_in = std::stod(value);
            } else if (key == "p_out") {
                spec.p_out = std::stod(value);
            } else if (key == "dim") {
                spec.feature_dim = std::stoi(value);
            } else if (key == "sep") {
                spec.mean_sep = std::stod(value);
            } else if (key == "noise") {
                spec.noise_sd = std::stod(value);
            } else if (key == "seed") {
                spec.seed = std::stoull(value);
            } else {
                throw std::invalid_argument("--sbm: unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("--sbm: bad value for '" + key + "': '" + value + "'");
        }
    }
    if (!have_sizes) throw std::invalid_argument("--sbm: missing sizes=");
    return spec;
}

int cmd_train(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const Dataset ds = resolve_dataset(cfg);

    const std::vector<RunOutput> outputs = run_seeds(ds, cfg, cfg.loss);
    std::vector<ResultRow> rows;
    rows.reserve(outputs.size());
    for (const RunOutput& out : outputs) {
        print_run(out);
        rows.push_back(out.row);
    }

    std::printf("\nsummary over %zu seeds (mean ± sample std):\n", rows.size());
    for (const char* name : kSummaryMetrics) {
        std::vector<double> values;
        values.reserve(rows.size());
        for (const ResultRow& r : rows) values.push_back(metric_of(r, name));
        const ColumnStats s = stats_of(values);
        std::printf("  %-12s %8.4f ± %.4f\n", name, s.mean, s.sd);
    }

    const std::string path = cfg.out_dir + "/results.csv";
    write_results_csv(rows, path);
    std::printf("\nwrote %s (+ .full.csv, .summary.csv)\n", path.c_str());
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& param,
              const std::vector<double>& grid) {
    validate_config(cfg);
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    if (param != "epsilon" && param != "w-var" && param != "w-entropy")
        throw std::invalid_argument("sweep: --param must be epsilon, w-var or w-entropy");
    const Dataset ds = resolve_dataset(cfg);

    std::filesystem::create_directories(cfg.out_dir);
    const std::string runs_path = cfg.out_dir + "/sweep_" + param + "_runs.csv";
    const std::string grid_path = cfg.out_dir + "/sweep_" + param + ".csv";
    std::FILE* runs_csv = std::fopen(runs_path.c_str(), "w");
    if (runs_csv == nullptr) throw std::runtime_error("cannot write " + runs_path);
    std::FILE* grid_csv = std::fopen(grid_path.c_str(), "w");
    if (grid_csv == nullptr) {
        std::fclose(runs_csv);
        throw std::runtime_error("cannot write " + grid_path);
    }

    std::fprintf(runs_csv, "param,value,seed");
    for (const char* name : kSummaryMetrics) std::fprintf(runs_csv, ",%s", name);
    std::fprintf(runs_csv, "\n");
    std::fprintf(grid_csv, "param,value");
    for (const char* name : kSummaryMetrics)
        std::fprintf(grid_csv, ",mean_%s,std_%s", name, name);
    std::fprintf(grid_csv, "\n");

    // best[metric] = (cell value, mean): min for conductance, max elsewhere.
    std::map<std::string, std::pair<double, double>> best;

    for (double cell : grid) {
        // One factor at a time: the swept term alone is active (epsilon sweeps
        // pin w_dist = 1, since epsilon is inert without the distance term).
        LossConfig loss;
        loss.delta = cfg.loss.delta;
        loss.epsilon = cfg.loss.epsilon;
        if (param == "epsilon") {
            loss.w_dist = 1.0;
            loss.epsilon = cell;
        } else if (param == "w-var") {
            loss.w_var = cell;
        } else {
            loss.w_ent = cell;
        }
        if (loss.w_dist > 0.0 && cfg.k < 2)
            throw std::invalid_argument("sweep: the distance term needs --k >= 2");

        const std::vector<RunOutput> outputs = run_seeds(ds, cfg, loss);
        std::fprintf(grid_csv, "%s,%.17g", param.c_str(), cell);
        for (const char* name : kSummaryMetrics) {
            std::vector<double> values;
            for (const RunOutput& out : outputs) values.push_back(metric_of(out.row, name));
            const ColumnStats s = stats_of(values);
            std::fprintf(grid_csv, ",%.6g,%.6g", s.mean, s.sd);

            const bool lower_is_better = std::string(name) == "conductance";
            if (!std::isnan(s.mean)) {
                auto it = best.find(name);
                if (it == best.end() ||
                    (lower_is_better ? s.mean < it->second.second : s.mean > it->second.second))
                    best[name] = {cell, s.mean};
            }
        }
        std::fprintf(grid_csv, "\n");
        for (const RunOutput& out : outputs) {
            std::fprintf(runs_csv, "%s,%.17g,%lu", param.c_str(), cell,
                         static_cast<unsigned long>(out.row.seed));
            for (const char* name : kSummaryMetrics)
                std::fprintf(runs_csv, ",%.17g", metric_of(out.row, name));
            std::fprintf(runs_csv, "\n");
        }
        std::printf("swept %s=%g over %zu seeds\n", param.c_str(), cell, cfg.seeds.size());
    }
    std::fclose(runs_csv);
    std::fclose(grid_csv);

    std::printf("\nbest cell per metric:\n");
    for (const char* name : kSummaryMetrics) {
        const auto it = best.find(name);
        if (it == best.end())
            std::printf("  %-12s n/a\n", name);
        else
            std::printf("  %-12s %s=%g (mean %.4f)\n", name, param.c_str(), it->second.first,
                        it->second.second);
    }
    std::printf("\nwrote %s and %s\n", grid_path.c_str(), runs_path.c_str());
    return 0;
}

int cmd_ttest(const std::string& csv_a, const std::string& csv_b, const std::string& metric) {
    const ResultsTable ta = read_results_csv(csv_a);
    const ResultsTable tb = read_results_csv(csv_b);

    auto seed_order = [](const ResultsTable& t, const std::string& path) {
        const std::vector<double> seeds = t.column_as_doubles("seed");
        std::vector<std::pair<double, int>> order;
        for (int i = 0; i < static_cast<int>(seeds.size()); ++i) order.emplace_back(seeds[i], i);
        std::sort(order.begin(), order.end());
        for (std::size_t i = 1; i < order.size(); ++i)
            if (order[i].first == order[i - 1].first)
                throw std::invalid_argument(path + ": duplicate seed " +
                                            std::to_string(order[i].first));
        return order;
    };
    const auto order_a = seed_order(ta, csv_a);
    const auto order_b = seed_order(tb, csv_b);
    if (order_a.size() != order_b.size())
        throw std::invalid_argument("seed sets differ in size: " + std::to_string(order_a.size()) +
                                    " vs " + std::to_string(order_b.size()));
    for (std::size_t i = 0; i < order_a.size(); ++i)
        if (order_a[i].first != order_b[i].first)
            throw std::invalid_argument("seed sets differ: no pairing possible");
    if (order_a.size() < 2) throw std::invalid_argument("need at least 2 paired rows");

    std::vector<std::string> metrics;
    if (!metric.empty()) {
        if (ta.column_index(metric) < 0 || tb.column_index(metric) < 0)
            throw std::invalid_argument("metric '" + metric + "' missing from an input file");
        metrics.push_back(metric);
    } else {
        for (const char* name : kSummaryMetrics)
            if (ta.column_index(name) >= 0 && tb.column_index(name) >= 0) metrics.push_back(name);
        if (metrics.empty()) throw std::invalid_argument("no shared metric columns");
    }

    std::printf("%-12s %12s %12s   (n=%zu pairs)\n", "metric", "t", "p", order_a.size());
    for (const std::string& name : metrics) {
        const std::vector<double> col_a = ta.column_as_doubles(name);
        const std::vector<double> col_b = tb.column_as_doubles(name);
        std::vector<double> a, b;
        for (const auto& [seed, idx] : order_a) a.push_back(col_a[idx]);
        for (const auto& [seed, idx] : order_b) b.push_back(col_b[idx]);
        const TTestResult r = paired_ttest(a, b);
        std::printf("%-12s %12.4f %12.6g\n", name.c_str(), r.t, r.p);
    }
    return 0;
}

int cmd_inspect(const std::string& dataset_dir) {
    const Dataset ds = load_dataset(dataset_dir);
    int classes = 0;
    for (int id : ds.labels) classes = std::max(classes, id + 1);

    std::printf("name:     %s\n", ds.name.c_str());
    std::printf("nodes:    %d\n", ds.graph.n);
    std::printf("edges:    %lld\n", static_cast<long long>(ds.graph.edge_count));
    std::printf("features: %d\n", ds.features.cols);
    if (ds.has_labels())
        std::printf("classes:  %d\n", classes);
    else
        std::printf("classes:  -\n");
    // Feature entropy only makes sense for non-negative features (the rows are
    // renormalized into distributions); report "-" instead of failing on
    // datasets with signed features, e.g. Gaussian synthetic blocks.
    try {
        const FeatureRichness richness = feature_richness(ds.features);
        std::printf("mean feature entropy: %.4f bits", richness.mean_bits);
        if (richness.skipped_rows > 0)
            std::printf(" (%d all-zero rows skipped)", richness.skipped_rows);
        std::printf("\n");
    } catch (const std::invalid_argument&) {
        std::printf("mean feature entropy: - (undefined for these features)\n");
    }
    return 0;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Graph clustering via modularity optimization with diversity-preserving "
                 "regularization"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string sbm_text;

    auto add_data_flags = [&](CLI::App* sub) {
        sub->add_option("--dataset", cfg.dataset_dir, "dataset directory (edges/features/labels)");
        sub->add_option("--sbm", sbm_text,
                        "generate a stochastic block model, e.g. "
                        "sizes=100x100x100x100,p_in=0.3,p_out=0.01,dim=16,sep=2,noise=1,seed=7");
    };
    auto add_train_flags = [&](CLI::App* sub) {
        sub->add_option("--k", cfg.k, "number of clusters");
        sub->add_option("--epochs", cfg.epochs, "training epochs");
        sub->add_option("--lr", cfg.lr, "Adam learning rate");
        sub->add_option("--hidden", cfg.hidden, "encoder hidden width");
        sub->add_option("--w-dist", cfg.loss.w_dist, "centroid-distance term weight");
        sub->add_option("--w-var", cfg.loss.w_var, "assignment-variance term weight");
        sub->add_option("--w-entropy", cfg.loss.w_ent, "assignment-entropy term weight");
        sub->add_option("--epsilon", cfg.loss.epsilon, "minimum squared centroid distance");
        sub->add_option("--delta", cfg.loss.delta, "entropy log stabilizer");
        sub->add_option("--seeds", cfg.seeds, "training seeds")->delimiter(',');
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--threads", cfg.threads, "parallel seed workers");
        sub->add_option("--record-every", cfg.record_every, "history stride in epochs");
    };

    CLI::App* train_cmd = app.add_subcommand("train", "multi-seed training + evaluation");
    add_data_flags(train_cmd);
    add_train_flags(train_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "one-factor-at-a-time hyperparameter sweep");
    std::string sweep_param;
    std::vector<double> sweep_grid;
    add_data_flags(sweep_cmd);
    add_train_flags(sweep_cmd);
    sweep_cmd->add_option("--param", sweep_param, "epsilon | w-var | w-entropy")->required();
    sweep_cmd->add_option("--grid", sweep_grid, "cells to sweep")->delimiter(',');

    CLI::App* ttest_cmd =
        app.add_subcommand("ttest", "paired t-test between two results CSVs, joined on seed");
    std::string csv_a, csv_b, ttest_metric;
    ttest_cmd->add_option("csv_a", csv_a, "first results CSV")->required();
    ttest_cmd->add_option("csv_b", csv_b, "second results CSV")->required();
    ttest_cmd->add_option("--metric", ttest_metric, "single metric column (default: all shared)");

    CLI::App* inspect_cmd = app.add_subcommand("inspect", "dataset shape and feature entropy");
    std::string inspect_dir;
    inspect_cmd->add_option("dataset", inspect_dir, "dataset directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!sbm_text.empty()) cfg.sbm = parse_sbm_spec(sbm_text);
        if (cfg.sbm.has_value() && !cfg.dataset_dir.empty())
            throw std::invalid_argument("--dataset and --sbm are mutually exclusive");

        if (train_cmd->parsed()) return cmd_train(cfg);
        if (sweep_cmd->parsed()) {
            if (sweep_grid.empty()) {
                if (sweep_param == "epsilon")
                    sweep_grid = {10, 1, 0.1, 0.01, 0.001, 0.0001, 0.00001};
                else
                    sweep_grid = {1, 0.1, 0.01, 0.001};
            }
            return cmd_sweep(cfg, sweep_param, sweep_grid);
        }
        if (ttest_cmd->parsed()) return cmd_ttest(csv_a, csv_b, ttest_metric);
        if (inspect_cmd->parsed()) return cmd_inspect(inspect_dir);
        throw std::invalid_argument("no subcommand");
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace gclust
