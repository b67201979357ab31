#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gclust/data_io.hpp"
#include "gclust/objective.hpp"

namespace gclust {

// Everything a multi-seed experiment needs. Exactly one of dataset_dir / sbm
// selects the data source.
struct ExperimentConfig {
    std::string dataset_dir;
    std::optional<SbmSpec> sbm;
    int k = 4;
    int epochs = 1000;
    double lr = 0.001;
    int hidden = 512;
    LossConfig loss;
    std::vector<std::uint64_t> seeds = {993, 550, 243, 16, 716, 383, 277, 274, 188, 796};
    std::string out_dir = "results";
    int threads = 1;
    int record_every = 50;
};

// Parses an SBM description of the form
//   "sizes=100x100x100x100,p_in=0.3,p_out=0.01,dim=16,sep=2,noise=1,seed=7"
// (sizes is required; the rest fall back to SbmSpec defaults).
SbmSpec parse_sbm_spec(const std::string& text);

// Trains every seed (optionally in parallel), prints per-seed loss and metric
// lines plus a mean±std summary, writes results.csv/.full.csv/.summary.csv
// under cfg.out_dir.
int cmd_train(const ExperimentConfig& cfg);

// One-factor-at-a-time hyperparameter sweep: param is "epsilon" (distance
// margin, with w_dist pinned to 1 and the other weights zero), "w-var", or
// "w-entropy" (each swept alone). Every grid cell is a full multi-seed run;
// writes per-run and per-cell CSVs and prints the best cell per metric.
int cmd_sweep(const ExperimentConfig& cfg, const std::string& param,
              const std::vector<double>& grid);

// Joins two results CSVs on their seed columns (the seed sets must match) and
// prints the paired t statistic and two-tailed p-value per metric column —
// all shared metric columns, or just `metric` when non-empty.
int cmd_ttest(const std::string& csv_a, const std::string& csv_b, const std::string& metric);

// Prints node/edge/feature/class counts and the mean feature entropy in bits.
int cmd_inspect(const std::string& dataset_dir);

// Argument parsing + dispatch. Exit codes: 0 success, 1 invalid usage or
// configuration, 2 runtime failure (I/O, malformed data, diverged training).
int run_cli(int argc, const char* const* argv);

}  // namespace gclust
