#ifndef FRACSOC_EXPERIMENTS_HPP
#define FRACSOC_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "fracsoc/data.hpp"
#include "fracsoc/training.hpp"

namespace fracsoc {

enum class SweepAxis { lambda, init_scale, noise, memory_len, frac_order, cycle_rotation };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& s);

struct ModelSpec {
    Arch arch;
    bool pinn;  // false = plain network, true = physics-regularized

    std::string label() const { return (pinn ? "fdiff_pinn_" : "plain_") + to_string(arch); }
};

/// One sweep over an explicit grid; everything else is pinned by the base
/// configs so runs are reproducible from this struct alone.
struct SweepSpec {
    SweepAxis axis = SweepAxis::lambda;
    std::vector<double> values;
    TrainConfig base_train;
    NetworkConfig base_net;
    BatteryParams battery;
    std::vector<ModelSpec> models;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    Dataset corpus;  // full corpus; cycle_rotation partitions it per value
    PartitionPlan plan = experiment_plan(5);  // fixed split for non-rotation axes
    double val_fraction = 0.2;                // tail share of each training cycle
};

struct ResultRow {
    std::string axis_value;
    std::string arch;
    std::string variant;  // "plain" or "fdiff_pinn"
    std::string seed;     // seed number, or "mean"/"max" for aggregates
    bool ok = true;
    std::string error;
    MetricReport metrics;
    LossBreakdown loss;
    bool aggregate = false;
};

struct ResultTable {
    std::string axis_name;
    std::vector<ResultRow> rows;
};

/// Runs the grid x models x seeds, mean/max aggregates over seeds appended
/// per grid point. A diverged run becomes a failed row; the sweep continues.
ResultTable run_sweep(const SweepSpec& spec);

/// Trains the six models on the experiment's train split and evaluates the
/// held-out cycle kind at each temperature: temperature rows x six model
/// columns, each with MAE/MSE.
ResultTable run_paper_protocol(const Dataset& corpus, int experiment_id,
                               const TrainConfig& base_train, const NetworkConfig& base_net,
                               const BatteryParams& battery, double val_fraction = 0.2);

/// Synthetic corpus tagged with drive-cycle kinds; CC-CV maps to the
/// constant profile, everything else to seeded random walks.
Dataset make_synth_corpus(const BatteryParams& battery, const std::vector<CycleKind>& kinds,
                          const std::vector<double>& temps, double duration_s, double t_s,
                          int memory_len, std::uint64_t seed,
                          SynthProfile default_profile = SynthProfile::random_walk);

/// Head/tail split of every cycle's records into train and validation parts.
std::pair<Dataset, Dataset> split_train_val(const Dataset& ds, double val_fraction,
                                            int min_records);

void write_results_csv(const ResultTable& table, const std::string& path);
void write_results_md(const ResultTable& table, const std::string& path);

/// Static SVG line chart: aggregate-mean MAE vs axis value, one series per
/// model variant. Byte-deterministic for fixed input.
void emit_plot(const ResultTable& table, const std::string& path);

std::vector<ModelSpec> all_models();

}  // namespace fracsoc

#endif
