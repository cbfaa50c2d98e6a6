#ifndef FRACSOC_TRAINING_HPP
#define FRACSOC_TRAINING_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracsoc/data.hpp"
#include "fracsoc/metrics.hpp"
#include "fracsoc/nn_core.hpp"
#include "fracsoc/pinn_loss.hpp"

namespace fracsoc {

struct TrainConfig {
    int epochs = 100;
    double learning_rate = 1e-3;
    int window_len = 20;
    double lambda = 0.0;
    int memory_len = 10;
    double alpha = 0.5;
    int batch_size = 64;
    std::uint64_t seed = 1;
    double init_scale = 0.01;
    double grad_clip = 10.0;  // L2 norm threshold; events are counted, not hidden
    bool plain = false;       // plain network training: physics term never computed
};

/// Thrown when a loss component goes non-finite; carries where it happened.
class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(int epoch, int batch, const std::string& component)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(batch) + " (" + component + ")"),
          epoch(epoch),
          batch(batch) {}
    int epoch;
    int batch;
};

/// Sliding stride-1 windows over one cycle, features normalized. Window k
/// covers records k..k+W-1; its prediction target is the final step.
struct WindowedCycle {
    Eigen::MatrixXd features;  // N x 3, normalized
    Eigen::VectorXd soc_true;  // N, raw SOC fraction
    Eigen::VectorXd current;   // N, raw amperes
    int window_len = 0;

    int num_windows() const {
        return static_cast<int>(features.rows()) - window_len + 1;
    }
    Eigen::MatrixXd window(int k) const { return features.middleRows(k, window_len); }
    double target(int k) const { return soc_true[k + window_len - 1]; }
    double current_at(int k) const { return current[k + window_len - 1]; }
};

WindowedCycle make_windows(const Cycle& cycle, int window_len, const Normalizer& norm);

struct EpochRecord {
    LossBreakdown train;
    LossBreakdown val;
    MetricReport val_metrics;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    double wall_time_s = 0.0;
    long clip_events = 0;
};

struct TrainResult {
    NetworkParams params;
    TrainReport report;
};

/// The training loop: window, forward both heads, assemble prediction
/// histories, residuals, backprop, Adam. Deterministic given the seed.
/// physics must agree with config on (alpha, memory_len, t_s).
TrainResult train(const TrainConfig& config, const NetworkConfig& net_config,
                  const Dataset& train_ds, const Dataset& val_ds,
                  const PhysicsConfig& physics, const Normalizer& norm);

struct EvalResult {
    MetricReport metrics;
    LossBreakdown loss;
};

/// Metrics over all windows' final-step SOC predictions against ground
/// truth, plus the loss breakdown with each cycle as one residual segment.
EvalResult evaluate(const NetworkParams& params, const NetworkConfig& net_config,
                    const Dataset& dataset, const PhysicsConfig& physics, LossWeights lw,
                    const Normalizer& norm);

/// Per-epoch loss curve as CSV.
void write_report_csv(const TrainReport& report, const std::string& path);

}  // namespace fracsoc

#endif
