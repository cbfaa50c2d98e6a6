#ifndef FRACSOC_DATA_HPP
#define FRACSOC_DATA_HPP

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fracsoc/battery_model.hpp"
#include "fracsoc/rng.hpp"

namespace fracsoc {

enum class CycleKind { UDDS, HWFET, LA92, NN, US06, CCCV, SYNTH };

std::string to_string(CycleKind kind);
CycleKind cycle_kind_from_string(const std::string& s);

struct CycleRecord {
    double t;            // seconds, strictly increasing within a cycle
    double current;      // A, discharge positive
    double voltage;      // V, terminal
    double temperature;  // deg C
    std::optional<double> soc_true;
    std::optional<double> up_true;
};

struct Cycle {
    std::string name;
    CycleKind kind = CycleKind::SYNTH;
    double temp_c = 0.0;
    std::vector<CycleRecord> records;
};

struct Dataset {
    std::vector<Cycle> cycles;

    /// Appends, rejecting duplicate (kind, temperature) pairs.
    void add(Cycle cycle);
    const Cycle* find(CycleKind kind, double temp_c) const;
};

/// Input feature channels, in network input order.
enum class Channel : int { voltage = 0, current = 1, temperature = 2 };
inline constexpr int kNumChannels = 3;

// ---------------------------------------------------------------------------
// CSV ingestion.  One file per cycle:
//   # kind=<KIND> temp_c=<T>
//   t_s,current_a,voltage_v,temp_c[,soc_true,up_true]
//   <rows...>
// UTF-8, '.' decimal, LF line endings; values written with 17 significant
// digits so a save/load round trip is value-identical.
// ---------------------------------------------------------------------------
Dataset load_csv(const std::string& path);
void save_csv(const Cycle& cycle, const std::string& path);

// ---------------------------------------------------------------------------
// Synthetic cycles (the desk-scale stand-ins for the drive-cycle corpus).
// ---------------------------------------------------------------------------
enum class SynthProfile { constant, pulse, random_walk };

SynthProfile synth_profile_from_string(const std::string& s);

struct SynthSpec {
    SynthProfile profile = SynthProfile::random_walk;
    double duration_s = 600.0;
    double t_s = 1.0;
    double soc0 = 0.8;
    std::uint64_t seed = 1;
    double amplitude_a = 1.0;  // current envelope; random_walk stays within it
    double temp_c = 0.0;       // constant synthetic temperature channel
    int memory_len = 10;
    CycleKind tag = CycleKind::SYNTH;
    std::string name = "synth";
};

/// Simulates the fractional model under the requested profile and attaches
/// ground-truth soc/u_p to every record.
Cycle synth_cycle(const SynthSpec& spec, const BatteryParams& params);

// ---------------------------------------------------------------------------
// Noise injection (labels are never touched).
// ---------------------------------------------------------------------------
enum class NoiseKind { gaussian, uniform_random };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double level = 0.0;  // on normalized channel scale
    std::vector<Channel> channels = {Channel::voltage, Channel::current,
                                     Channel::temperature};
    std::uint64_t seed = 0;
};

/// Additive noise scaled by each channel's min-max range over the dataset,
/// so `level` is the intensity on the normalized [0, 1] scale. Degenerate
/// channels (zero range) use unit scale.
Dataset add_noise(const Dataset& dataset, const NoiseSpec& spec);

// ---------------------------------------------------------------------------
// Min-max normalization fit on the training split only.
// ---------------------------------------------------------------------------
struct Normalizer {
    std::array<double, kNumChannels> lo{};
    std::array<double, kNumChannels> hi{};

    double apply(Channel c, double raw) const;
    double invert(Channel c, double normalized) const;
};

Normalizer fit_normalizer(const Dataset& training_split);
Dataset apply_normalizer(const Normalizer& norm, const Dataset& dataset);

/// Cycle records as an N x 3 matrix of normalized (voltage, current,
/// temperature) features.
Eigen::MatrixXd feature_matrix(const Cycle& cycle, const Normalizer& norm);

// ---------------------------------------------------------------------------
// Initial SOC sampling and leave-one-cycle-out partitioning.
// ---------------------------------------------------------------------------
double sample_initial_soc(Rng& rng, double lo = 0.2, double hi = 1.0);

struct PartitionPlan {
    std::vector<CycleKind> train_kinds;
    std::vector<CycleKind> test_kinds;
    std::vector<double> temperatures = {-20.0, -10.0, 0.0, 10.0};
};

/// The five built-in leave-one-cycle-out rotations (experiment 1..5).
PartitionPlan experiment_plan(int experiment_id);

struct Partition {
    Dataset train;
    Dataset test;
};

Partition partition(const Dataset& dataset, const PartitionPlan& plan);

}  // namespace fracsoc

#endif
