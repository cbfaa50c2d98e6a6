#ifndef FRACSOC_NN_CORE_HPP
#define FRACSOC_NN_CORE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace fracsoc {

enum class Arch { MLP, RNN, LSTM };

std::string to_string(Arch arch);
Arch arch_from_string(const std::string& s);

/// Network hyperparameters. The two output heads are (SOC, U_p); both are
/// linear (range enforcement is a loss concern, not an activation).
/// MLP consumes the flattened window; RNN/LSTM consume it stepwise and the
/// heads read the final hidden state. hidden_dims.front() is the recurrent
/// state size for RNN/LSTM; MLP may stack several hidden layers.
struct NetworkConfig {
    Arch arch = Arch::MLP;
    int input_dim = 3;  // voltage, current, temperature
    std::vector<int> hidden_dims = {32};
    int output_dim = 2;
    int window_len = 20;
};

/// Flat 64-bit parameter vector with a named block layout derived from the
/// config. Blocks appear in a fixed order so seeded init, Adam and the
/// checkpoint format are all deterministic.
struct ParamBlock {
    std::string name;
    int rows;
    int cols;  // 1 for bias vectors
    int offset;
    bool is_bias;
};

std::vector<ParamBlock> param_layout(const NetworkConfig& config);
int param_count(const NetworkConfig& config);

struct NetworkParams {
    Eigen::VectorXd values;
};

/// Weights uniform(-scale, scale) from the seeded generator, biases zero.
NetworkParams init_params(const NetworkConfig& config, std::uint64_t seed, double scale);

/// Intermediates recorded by forward() for the matching backward().
struct ForwardCache {
    Arch arch;
    Eigen::MatrixXd window;                 // window_len x input_dim
    std::vector<Eigen::VectorXd> act;       // MLP activations, act[0] = input
    std::vector<Eigen::VectorXd> h;         // RNN/LSTM hidden, h[0] = 0
    std::vector<Eigen::VectorXd> c;         // LSTM cell, c[0] = 0
    std::vector<Eigen::VectorXd> gate_f, gate_i, gate_o, gate_g;
};

struct ForwardResult {
    double soc;
    double up;
    ForwardCache cache;
};

ForwardResult forward(const NetworkParams& params, const NetworkConfig& config,
                      const Eigen::MatrixXd& input_window);

/// Exact reverse-mode gradient of d_soc * soc + d_up * up with respect to
/// every parameter, including through time for RNN/LSTM. Returns a flat
/// vector matching the layout.
Eigen::VectorXd backward(const NetworkParams& params, const NetworkConfig& config,
                         const ForwardCache& cache, double d_soc, double d_up);

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------
struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long step = 0;
};

AdamState make_adam(int n_params, AdamConfig cfg = {});

/// Standard bias-corrected Adam update, in place.
void adam_step(NetworkParams& params, const Eigen::VectorXd& grads, AdamState& state);

// ---------------------------------------------------------------------------
// Checkpoints: little-endian binary, shape header then raw 64-bit floats.
// `aux` is an arbitrary caller-owned section (normalization statistics ride
// along here). Round trips are bit-exact.
// ---------------------------------------------------------------------------
void save_checkpoint(const std::string& path, const NetworkConfig& config,
                     const NetworkParams& params, const std::vector<double>& aux = {});

struct Checkpoint {
    NetworkConfig config;
    NetworkParams params;
    std::vector<double> aux;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace fracsoc

#endif
