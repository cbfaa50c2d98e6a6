#ifndef FRACSOC_PINN_LOSS_HPP
#define FRACSOC_PINN_LOSS_HPP

#include <Eigen/Dense>
#include <vector>

#include "fracsoc/battery_model.hpp"
#include "fracsoc/frac_calc.hpp"

namespace fracsoc {

/// Everything the physics residuals need: model parameters, memory length,
/// sampling step and the matching GL weights.
struct PhysicsConfig {
    BatteryParams params;
    int memory_len;
    double t_s;
    GlWeights weights;
};

PhysicsConfig make_physics(BatteryParams params, int memory_len, double t_s);

struct LossWeights {
    double lambda = 0.0;  // physics weight, >= 0
};

struct LossBreakdown {
    double l_data = 0.0;
    double l_dyn = 0.0;
    double l_pol = 0.0;
    double l_phy = 0.0;  // l_dyn + l_pol
    double l_total = 0.0;
};

/// Mean squared error between predicted and true SOC sequences.
double data_loss(const Eigen::VectorXd& soc_pred, const Eigen::VectorXd& soc_true);

/// Residual of the fractional SOC dynamics at the buffer's newest sample:
/// D^a soc + eta*I/C_n. Zero on trajectories of battery_model::step.
double dynamics_residual(const HistoryBuffer& soc_pred_history, double current,
                         const PhysicsConfig& cfg);

/// Residual of the fractional polarization equation at the newest sample:
/// C_p * D^a u_p + u_p/R_p - I, with u_p/R_p taken at the current step.
double polarization_residual(const HistoryBuffer& up_pred_history, double current,
                             const PhysicsConfig& cfg);

/// One contiguous run of network predictions, stride t_s in time. Index k
/// holds the prediction for the k-th consecutive time step.
struct SequenceBatch {
    Eigen::VectorXd soc_pred;
    Eigen::VectorXd up_pred;
    Eigen::VectorXd soc_true;
    Eigen::VectorXd current;  // raw amperes at each prediction time
};

struct TotalLossResult {
    LossBreakdown breakdown;
    // gradients of l_total w.r.t. every prediction, per segment
    std::vector<Eigen::VectorXd> d_soc_pred;
    std::vector<Eigen::VectorXd> d_up_pred;
};

/// Composite loss over a batch of prediction segments.
///
/// Every point contributes to l_data; residual points begin at index M
/// within each segment (no partial-memory residuals). l_dyn and l_pol are
/// means of squared residuals over all residual points in the batch, and
/// l_total = l_data + lambda * (l_dyn + l_pol). Gradients carry the GL
/// cross-time coupling: a prediction at index k feeds residuals k..k+M.
TotalLossResult total_loss(const std::vector<SequenceBatch>& batch, const PhysicsConfig& cfg,
                           LossWeights lw);

}  // namespace fracsoc

#endif
