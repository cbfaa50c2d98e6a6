#include "fracsoc/pinn_loss.hpp"

#include <cmath>
#include <stdexcept>

namespace fracsoc {

PhysicsConfig make_physics(BatteryParams params, int memory_len, double t_s) {
    if (!(t_s > 0.0)) throw std::invalid_argument("make_physics: t_s must be > 0");
    GlWeights w = gl_weights(params.alpha, memory_len);
    return PhysicsConfig{std::move(params), memory_len, t_s, std::move(w)};
}

double data_loss(const Eigen::VectorXd& soc_pred, const Eigen::VectorXd& soc_true) {
    if (soc_pred.size() == 0) throw std::domain_error("data_loss: empty sequences");
    if (soc_pred.size() != soc_true.size())
        throw std::domain_error("data_loss: length mismatch");
    return (soc_pred - soc_true).squaredNorm() / static_cast<double>(soc_pred.size());
}

namespace {
void check_buffer(const HistoryBuffer& buf, const PhysicsConfig& cfg) {
    if (buf.step_s() != cfg.t_s)
        throw std::domain_error("residual: history step does not match physics t_s");
}
}  // namespace

double dynamics_residual(const HistoryBuffer& soc_pred_history, double current,
                         const PhysicsConfig& cfg) {
    check_buffer(soc_pred_history, cfg);
    return gl_derivative(soc_pred_history, cfg.weights) +
           cfg.params.eta * current / cfg.params.capacity_c_n;
}

double polarization_residual(const HistoryBuffer& up_pred_history, double current,
                             const PhysicsConfig& cfg) {
    check_buffer(up_pred_history, cfg);
    return cfg.params.cp * gl_derivative(up_pred_history, cfg.weights) +
           up_pred_history.padded(0) / cfg.params.rp - current;
}

TotalLossResult total_loss(const std::vector<SequenceBatch>& batch, const PhysicsConfig& cfg,
                           LossWeights lw) {
    if (lw.lambda < 0.0) throw std::invalid_argument("total_loss: lambda must be >= 0");
    long n_points = 0;
    long n_residuals = 0;
    const int m = cfg.memory_len;
    for (const auto& seg : batch) {
        const Eigen::Index n = seg.soc_pred.size();
        if (seg.up_pred.size() != n || seg.soc_true.size() != n || seg.current.size() != n)
            throw std::domain_error("total_loss: segment length mismatch");
        n_points += n;
        if (n > m) n_residuals += n - m;
    }
    if (n_points == 0) throw std::domain_error("total_loss: empty batch");

    const double ta = std::pow(cfg.t_s, cfg.weights.alpha.value());
    const Eigen::VectorXd& w = cfg.weights.weights;
    const double w_sum = w.sum();  // S_M; the reference sample carries w_M - S_M

    TotalLossResult out;
    out.d_soc_pred.reserve(batch.size());
    out.d_up_pred.reserve(batch.size());

    double sq_data = 0.0, sq_dyn = 0.0, sq_pol = 0.0;

    // First pass: losses and data gradients; residuals recorded for reuse.
    std::vector<Eigen::VectorXd> r_dyn_all, r_pol_all;
    for (const auto& seg : batch) {
        const Eigen::Index n = seg.soc_pred.size();
        Eigen::VectorXd d_soc = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd d_up = Eigen::VectorXd::Zero(n);

        for (Eigen::Index k = 0; k < n; ++k) {
            const double e = seg.soc_pred[k] - seg.soc_true[k];
            sq_data += e * e;
            d_soc[k] = 2.0 * e / static_cast<double>(n_points);
        }

        const Eigen::Index n_res = (n > m) ? n - m : 0;
        Eigen::VectorXd r_dyn(n_res), r_pol(n_res);
        for (Eigen::Index k = m; k < n; ++k) {
            double acc_s = 0.0, acc_u = 0.0;
            for (int j = 0; j <= m; ++j) {
                acc_s += w[j] * seg.soc_pred[k - j];
                acc_u += w[j] * seg.up_pred[k - j];
            }
            acc_s -= w_sum * seg.soc_pred[k - m];
            acc_u -= w_sum * seg.up_pred[k - m];
            const double rd = acc_s / ta +
                              cfg.params.eta * seg.current[k] / cfg.params.capacity_c_n;
            const double rp = cfg.params.cp * acc_u / ta + seg.up_pred[k] / cfg.params.rp -
                              seg.current[k];
            r_dyn[k - m] = rd;
            r_pol[k - m] = rp;
            sq_dyn += rd * rd;
            sq_pol += rp * rp;
        }
        r_dyn_all.push_back(std::move(r_dyn));
        r_pol_all.push_back(std::move(r_pol));
        out.d_soc_pred.push_back(std::move(d_soc));
        out.d_up_pred.push_back(std::move(d_up));
    }

    out.breakdown.l_data = sq_data / static_cast<double>(n_points);
    if (n_residuals > 0) {
        out.breakdown.l_dyn = sq_dyn / static_cast<double>(n_residuals);
        out.breakdown.l_pol = sq_pol / static_cast<double>(n_residuals);
    }
    out.breakdown.l_phy = out.breakdown.l_dyn + out.breakdown.l_pol;
    out.breakdown.l_total = out.breakdown.l_data + lw.lambda * out.breakdown.l_phy;

    // Physics gradients.
    if (lw.lambda > 0.0 && n_residuals > 0) {
        const double scale = 2.0 * lw.lambda / static_cast<double>(n_residuals);
        for (size_t s = 0; s < batch.size(); ++s) {
            const auto& seg = batch[s];
            const Eigen::Index n = seg.soc_pred.size();
            auto& d_soc = out.d_soc_pred[s];
            auto& d_up = out.d_up_pred[s];
            for (Eigen::Index k = m; k < n; ++k) {
                const double rd = r_dyn_all[s][k - m];
                const double rp = r_pol_all[s][k - m];
                for (int j = 0; j <= m; ++j) {
                    const double coeff = (j == m) ? (w[j] - w_sum) : w[j];
                    d_soc[k - j] += scale * rd * coeff / ta;
                    d_up[k - j] += scale * rp *
                                   (cfg.params.cp * coeff / ta + (j == 0 ? 1.0 / cfg.params.rp : 0.0));
                }
            }
        }
    }
    return out;
}

}  // namespace fracsoc
