#include "fracsoc/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fracsoc/rng.hpp"

namespace fracsoc {

WindowedCycle make_windows(const Cycle& cycle, int window_len, const Normalizer& norm) {
    if (window_len < 1) throw std::invalid_argument("make_windows: window_len must be >= 1");
    const int n = static_cast<int>(cycle.records.size());
    if (n < window_len)
        throw std::domain_error("make_windows: cycle '" + cycle.name +
                                "' shorter than one window");
    WindowedCycle wc;
    wc.window_len = window_len;
    wc.features = feature_matrix(cycle, norm);
    wc.soc_true.resize(n);
    wc.current.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& r = cycle.records[static_cast<size_t>(i)];
        if (!r.soc_true)
            throw std::domain_error("make_windows: cycle '" + cycle.name +
                                    "' lacks ground-truth SOC");
        wc.soc_true[i] = *r.soc_true;
        wc.current[i] = r.current;
    }
    return wc;
}

namespace {

struct Segment {
    int cycle;
    int start;
    int len;
};

// Forward a contiguous run of windows; predictions land in a SequenceBatch.
SequenceBatch forward_segment(const NetworkParams& params, const NetworkConfig& net,
                              const WindowedCycle& wc, int start, int len,
                              std::vector<ForwardCache>* caches) {
    SequenceBatch seg;
    seg.soc_pred.resize(len);
    seg.up_pred.resize(len);
    seg.soc_true.resize(len);
    seg.current.resize(len);
    if (caches) caches->clear();
    for (int k = 0; k < len; ++k) {
        ForwardResult fr = forward(params, net, wc.window(start + k));
        seg.soc_pred[k] = fr.soc;
        seg.up_pred[k] = fr.up;
        seg.soc_true[k] = wc.target(start + k);
        seg.current[k] = wc.current_at(start + k);
        if (caches) caches->push_back(std::move(fr.cache));
    }
    return seg;
}

// Data-only loss with the same arithmetic as total_loss's data term, so a
// plain run and a lambda = 0 run produce bitwise-identical gradients.
TotalLossResult data_only_loss(const SequenceBatch& seg) {
    const Eigen::Index n = seg.soc_pred.size();
    if (n == 0) throw std::domain_error("data_only_loss: empty batch");
    TotalLossResult out;
    Eigen::VectorXd d_soc = Eigen::VectorXd::Zero(n);
    double sq = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double e = seg.soc_pred[k] - seg.soc_true[k];
        sq += e * e;
        d_soc[k] = 2.0 * e / static_cast<double>(n);
    }
    out.breakdown.l_data = sq / static_cast<double>(n);
    out.breakdown.l_total = out.breakdown.l_data;
    out.d_soc_pred.push_back(std::move(d_soc));
    out.d_up_pred.push_back(Eigen::VectorXd::Zero(n));
    return out;
}

LossBreakdown accumulate_mean(const std::vector<LossBreakdown>& parts) {
    LossBreakdown avg;
    if (parts.empty()) return avg;
    for (const auto& b : parts) {
        avg.l_data += b.l_data;
        avg.l_dyn += b.l_dyn;
        avg.l_pol += b.l_pol;
        avg.l_phy += b.l_phy;
        avg.l_total += b.l_total;
    }
    const double n = static_cast<double>(parts.size());
    avg.l_data /= n;
    avg.l_dyn /= n;
    avg.l_pol /= n;
    avg.l_phy /= n;
    avg.l_total /= n;
    return avg;
}

}  // namespace

TrainResult train(const TrainConfig& config, const NetworkConfig& net_config,
                  const Dataset& train_ds, const Dataset& val_ds,
                  const PhysicsConfig& physics, const Normalizer& norm) {
    if (config.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (config.lambda < 0.0) throw std::invalid_argument("train: lambda must be >= 0");
    if (train_ds.cycles.empty()) throw std::invalid_argument("train: empty training set");
    if (physics.memory_len != config.memory_len ||
        physics.weights.alpha.value() != config.alpha)
        throw std::invalid_argument("train: physics (alpha, memory_len) disagree with config");
    if (net_config.window_len != config.window_len)
        throw std::invalid_argument("train: window_len disagrees between configs");

    const auto t0 = std::chrono::steady_clock::now();

    std::vector<WindowedCycle> windows;
    windows.reserve(train_ds.cycles.size());
    for (const auto& c : train_ds.cycles) {
        windows.push_back(make_windows(c, config.window_len, norm));
    }

    std::vector<Segment> segments;
    for (size_t ci = 0; ci < windows.size(); ++ci) {
        const int k = windows[ci].num_windows();
        for (int start = 0; start < k; start += config.batch_size) {
            segments.push_back({static_cast<int>(ci), start,
                                std::min(config.batch_size, k - start)});
        }
    }

    TrainResult result;
    result.params = init_params(net_config, config.seed, config.init_scale);
    AdamState adam = make_adam(param_count(net_config), AdamConfig{config.learning_rate});
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    const LossWeights lw{config.lambda};

    std::vector<ForwardCache> caches;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(segments, rng);
        std::vector<LossBreakdown> batch_losses;
        batch_losses.reserve(segments.size());

        for (size_t bi = 0; bi < segments.size(); ++bi) {
            const Segment& s = segments[bi];
            const WindowedCycle& wc = windows[static_cast<size_t>(s.cycle)];
            SequenceBatch seg =
                forward_segment(result.params, net_config, wc, s.start, s.len, &caches);

            TotalLossResult loss = config.plain ? data_only_loss(seg)
                                                : total_loss({seg}, physics, lw);
            if (!std::isfinite(loss.breakdown.l_total)) {
                const char* comp = !std::isfinite(loss.breakdown.l_data) ? "l_data"
                                   : !std::isfinite(loss.breakdown.l_dyn) ? "l_dyn"
                                                                          : "l_pol";
                throw TrainingDiverged(epoch, static_cast<int>(bi), comp);
            }
            batch_losses.push_back(loss.breakdown);

            Eigen::VectorXd grad = Eigen::VectorXd::Zero(result.params.values.size());
            for (int k = 0; k < s.len; ++k) {
                grad += backward(result.params, net_config, caches[static_cast<size_t>(k)],
                                 loss.d_soc_pred[0][k], loss.d_up_pred[0][k]);
            }
            const double gnorm = grad.norm();
            if (config.grad_clip > 0.0 && gnorm > config.grad_clip) {
                grad *= config.grad_clip / gnorm;
                ++result.report.clip_events;
            }
            adam_step(result.params, grad, adam);
        }

        EpochRecord rec;
        rec.train = accumulate_mean(batch_losses);
        if (!val_ds.cycles.empty()) {
            const EvalResult ev =
                evaluate(result.params, net_config, val_ds, physics, lw, norm);
            rec.val = ev.loss;
            rec.val_metrics = ev.metrics;
        }
        result.report.epochs.push_back(rec);
    }

    result.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

EvalResult evaluate(const NetworkParams& params, const NetworkConfig& net_config,
                    const Dataset& dataset, const PhysicsConfig& physics, LossWeights lw,
                    const Normalizer& norm) {
    if (dataset.cycles.empty()) throw std::invalid_argument("evaluate: empty dataset");
    std::vector<SequenceBatch> segments;
    std::vector<double> preds, truths;
    for (const auto& c : dataset.cycles) {
        const WindowedCycle wc = make_windows(c, net_config.window_len, norm);
        SequenceBatch seg =
            forward_segment(params, net_config, wc, 0, wc.num_windows(), nullptr);
        for (Eigen::Index k = 0; k < seg.soc_pred.size(); ++k) {
            preds.push_back(seg.soc_pred[k]);
            truths.push_back(seg.soc_true[k]);
        }
        segments.push_back(std::move(seg));
    }
    EvalResult out;
    out.loss = total_loss(segments, physics, lw).breakdown;
    const Eigen::Map<const Eigen::VectorXd> y(truths.data(),
                                              static_cast<Eigen::Index>(truths.size()));
    const Eigen::Map<const Eigen::VectorXd> y_hat(preds.data(),
                                                  static_cast<Eigen::Index>(preds.size()));
    out.metrics = compute_metrics(y, y_hat);
    return out;
}

void write_report_csv(const TrainReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,l_data,l_dyn,l_pol,l_total,val_l_data,val_l_dyn,val_l_pol,val_l_total,"
           "val_mae,val_mse,val_rmse\n";
    char buf[512];
    for (size_t e = 0; e < report.epochs.size(); ++e) {
        const auto& r = report.epochs[e];
        std::snprintf(buf, sizeof(buf),
                      "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      e, r.train.l_data, r.train.l_dyn, r.train.l_pol, r.train.l_total,
                      r.val.l_data, r.val.l_dyn, r.val.l_pol, r.val.l_total, r.val_metrics.mae,
                      r.val_metrics.mse, r.val_metrics.rmse);
        out << buf;
    }
}

}  // namespace fracsoc
