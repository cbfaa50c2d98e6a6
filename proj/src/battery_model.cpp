#include "fracsoc/battery_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracsoc {

OcvCurve::OcvCurve(std::vector<std::pair<double, double>> breakpoints)
    : pts_(std::move(breakpoints)) {
    if (pts_.size() < 2) throw std::invalid_argument("OcvCurve: need at least 2 breakpoints");
    for (size_t i = 1; i < pts_.size(); ++i) {
        if (!(pts_[i].first > pts_[i - 1].first))
            throw std::invalid_argument("OcvCurve: soc breakpoints must be strictly increasing");
        if (pts_[i].second < pts_[i - 1].second)
            throw std::invalid_argument("OcvCurve: voltage must be non-decreasing in soc");
    }
    if (pts_.front().first != 0.0 || pts_.back().first != 1.0)
        throw std::invalid_argument("OcvCurve: breakpoints must span soc 0 to 1");
}

double OcvCurve::operator()(double soc) const {
    if (soc < 0.0 || soc > 1.0) throw std::domain_error("ocv: soc outside [0, 1]");
    auto it = std::upper_bound(pts_.begin(), pts_.end(), soc,
                               [](double s, const auto& p) { return s < p.first; });
    if (it == pts_.begin()) return pts_.front().second;
    if (it == pts_.end()) return pts_.back().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (soc - lo.first) / (hi.first - lo.first);
    return lo.second + f * (hi.second - lo.second);
}

OcvCurve OcvCurve::default_curve() {
    return OcvCurve({{0.0, 3.00},
                     {0.10, 3.40},
                     {0.30, 3.55},
                     {0.50, 3.60},
                     {0.70, 3.65},
                     {0.90, 3.80},
                     {1.0, 4.20}});
}

double ocv(const OcvCurve& curve, double soc) { return curve(soc); }

BatteryParams::BatteryParams(double capacity_c_n_, double eta_, double r0_, double rp_,
                             double cp_, FracOrder alpha_, OcvCurve ocv_)
    : capacity_c_n(capacity_c_n_),
      eta(eta_),
      r0(r0_),
      rp(rp_),
      cp(cp_),
      alpha(alpha_),
      ocv(std::move(ocv_)) {
    if (!(capacity_c_n > 0.0)) throw std::invalid_argument("BatteryParams: capacity must be > 0");
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("BatteryParams: eta in (0, 1]");
    if (r0 < 0.0) throw std::invalid_argument("BatteryParams: r0 must be >= 0");
    if (!(rp > 0.0)) throw std::invalid_argument("BatteryParams: rp must be > 0");
    if (!(cp > 0.0)) throw std::invalid_argument("BatteryParams: cp must be > 0");
}

BatteryState::BatteryState(double soc0, double up0, int memory_len, double t_s)
    : soc(soc0),
      u_p(up0),
      soc_history(memory_len + 1, t_s),
      up_history(memory_len + 1, t_s) {
    if (soc0 < 0.0 || soc0 > 1.0) throw std::invalid_argument("BatteryState: soc0 outside [0, 1]");
    soc_history.push(soc0);
    up_history.push(up0);
}

void step(const BatteryParams& params, const GlWeights& weights, BatteryState& state,
          double current, double t_s) {
    if (!(t_s > 0.0)) throw std::invalid_argument("step: t_s must be > 0");
    if (t_s != state.soc_history.step_s())
        throw std::invalid_argument("step: t_s does not match state history step");
    if (weights.memory_len + 1 != state.soc_history.capacity())
        throw std::invalid_argument("step: weights memory does not match state history");
    const int m = weights.memory_len;
    const Eigen::VectorXd& w = weights.weights;
    const double ta = std::pow(t_s, weights.alpha.value());

    // GL window for the new sample is [x_t, x_{t-1}, ..., x_{t-M}] with the
    // oldest window sample as constant-extension reference; before the push,
    // x_{t-j} sits at buffer index j-1.
    const double soc_ref = state.soc_history.padded(m - 1);
    double soc_hist_sum = 0.0;
    for (int j = 1; j <= m; ++j) {
        soc_hist_sum += w[j] * (state.soc_history.padded(j - 1) - soc_ref);
    }
    double soc_new = soc_ref + ta * (-params.eta * current / params.capacity_c_n) - soc_hist_sum;
    if (soc_new < 0.0 || soc_new > 1.0) {
        soc_new = std::clamp(soc_new, 0.0, 1.0);
        state.saturated = true;
    }

    const double up_ref = state.up_history.padded(m - 1);
    double up_hist_sum = 0.0;
    for (int j = 1; j <= m; ++j) {
        up_hist_sum += w[j] * (state.up_history.padded(j - 1) - up_ref);
    }
    const double up_new = (ta * current / params.cp - up_hist_sum + up_ref) /
                          (1.0 + ta / (params.cp * params.rp));

    state.soc = soc_new;
    state.u_p = up_new;
    state.soc_history.push(soc_new);
    state.up_history.push(up_new);
}

double terminal_voltage(const BatteryParams& params, const BatteryState& state,
                        double current) {
    return params.ocv(state.soc) - current * params.r0 - state.u_p;
}

CoulombTrace coulomb_count(double soc0, const Eigen::VectorXd& currents, double t_s,
                           double eta, double c_n) {
    if (soc0 < 0.0 || soc0 > 1.0) throw std::invalid_argument("coulomb_count: soc0 outside [0, 1]");
    CoulombTrace trace;
    trace.soc.resize(currents.size());
    double soc = soc0;
    for (Eigen::Index k = 0; k < currents.size(); ++k) {
        soc -= eta * currents[k] * t_s / c_n;
        if (soc < 0.0 || soc > 1.0) {
            soc = std::clamp(soc, 0.0, 1.0);
            trace.saturated = true;
        }
        trace.soc[k] = soc;
    }
    return trace;
}

double state_of_health(double q_max, double q_initial) {
    if (!(q_initial > 0.0)) throw std::invalid_argument("state_of_health: q_initial must be > 0");
    if (q_max < 0.0) throw std::invalid_argument("state_of_health: q_max must be >= 0");
    return 100.0 * q_max / q_initial;
}

std::vector<SimRecord> simulate_cycle(const BatteryParams& params,
                                      const CurrentProfile& profile, double t_s,
                                      double soc0, int memory_len) {
    if (profile.empty()) throw std::invalid_argument("simulate_cycle: empty profile");
    const GlWeights weights = gl_weights(params.alpha, memory_len);
    BatteryState state(soc0, 0.0, memory_len, t_s);

    std::vector<SimRecord> trace;
    double t = 0.0;
    for (const auto& [current, duration] : profile) {
        const int n = static_cast<int>(std::llround(duration / t_s));
        for (int k = 0; k < n; ++k) {
            step(params, weights, state, current, t_s);
            t += t_s;
            trace.push_back(
                {t, current, terminal_voltage(params, state, current), state.soc, state.u_p});
        }
    }
    return trace;
}

}  // namespace fracsoc
