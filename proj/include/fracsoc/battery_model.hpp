#ifndef FRACSOC_BATTERY_MODEL_HPP
#define FRACSOC_BATTERY_MODEL_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "fracsoc/frac_calc.hpp"

namespace fracsoc {

/// Monotone piecewise-linear open-circuit-voltage curve over soc in [0, 1].
class OcvCurve {
public:
    /// Breakpoints as (soc, volts) pairs; soc strictly increasing, volts
    /// non-decreasing, spanning soc 0 and 1.
    explicit OcvCurve(std::vector<std::pair<double, double>> breakpoints);

    double operator()(double soc) const;
    const std::vector<std::pair<double, double>>& breakpoints() const { return pts_; }

    /// 3.0 V at empty to 4.2 V at full with a flat mid plateau. A stand-in
    /// configuration default, not chemistry ground truth.
    static OcvCurve default_curve();

private:
    std::vector<std::pair<double, double>> pts_;
};

double ocv(const OcvCurve& curve, double soc);

/// Fractional equivalent-circuit parameters. Immutable and shareable.
struct BatteryParams {
    double capacity_c_n;  // rated capacity, A*s
    double eta;           // coulombic efficiency, (0, 1]
    double r0;            // series resistance, ohm
    double rp;            // polarization resistance, ohm
    double cp;            // polarization pseudo-capacitance, F*s^(alpha-1)
    FracOrder alpha;
    OcvCurve ocv;

    BatteryParams(double capacity_c_n, double eta, double r0, double rp, double cp,
                  FracOrder alpha, OcvCurve ocv);
};

/// Evolving model state: SOC, polarization voltage and their GL histories.
/// Single-writer. Histories hold the newest sample at index 0, so right
/// after step() the buffers contain the values just produced.
struct BatteryState {
    double soc;
    double u_p;
    HistoryBuffer soc_history;
    HistoryBuffer up_history;
    bool saturated = false;  // set when SOC had to be clamped to [0, 1]

    BatteryState(double soc0, double up0, int memory_len, double t_s);
};

/// Advance the fractional model one sample. Positive current = discharge.
///
/// SOC obeys D^a soc = -eta*I/C_n (explicit GL step); the polarization
/// branch obeys C_p D^a u_p + u_p/R_p = I with u_p taken at the new sample
/// inside the R_p term (semi-implicit, stable for stiff R_p*C_p).
/// weights must be gl_weights(params.alpha, M) for the state's memory M.
void step(const BatteryParams& params, const GlWeights& weights, BatteryState& state,
          double current, double t_s);

/// Eq-of-terminal-voltage: ocv(soc) - I*R0 - U_p.
double terminal_voltage(const BatteryParams& params, const BatteryState& state,
                        double current);

struct CoulombTrace {
    Eigen::VectorXd soc;
    bool saturated = false;
};

/// Rectangle-rule Coulomb counting: soc_k = soc_{k-1} - eta*I_k*T_s/C_n,
/// clamped to [0, 1] with a saturation flag.
CoulombTrace coulomb_count(double soc0, const Eigen::VectorXd& currents, double t_s,
                           double eta, double c_n);

/// 100 * q_max / q_initial.
double state_of_health(double q_max, double q_initial);

/// One row of a simulated trace, ground truth included.
struct SimRecord {
    double t;
    double current;
    double voltage;  // terminal
    double soc;
    double u_p;
};

/// Piecewise-constant current profile: (current A, duration s) segments.
using CurrentProfile = std::vector<std::pair<double, double>>;

/// Forward-simulate the fractional model over a profile, sampling every t_s.
/// The synthetic-data oracle behind all self-verifying experiments.
std::vector<SimRecord> simulate_cycle(const BatteryParams& params,
                                      const CurrentProfile& profile, double t_s,
                                      double soc0, int memory_len);

}  // namespace fracsoc

#endif
