#ifndef FRACSOC_FRAC_CALC_HPP
#define FRACSOC_FRAC_CALC_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace fracsoc {

/// Fractional differentiation order, restricted to (0, 1].
class FracOrder {
public:
    explicit FracOrder(double alpha);
    double value() const { return alpha_; }

private:
    double alpha_;
};

/// Grunwald-Letnikov binomial weights w_j = (-1)^j * C(alpha, j), j = 0..M.
/// Immutable after construction; safe to share across threads.
struct GlWeights {
    FracOrder alpha;
    Eigen::VectorXd weights;  // length memory_len + 1
    int memory_len;
};

/// Ring buffer of signal samples ordered newest-first.
///
/// Missing history (indices past the last stored sample) reads as the
/// oldest stored value, i.e. the signal is extended as a constant before
/// its first sample. Single-writer; not shareable while mutated.
class HistoryBuffer {
public:
    HistoryBuffer(int capacity, double step_s);

    void push(double value);
    /// j-th newest sample; j beyond the stored range returns the oldest
    /// stored sample (constant extension). Throws if empty.
    double padded(int j) const;
    int size() const { return size_; }
    int capacity() const { return static_cast<int>(samples_.size()); }
    double step_s() const { return step_s_; }
    bool empty() const { return size_ == 0; }

private:
    std::vector<double> samples_;  // ring, head_ = newest
    int head_ = 0;
    int size_ = 0;
    double step_s_;
};

/// Weights via the recurrence w_0 = 1, w_j = w_{j-1} * (1 - (alpha+1)/j).
GlWeights gl_weights(FracOrder alpha, int memory_len);

/// Truncated-memory GL fractional derivative of the buffered signal at the
/// newest sample:
///
///   D^a x(t) ~= T^-a * sum_{j=0..M} w_j * (x(t - jT) - x_ref)
///
/// where x_ref is the oldest sample in the M+1 window (or the constant
/// extension value when fewer samples exist). Subtracting x_ref is exactly
/// the truncated sum under constant extension of the signal over the whole
/// past, since sum_{j=0..inf} w_j = 0; it makes a constant signal have zero
/// derivative, so truncation introduces no startup transient.
double gl_derivative(const HistoryBuffer& history, const GlWeights& weights);

/// Constant-phase-element impedance 1 / (q * (i*omega)^alpha).
/// Phase is -alpha*pi/2: alpha = 1 is an ideal capacitor, alpha = 0.5 the
/// Warburg element.
std::complex<double> cpe_impedance(double q, FracOrder alpha, double omega);

}  // namespace fracsoc

#endif
