#include "fracsoc/frac_calc.hpp"

#include <cmath>
#include <stdexcept>

namespace fracsoc {

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("FracOrder: alpha must lie in (0, 1]");
    }
}

HistoryBuffer::HistoryBuffer(int capacity, double step_s) : step_s_(step_s) {
    if (capacity < 1) throw std::invalid_argument("HistoryBuffer: capacity must be >= 1");
    if (!(step_s > 0.0)) throw std::invalid_argument("HistoryBuffer: step must be > 0");
    samples_.assign(static_cast<size_t>(capacity), 0.0);
}

void HistoryBuffer::push(double value) {
    head_ = (head_ + 1) % static_cast<int>(samples_.size());
    samples_[static_cast<size_t>(head_)] = value;
    if (size_ < static_cast<int>(samples_.size())) ++size_;
}

double HistoryBuffer::padded(int j) const {
    if (size_ == 0) throw std::domain_error("HistoryBuffer: empty");
    if (j < 0) throw std::invalid_argument("HistoryBuffer: negative index");
    if (j >= size_) j = size_ - 1;  // constant extension past the oldest sample
    const int n = static_cast<int>(samples_.size());
    return samples_[static_cast<size_t>((head_ - j % n + n) % n)];
}

GlWeights gl_weights(FracOrder alpha, int memory_len) {
    if (memory_len < 1) throw std::invalid_argument("gl_weights: memory_len must be >= 1");
    Eigen::VectorXd w(memory_len + 1);
    w[0] = 1.0;
    const double a = alpha.value();
    for (int j = 1; j <= memory_len; ++j) {
        w[j] = w[j - 1] * (1.0 - (a + 1.0) / j);
    }
    return GlWeights{alpha, std::move(w), memory_len};
}

double gl_derivative(const HistoryBuffer& history, const GlWeights& weights) {
    if (history.empty()) throw std::domain_error("gl_derivative: empty history");
    const int m = weights.memory_len;
    const double ref = history.padded(m);
    double acc = 0.0;
    for (int j = 0; j <= m; ++j) {
        acc += weights.weights[j] * (history.padded(j) - ref);
    }
    return acc / std::pow(history.step_s(), weights.alpha.value());
}

std::complex<double> cpe_impedance(double q, FracOrder alpha, double omega) {
    if (!(q > 0.0)) throw std::invalid_argument("cpe_impedance: q must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("cpe_impedance: omega must be > 0");
    const double a = alpha.value();
    // (i*omega)^a = omega^a * exp(i*a*pi/2)
    const std::complex<double> s_pow = std::polar(std::pow(omega, a), a * M_PI / 2.0);
    return 1.0 / (q * s_pow);
}

}  // namespace fracsoc
