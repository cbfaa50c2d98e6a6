#include "fracsoc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fracsoc {

namespace {
void check(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    if (y.size() == 0) throw std::domain_error("metrics: empty sequences");
    if (y.size() != y_hat.size()) throw std::domain_error("metrics: length mismatch");
}
}  // namespace

double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    check(y, y_hat);
    return (y - y_hat).cwiseAbs().mean();
}

double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    check(y, y_hat);
    return (y - y_hat).squaredNorm() / static_cast<double>(y.size());
}

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    return std::sqrt(mse(y, y_hat));
}

MetricReport compute_metrics(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    MetricReport r;
    r.mae = mae(y, y_hat);
    r.mse = mse(y, y_hat);
    r.rmse = std::sqrt(r.mse);
    r.n = static_cast<long>(y.size());
    return r;
}

}  // namespace fracsoc
