#ifndef FRACSOC_METRICS_HPP
#define FRACSOC_METRICS_HPP

#include <Eigen/Dense>

namespace fracsoc {

struct MetricReport {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    long n = 0;
};

double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);
double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);
double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

MetricReport compute_metrics(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

}  // namespace fracsoc

#endif
