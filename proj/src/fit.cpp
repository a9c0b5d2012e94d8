#include "equiheat/fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "equiheat/errors.hpp"

namespace equiheat {

PowerLawFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& rel_sigma, bool with_log_factor) {
  const int n = static_cast<int>(t.size());
  if (n < 3 || y.size() != t.size())
    throw DomainError("fit_power_law: need at least 3 matching (t, y) points");
  const int p = with_log_factor ? 3 : 2;

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd b(n);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    if (t[i] <= 0.0 || y[i] <= 0.0)
      throw DomainError("fit_power_law: t and y must be positive");
    X(i, 0) = 1.0;
    X(i, 1) = -std::log(t[i]);
    if (with_log_factor) {
      double ll = std::log(1.0 / t[i]);
      if (ll <= 1.0) ll = 1.0 + 1e-9;  // keep log log defined on the coarse end
      X(i, 2) = std::log(ll);
    }
    b(i) = std::log(y[i]);
    double s = (i < static_cast<int>(rel_sigma.size()) && rel_sigma[i] > 0.0) ? rel_sigma[i] : 1.0;
    w(i) = 1.0 / (s * s);
  }

  Eigen::MatrixXd Xw = w.cwiseSqrt().asDiagonal() * X;
  Eigen::VectorXd bw = w.cwiseSqrt().asDiagonal() * b;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xw, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double cond = svd.singularValues()(0) / svd.singularValues()(p - 1);
  if (!std::isfinite(cond) || cond > 1e12)
    throw NumericError("fit_power_law: ill-conditioned design matrix, cond = " +
                       std::to_string(cond));
  Eigen::VectorXd theta = svd.solve(bw);

  Eigen::VectorXd r = bw - Xw * theta;
  double dof = std::max(1, n - p);
  double s2 = r.squaredNorm() / dof;
  Eigen::MatrixXd cov = s2 * (Xw.transpose() * Xw).inverse();

  PowerLawFit f;
  f.with_log_factor = with_log_factor;
  f.coefficient = std::exp(theta(0));
  f.alpha = theta(1);
  f.log_power = with_log_factor ? theta(2) : 0.0;
  f.coefficient_sigma = f.coefficient * std::sqrt(cov(0, 0));
  f.alpha_sigma = std::sqrt(cov(1, 1));
  f.log_power_sigma = with_log_factor ? std::sqrt(cov(2, 2)) : 0.0;
  f.residual_norm = std::sqrt(r.squaredNorm() / n);
  f.condition_number = cond;
  return f;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size()) throw DomainError("fit_line: need >= 2 points");
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = x[i];
    b(i) = y[i];
  }
  Eigen::Vector2d theta = (X.transpose() * X).ldlt().solve(X.transpose() * b);
  Eigen::VectorXd r = b - X * theta;
  double s2 = r.squaredNorm() / std::max(1, n - 2);
  Eigen::Matrix2d cov = s2 * (X.transpose() * X).inverse();
  LineFit f;
  f.intercept = theta(0);
  f.slope = theta(1);
  f.intercept_sigma = std::sqrt(cov(0, 0));
  f.slope_sigma = std::sqrt(cov(1, 1));
  f.residual_norm = std::sqrt(r.squaredNorm() / n);
  return f;
}

}  // namespace equiheat
