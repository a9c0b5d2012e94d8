#pragma once

#include <vector>

namespace equiheat {

/// Result of a weighted least-squares fit of log y = log c - alpha log t
/// (+ beta log log(1/t) when the log-corrected model order is requested).
struct PowerLawFit {
  double alpha = 0.0;           ///< power-law exponent estimate
  double coefficient = 0.0;     ///< c estimate
  double log_power = 0.0;       ///< beta estimate (0 when not fitted)
  double alpha_sigma = 0.0;     ///< 1-sigma uncertainty from normal equations
  double coefficient_sigma = 0.0;
  double log_power_sigma = 0.0;
  double residual_norm = 0.0;   ///< weighted RMS residual in log space
  double condition_number = 0.0;
  bool with_log_factor = false;
};

/// Weighted LS fit on (t_i, y_i) with optional per-point relative
/// uncertainties (inverse-variance weights in log space). Throws
/// NumericError when the design matrix is ill-conditioned; the message
/// carries the condition number.
PowerLawFit fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& rel_sigma, bool with_log_factor);

/// Straight-line LS fit y = a + b x; returns {a, b, sigma_a, sigma_b}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_sigma = 0.0;
  double slope_sigma = 0.0;
  double residual_norm = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace equiheat
