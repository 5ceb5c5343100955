#ifndef CACS_CALIBRATION_HPP
#define CACS_CALIBRATION_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cacs {

struct ScorePair {
  double manual = 0.0;
  double automated = 0.0;
};

// Ordinary least squares of automated on manual.
struct CalibrationModel {
  double slope = 1.0;
  double intercept = 0.0;
  std::optional<double> r2;
  std::optional<int> n;
};

struct BlandAltman {
  double mean_diff = 0.0;  // mean of automated - manual
  double sd_diff = 0.0;    // sample standard deviation of the differences
  double loa_low = 0.0;    // mean_diff - 1.96 * sd_diff
  double loa_high = 0.0;   // mean_diff + 1.96 * sd_diff
  std::vector<std::pair<double, double>> points;  // (pair mean, difference)
};

// slope = cov(m,a)/var(m), intercept = mean(a) - slope*mean(m),
// r2 = 1 - SSres/SStot. Throws degenerate_input for n < 2 or when the
// manual values have zero variance.
CalibrationModel fit_linear(std::span<const ScorePair> pairs);

// Invert the model to a manual-equivalent score: (automated - intercept) /
// slope, clamped at 0. Throws zero_slope.
double apply_correction(const CalibrationModel& model, double automated);

// Agreement statistics of automated - manual differences. Throws
// degenerate_input for n < 2.
BlandAltman bland_altman(std::span<const ScorePair> pairs);

// Coefficients shipped as the default correction model.
CalibrationModel default_model();

}  // namespace cacs

#endif  // CACS_CALIBRATION_HPP
