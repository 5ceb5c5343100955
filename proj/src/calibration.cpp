#include "cacs/calibration.hpp"

#include <cmath>

#include "cacs/error.hpp"

namespace cacs {

CalibrationModel fit_linear(std::span<const ScorePair> pairs) {
  const auto n = static_cast<double>(pairs.size());
  if (pairs.size() < 2)
    throw Error(errc::degenerate_input, "linear fit needs at least 2 pairs");

  double mean_m = 0.0, mean_a = 0.0;
  for (const auto& p : pairs) {
    mean_m += p.manual;
    mean_a += p.automated;
  }
  mean_m /= n;
  mean_a /= n;

  double var_m = 0.0, cov = 0.0, var_a = 0.0;
  for (const auto& p : pairs) {
    const double dm = p.manual - mean_m;
    const double da = p.automated - mean_a;
    var_m += dm * dm;
    cov += dm * da;
    var_a += da * da;
  }
  if (var_m == 0.0)
    throw Error(errc::degenerate_input,
                "manual values are all identical; slope is undefined");

  CalibrationModel model;
  model.slope = cov / var_m;
  model.intercept = mean_a - model.slope * mean_m;
  model.n = static_cast<int>(pairs.size());

  double ss_res = 0.0;
  for (const auto& p : pairs) {
    const double r = p.automated - (model.slope * p.manual + model.intercept);
    ss_res += r * r;
  }
  model.r2 = var_a > 0.0 ? 1.0 - ss_res / var_a : 1.0;
  return model;
}

double apply_correction(const CalibrationModel& model, double automated) {
  if (model.slope == 0.0)
    throw Error(errc::zero_slope, "cannot invert a zero-slope model");
  const double corrected = (automated - model.intercept) / model.slope;
  return corrected < 0.0 ? 0.0 : corrected;
}

BlandAltman bland_altman(std::span<const ScorePair> pairs) {
  if (pairs.size() < 2)
    throw Error(errc::degenerate_input,
                "Bland-Altman needs at least 2 pairs");

  BlandAltman ba;
  ba.points.reserve(pairs.size());
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double diff = p.automated - p.manual;
    ba.points.emplace_back((p.manual + p.automated) / 2.0, diff);
    sum += diff;
  }
  ba.mean_diff = sum / static_cast<double>(pairs.size());

  double ss = 0.0;
  for (const auto& [mean, diff] : ba.points)
    ss += (diff - ba.mean_diff) * (diff - ba.mean_diff);
  ba.sd_diff = std::sqrt(ss / static_cast<double>(pairs.size() - 1));
  ba.loa_low = ba.mean_diff - 1.96 * ba.sd_diff;
  ba.loa_high = ba.mean_diff + 1.96 * ba.sd_diff;
  return ba;
}

CalibrationModel default_model() {
  CalibrationModel model;
  model.slope = 0.841;
  model.intercept = 16.0;
  model.r2 = 0.97;
  return model;
}

}  // namespace cacs
