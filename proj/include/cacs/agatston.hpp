#ifndef CACS_AGATSTON_HPP
#define CACS_AGATSTON_HPP

#include <string_view>
#include <utility>
#include <vector>

#include "cacs/lesion.hpp"
#include "cacs/volume.hpp"

namespace cacs {

inline constexpr double kCalciumThresholdHu = 130.0;
inline constexpr double kReferenceSliceThicknessMm = 3.0;

enum class RiskCategory { zero, minimal, mild, moderate, severe };

std::string_view to_string(RiskCategory c);

struct AgatstonReport {
  double total = 0.0;
  std::vector<std::pair<int, double>> per_lesion;  // (lesion id, score)
  RiskCategory category = RiskCategory::zero;
  double slice_thickness_mm = 0.0;
  double threshold_hu = kCalciumThresholdHu;
};

// Density weighting factor from peak attenuation:
// [130,200) -> 1, [200,300) -> 2, [300,400) -> 3, >= 400 -> 4, below -> 0.
int density_weight(double peak_hu);

// Per-lesion score: (thickness / 3 mm) * sum over occupied slices of
// slice area (mm^2) times the weight of the slice-local peak.
double lesion_score(const Lesion& lesion, double slice_thickness_mm);

// Score every labeled lesion; total is the sum in ascending lesion id.
AgatstonReport total_score(const Volume& v, const LabelMask& labels,
                           double threshold_hu = kCalciumThresholdHu);

// Conventional strata: 0 / (0,10] / (10,100] / (100,400] / >400.
RiskCategory risk_category(double total);

}  // namespace cacs

#endif  // CACS_AGATSTON_HPP
