#include "cacs/agatston.hpp"

namespace cacs {

std::string_view to_string(RiskCategory c) {
  switch (c) {
    case RiskCategory::zero: return "zero";
    case RiskCategory::minimal: return "minimal";
    case RiskCategory::mild: return "mild";
    case RiskCategory::moderate: return "moderate";
    case RiskCategory::severe: return "severe";
  }
  return "zero";
}

int density_weight(double peak_hu) {
  if (peak_hu >= 400.0) return 4;
  if (peak_hu >= 300.0) return 3;
  if (peak_hu >= 200.0) return 2;
  if (peak_hu >= 130.0) return 1;
  return 0;
}

double lesion_score(const Lesion& lesion, double slice_thickness_mm) {
  // Lesion identity is 3D but each axial cross-section contributes its own
  // area times the weight of the slice-local peak.
  double sum = 0.0;
  for (const auto& s : lesion.per_slice)
    sum += s.area_mm2 * density_weight(s.peak_hu);
  return (slice_thickness_mm / kReferenceSliceThicknessMm) * sum;
}

AgatstonReport total_score(const Volume& v, const LabelMask& labels,
                           double threshold_hu) {
  require_same_geometry(v, labels, "total_score");

  AgatstonReport report;
  report.slice_thickness_mm = v.spacing.z();
  report.threshold_hu = threshold_hu;

  // extract_lesions returns ascending id; summing in that order keeps the
  // total bit-stable.
  for (const Lesion& lesion : extract_lesions(v, labels)) {
    const double score = lesion_score(lesion, report.slice_thickness_mm);
    report.per_lesion.emplace_back(lesion.id, score);
    report.total += score;
  }
  report.category = risk_category(report.total);
  return report;
}

RiskCategory risk_category(double total) {
  if (total <= 0.0) return RiskCategory::zero;
  if (total <= 10.0) return RiskCategory::minimal;
  if (total <= 100.0) return RiskCategory::mild;
  if (total <= 400.0) return RiskCategory::moderate;
  return RiskCategory::severe;
}

}  // namespace cacs
