#include "cacs/evaluation.hpp"

#include <cmath>
#include <map>

namespace cacs {

DetectionReport match_lesions(const LabelMask& pred, const LabelMask& gt) {
  require_same_geometry(pred, gt, "match_lesions");

  std::map<int, long> pred_size;
  std::map<int, long> gt_size;
  std::map<std::pair<int, int>, long> overlap;  // (pred id, gt id)

  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const int p = pred.data[i];
    const int g = gt.data[i];
    if (p > 0) ++pred_size[p];
    if (g > 0) ++gt_size[g];
    if (p > 0 && g > 0) ++overlap[{p, g}];
  }

  DetectionReport report;
  std::map<int, bool> gt_matched;
  for (const auto& [g, size] : gt_size) gt_matched[g] = false;

  for (const auto& [p, p_size] : pred_size) {
    int best_gt = 0;
    long best_overlap = 0;
    for (auto it = overlap.lower_bound({p, 0});
         it != overlap.end() && it->first.first == p; ++it) {
      gt_matched[it->first.second] = true;
      // Ties resolve to the smaller ground-truth id: map order visits
      // ascending ids, so only a strictly larger overlap replaces.
      if (it->second > best_overlap) {
        best_overlap = it->second;
        best_gt = it->first.second;
      }
    }
    if (best_overlap > 0) {
      ++report.tp;
      report.pairs.emplace_back(p, best_gt);
      report.dice_values.push_back(
          2.0 * static_cast<double>(best_overlap) /
          static_cast<double>(p_size + gt_size[best_gt]));
    } else {
      ++report.fp;
    }
  }

  for (const auto& [g, matched] : gt_matched)
    if (!matched) ++report.fn;

  const PrecisionRecall pr = aggregate_counts(report.tp, report.fp, report.fn);
  report.precision = pr.precision;
  report.recall = pr.recall;
  if (!report.dice_values.empty()) {
    const auto [mean, sd] = summarize_dice(report.dice_values);
    report.dice_mean = mean;
    report.dice_sd = sd;
  }
  return report;
}

std::pair<double, double> summarize_dice(std::span<const double> values) {
  if (values.empty())
    throw Error(errc::empty_input, "cannot summarize an empty Dice list");

  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());

  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

PrecisionRecall aggregate_counts(int tp, int fp, int fn) {
  PrecisionRecall out;
  if (tp + fp > 0)
    out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0)
    out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return out;
}

}  // namespace cacs
