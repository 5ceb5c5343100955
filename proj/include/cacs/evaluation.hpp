#ifndef CACS_EVALUATION_HPP
#define CACS_EVALUATION_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cacs/volume.hpp"

namespace cacs {

// Component-overlap detection metrics. A predicted component is a true
// positive iff it shares at least one voxel with any ground-truth
// component, a false positive otherwise; a ground-truth component with no
// predicted overlap is a false negative. Matching is many-to-one: each TP
// pairs with the ground-truth component of maximal intersection (ties to
// the smaller ground-truth id), and Dice is reported per pair.
struct DetectionReport {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::optional<double> precision;  // empty when tp + fp == 0
  std::optional<double> recall;     // empty when tp + fn == 0
  std::vector<double> dice_values;  // one per TP, ascending predicted id
  std::optional<double> dice_mean;
  std::optional<double> dice_sd;
  std::vector<std::pair<int, int>> pairs;  // (predicted id, ground-truth id)
};

// Distinct nonzero labels of each mask are its components.
DetectionReport match_lesions(const LabelMask& pred, const LabelMask& gt);

// Arithmetic mean and sample (n-1) standard deviation; a single value has
// sd 0. Throws empty_input on an empty list.
std::pair<double, double> summarize_dice(std::span<const double> values);

struct PrecisionRecall {
  std::optional<double> precision;
  std::optional<double> recall;
};

// tp/(tp+fp) and tp/(tp+fn); a zero denominator leaves the metric unset
// rather than reporting 0.
PrecisionRecall aggregate_counts(int tp, int fp, int fn);

}  // namespace cacs

#endif  // CACS_EVALUATION_HPP
