#include "cacs/detect.hpp"

#include <algorithm>
#include <vector>

#include "cacs/lesion.hpp"
#include "cacs/mask_ops.hpp"

namespace cacs {

namespace {

// Remove components smaller than min_voxels and relabel the survivors
// contiguously 1..C in scan order.
LabelMask drop_small_components(const LabelMask& labeled, int min_voxels) {
  int max_label = 0;
  for (Eigen::Index i = 0; i < labeled.size(); ++i)
    max_label = std::max(max_label, labeled.data[i]);

  std::vector<long> counts(static_cast<std::size_t>(max_label) + 1, 0);
  for (Eigen::Index i = 0; i < labeled.size(); ++i)
    ++counts[labeled.data[i]];

  std::vector<std::int32_t> remap(counts.size(), 0);
  int next = 0;
  for (std::size_t label = 1; label < counts.size(); ++label)
    if (counts[label] >= min_voxels) remap[label] = ++next;

  LabelMask out = make_like<std::int32_t>(labeled);
  for (Eigen::Index i = 0; i < labeled.size(); ++i)
    out.data[i] = remap[labeled.data[i]];
  return out;
}

}  // namespace

LabelMask detect_classical(const Volume& v, const LabelMask& roi,
                           double threshold_hu, int min_voxels) {
  require_same_geometry(v, roi, "detect_classical");
  const LabelMask candidates =
      mask_intersect(threshold_mask(v, threshold_hu), roi);
  return drop_small_components(
      connected_components(candidates, Connectivity::full26), min_voxels);
}

LabelMask ingest_predictions(const LabelMask& external, int min_voxels) {
  LabelMask binary = make_like<std::int32_t>(external);
  binary.data = (external.data != 0).cast<std::int32_t>();
  return drop_small_components(
      connected_components(binary, Connectivity::full26), min_voxels);
}

LabelMask ingest_predictions(const LabelMask& external, const Volume& study,
                             int min_voxels) {
  require_same_geometry(external, study, "ingest_predictions");
  return ingest_predictions(external, min_voxels);
}

}  // namespace cacs
