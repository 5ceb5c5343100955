#ifndef CACS_DETECT_HPP
#define CACS_DETECT_HPP

#include "cacs/volume.hpp"

namespace cacs {

// Classical baseline detector: threshold the volume, restrict to the ROI,
// label 26-connected components, drop components smaller than min_voxels,
// and relabel contiguously 1..C in scan order.
LabelMask detect_classical(const Volume& v, const LabelMask& roi,
                           double threshold_hu = 130.0, int min_voxels = 3);

// Normalize an externally produced prediction mask so lesion identity
// matches the internal detector: binarize any nonzero voxel, relabel by
// 26-connected components, apply the minimum-size filter. No ROI is
// applied.
LabelMask ingest_predictions(const LabelMask& external, int min_voxels = 3);

// Same, with a geometry check against the paired study volume.
LabelMask ingest_predictions(const LabelMask& external, const Volume& study,
                             int min_voxels = 3);

}  // namespace cacs

#endif  // CACS_DETECT_HPP
