#ifndef CACS_LESION_HPP
#define CACS_LESION_HPP

#include <vector>

#include "cacs/volume.hpp"

namespace cacs {

enum class Connectivity { face6, full26 };

struct LesionSlice {
  int k = 0;             // axial slice index
  double area_mm2 = 0.0;  // in-plane voxel count * sx * sy
  double peak_hu = 0.0;   // maximum HU on this slice
};

// One connected calcific component.
struct Lesion {
  int id = 0;
  std::vector<Eigen::Vector3i> voxels;
  double volume_mm3 = 0.0;
  std::vector<LesionSlice> per_slice;  // ascending k, only occupied slices
  double peak_hu = 0.0;
  Eigen::Vector3d centroid{0.0, 0.0, 0.0};  // voxel coordinates
};

// Binary mask of voxels with HU >= threshold (boundary inclusive).
LabelMask threshold_mask(const Volume& v, double threshold_hu);

// Label maximal connected sets of a binary mask. Components are numbered
// 1..C by first-encountered voxel in scan order (k, then j, then i
// ascending); background stays 0.
LabelMask connected_components(const LabelMask& binary, Connectivity conn);

// One Lesion per distinct nonzero label, ascending id.
std::vector<Lesion> extract_lesions(const Volume& v, const LabelMask& labels);

// Keep lesions with at least min_voxels voxels.
std::vector<Lesion> filter_min_size(std::vector<Lesion> lesions,
                                    int min_voxels);

}  // namespace cacs

#endif  // CACS_LESION_HPP
