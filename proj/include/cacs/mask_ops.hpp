#ifndef CACS_MASK_OPS_HPP
#define CACS_MASK_OPS_HPP

#include <vector>

#include "cacs/volume.hpp"

namespace cacs {

// Morphology neighborhood. ball(r) is the L1 ball of the given radius, so
// ball(1) equals the face-6 neighborhood (7 offsets including the center);
// full26 is the 3x3x3 cube (27 offsets).
struct StructuringElement {
  enum class Kind { face6, full26, ball };

  Kind kind = Kind::face6;
  int radius = 1;

  static StructuringElement face6() { return {Kind::face6, 1}; }
  static StructuringElement full26() { return {Kind::full26, 1}; }
  static StructuringElement ball(int radius);

  std::vector<Eigen::Vector3i> offsets() const;
};

// Binary mask algebra. Inputs are binary (labels in {0,1}) on identical
// geometry; outputs carry the input geometry unchanged.
LabelMask mask_union(const LabelMask& a, const LabelMask& b);
LabelMask mask_intersect(const LabelMask& a, const LabelMask& b);
LabelMask dilate(const LabelMask& m, const StructuringElement& se);
LabelMask negate(const LabelMask& m);

// Per-axial-slice 2D convex hull fill: a voxel is set iff its center lies
// inside or on the hull of the slice's set voxel centers (boundary
// inclusive, exact integer arithmetic). Slices without 3 non-collinear
// voxels reproduce their input.
LabelMask convex_hull_slicewise(const LabelMask& m);

// Cardiac region of interest:
//   hull_slicewise(dilate(heart | aorta, ball(radius))) & ~lungs
LabelMask build_cardiac_roi(const OrganMasks& organs, int dilation_radius = 3);

}  // namespace cacs

#endif  // CACS_MASK_OPS_HPP
