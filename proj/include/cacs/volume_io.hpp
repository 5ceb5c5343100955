#ifndef CACS_VOLUME_IO_HPP
#define CACS_VOLUME_IO_HPP

#include <string_view>

#include "cacs/volume.hpp"

namespace cacs {

// Resample along the axial (z) axis to the given slice thickness.
// In-plane geometry is unchanged; the slice count becomes
// max(1, round(nz * dz / target)). Values are linearly interpolated at the
// output slice centers, with centers at (k + 0.5) * dz from the volume
// start; centers outside the input extent clamp to the nearest slice.
// A target equal to the input z-spacing is a voxel-exact identity.
Volume resample_axial(const Volume& v, double target_thickness_mm);

// Build a label mask from a plaque-coordinate XML document:
//   <plaques><lesion id="1"><voxel x="I" y="J" z="K"/>...</lesion>...</plaques>
// with 0-based voxel indices. Lesion k in document order gets label k
// (1-based); the id attribute must be an integer but does not drive
// labeling. Throws schema_error, out_of_bounds, or duplicate_voxel.
LabelMask ingest_xml_ground_truth(std::string_view xml, const Volume& geometry);

}  // namespace cacs

#endif  // CACS_VOLUME_IO_HPP
