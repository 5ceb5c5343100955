#ifndef CACS_VOLUME_HPP
#define CACS_VOLUME_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "cacs/error.hpp"

namespace cacs {

// Orientation block carried through from a NIfTI-1 header. It is preserved
// verbatim on round-trip but never interpreted: all processing happens in
// stored voxel order.
struct Orientation {
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 0;
  float qfac = 0.0f;  // pixdim[0]
  float quatern_b = 0.0f, quatern_c = 0.0f, quatern_d = 0.0f;
  float srow_x[4] = {0, 0, 0, 0};
  float srow_y[4] = {0, 0, 0, 0};
  float srow_z[4] = {0, 0, 0, 0};
};

// Dense 3D grid over a regular lattice. Data is stored x-fastest, then y,
// then z (axial-slice-major), matching the NIfTI on-disk layout.
template <typename Scalar>
struct VoxelGrid {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Eigen::Vector3i dims{0, 0, 0};
  Eigen::Vector3d spacing{1.0, 1.0, 1.0};  // mm per voxel along x, y, axial z
  Eigen::Vector3d origin{0.0, 0.0, 0.0};   // mm, center of voxel (0,0,0)
  Orientation orientation{};
  Array data;

  VoxelGrid() = default;

  VoxelGrid(const Eigen::Vector3i& d, const Eigen::Vector3d& sp,
            const Eigen::Vector3d& org = Eigen::Vector3d::Zero())
      : dims(d), spacing(sp), origin(org) {
    data = Array::Zero(static_cast<Eigen::Index>(d.x()) * d.y() * d.z());
  }

  Eigen::Index size() const { return data.size(); }

  Eigen::Index index(int i, int j, int k) const {
    return static_cast<Eigen::Index>(i) +
           static_cast<Eigen::Index>(dims.x()) *
               (static_cast<Eigen::Index>(j) +
                static_cast<Eigen::Index>(dims.y()) * k);
  }

  Scalar& at(int i, int j, int k) { return data[index(i, j, k)]; }
  Scalar at(int i, int j, int k) const { return data[index(i, j, k)]; }

  bool in_bounds(int i, int j, int k) const {
    return i >= 0 && i < dims.x() && j >= 0 && j < dims.y() && k >= 0 &&
           k < dims.z();
  }

  // One axial slice as a flat array view of nx*ny coefficients.
  auto slice(int k) { return data.segment(plane() * k, plane()); }
  auto slice(int k) const { return data.segment(plane() * k, plane()); }
  Eigen::Index plane() const {
    return static_cast<Eigen::Index>(dims.x()) * dims.y();
  }

  double voxel_volume_mm3() const { return spacing.prod(); }
  double pixel_area_mm2() const { return spacing.x() * spacing.y(); }

  template <typename Other>
  bool same_geometry(const VoxelGrid<Other>& o) const {
    return dims == o.dims && spacing == o.spacing && origin == o.origin;
  }
};

using Volume = VoxelGrid<float>;       // attenuation in HU
using LabelMask = VoxelGrid<int32_t>;  // 0 = background, k > 0 = identity

// Binary organ segmentations sharing one geometry.
struct OrganMasks {
  LabelMask heart;
  LabelMask aorta;
  LabelMask lungs;
};

// Fresh zeroed grid with the geometry (and orientation) of another grid.
template <typename Scalar, typename Other>
VoxelGrid<Scalar> make_like(const VoxelGrid<Other>& g) {
  VoxelGrid<Scalar> out(g.dims, g.spacing, g.origin);
  out.orientation = g.orientation;
  return out;
}

template <typename A, typename B>
void require_same_geometry(const VoxelGrid<A>& a, const VoxelGrid<B>& b,
                           const char* what) {
  if (!a.same_geometry(b))
    throw Error(errc::geometry_mismatch,
                std::string(what) + ": grids have different geometry");
}

}  // namespace cacs

#endif  // CACS_VOLUME_HPP
