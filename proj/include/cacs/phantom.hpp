#ifndef CACS_PHANTOM_HPP
#define CACS_PHANTOM_HPP

#include <cstdint>
#include <vector>

#include "cacs/agatston.hpp"
#include "cacs/volume.hpp"

namespace cacs::phantom {

// Axis-aligned voxel box, [lo, hi) along each axis.
struct Box {
  Eigen::Vector3i lo{0, 0, 0};
  Eigen::Vector3i hi{0, 0, 0};
};

// One planted ellipsoidal lesion: a voxel belongs to it iff its center
// satisfies the ellipsoid inequality around the given center voxel.
struct LesionSpec {
  Eigen::Vector3i center{0, 0, 0};
  Eigen::Vector3d radii{1.0, 1.0, 1.0};  // voxels per axis, > 0
  double hu = 300.0;                     // >= 130
};

struct PhantomSpec {
  Eigen::Vector3i dims{0, 0, 0};
  Eigen::Vector3d spacing{0.5, 0.5, 3.0};
  double background_hu = 40.0;
  std::vector<LesionSpec> lesions;
  Box heart;
  Box aorta;
  std::vector<Box> lungs;
  double noise_sigma_hu = 0.0;
  int motion_blur = 0;  // in-plane box-blur half-width
  std::uint64_t seed = 0;
};

struct PhantomOutput {
  Volume volume;          // with blur and noise applied, in that order
  LabelMask ground_truth;  // lesions labeled 1..L in spec order
  OrganMasks organs;
  AgatstonReport expected;  // computed from the planted sets, pre-noise
};

// Build the phantom. The expected report is derived directly from the
// planted voxel sets, independent of the detection/scoring pipeline, so it
// serves as an analytic oracle. Ground truth and expected scores do not
// depend on seed, noise, or blur. Throws spec_error for out-of-bounds
// geometry or lesions that overlap or touch under 26-connectivity.
PhantomOutput generate(const PhantomSpec& spec);

// Additive Gaussian noise, deterministic per seed; sigma 0 is the identity.
Volume add_noise(const Volume& v, double sigma_hu, std::uint64_t seed);

// In-plane 1D box blur of width 2*half_width+1 along a per-slice
// pseudo-random axis (x or y); the window averages in-bounds samples only.
// half_width 0 is the identity.
Volume add_motion_blur(const Volume& v, int half_width, std::uint64_t seed);

}  // namespace cacs::phantom

#endif  // CACS_PHANTOM_HPP
