#include "cacs/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "cacs/rng.hpp"

namespace cacs::phantom {

namespace {

void check_box(const Box& box, const Eigen::Vector3i& dims, const char* name) {
  for (int a = 0; a < 3; ++a) {
    if (box.lo[a] < 0 || box.hi[a] > dims[a] || box.lo[a] > box.hi[a])
      throw Error(errc::spec_error,
                  std::string(name) + " box exceeds the volume bounds");
  }
}

void fill_box(LabelMask& mask, const Box& box) {
  for (int k = box.lo.z(); k < box.hi.z(); ++k)
    for (int j = box.lo.y(); j < box.hi.y(); ++j)
      for (int i = box.lo.x(); i < box.hi.x(); ++i) mask.at(i, j, k) = 1;
}

// Voxel-center ellipsoid inclusion; no anti-aliasing, so planted sets (and
// their scores) are exactly enumerable.
std::vector<Eigen::Vector3i> ellipsoid_voxels(const LesionSpec& lesion,
                                              const Eigen::Vector3i& dims,
                                              int index) {
  for (int a = 0; a < 3; ++a)
    if (!(lesion.radii[a] > 0.0))
      throw Error(errc::spec_error, "lesion " + std::to_string(index) +
                                        " has a non-positive radius");
  if (lesion.hu < 130.0)
    throw Error(errc::spec_error, "lesion " + std::to_string(index) +
                                      " HU must be >= 130");

  std::vector<Eigen::Vector3i> voxels;
  const Eigen::Vector3i lo = (lesion.center.cast<double>() - lesion.radii)
                                 .array()
                                 .floor()
                                 .cast<int>()
                                 .matrix();
  const Eigen::Vector3i hi = (lesion.center.cast<double>() + lesion.radii)
                                 .array()
                                 .ceil()
                                 .cast<int>()
                                 .matrix();
  for (int k = lo.z(); k <= hi.z(); ++k)
    for (int j = lo.y(); j <= hi.y(); ++j)
      for (int i = lo.x(); i <= hi.x(); ++i) {
        const Eigen::Vector3d d =
            (Eigen::Vector3d(i, j, k) - lesion.center.cast<double>())
                .cwiseQuotient(lesion.radii);
        if (d.squaredNorm() > 1.0) continue;
        if (i < 0 || i >= dims.x() || j < 0 || j >= dims.y() || k < 0 ||
            k >= dims.z())
          throw Error(errc::spec_error, "lesion " + std::to_string(index) +
                                            " extends outside the volume");
        voxels.push_back({i, j, k});
      }
  return voxels;
}

// Score one planted lesion straight from its voxel list. Kept independent
// of the scoring pipeline so the phantom can act as its oracle; the weight
// bins are the standard 130/200/300/400 table.
double planted_score(const std::vector<Eigen::Vector3i>& voxels, double hu,
                     const Eigen::Vector3d& spacing) {
  std::map<int, int> per_slice_count;
  for (const auto& v : voxels) ++per_slice_count[v.z()];

  const int weight = hu >= 400.0 ? 4 : hu >= 300.0 ? 3 : hu >= 200.0 ? 2
                     : hu >= 130.0 ? 1 : 0;
  const double pixel_area = spacing.x() * spacing.y();
  double sum = 0.0;
  for (const auto& [k, count] : per_slice_count)
    sum += count * pixel_area * weight;
  return (spacing.z() / 3.0) * sum;
}

}  // namespace

PhantomOutput generate(const PhantomSpec& spec) {
  for (int a = 0; a < 3; ++a)
    if (spec.dims[a] < 1)
      throw Error(errc::spec_error, "phantom dims must be positive");
  for (int a = 0; a < 3; ++a)
    if (!(spec.spacing[a] > 0.0))
      throw Error(errc::spec_error, "phantom spacing must be positive");
  if (spec.noise_sigma_hu < 0.0)
    throw Error(errc::spec_error, "noise sigma must be non-negative");
  if (spec.motion_blur < 0)
    throw Error(errc::spec_error, "motion-blur half-width must be >= 0");

  check_box(spec.heart, spec.dims, "heart");
  check_box(spec.aorta, spec.dims, "aorta");
  for (const auto& lung : spec.lungs) check_box(lung, spec.dims, "lung");

  PhantomOutput out;
  out.volume = Volume(spec.dims, spec.spacing);
  out.volume.data.setConstant(static_cast<float>(spec.background_hu));
  out.ground_truth = make_like<std::int32_t>(out.volume);

  out.organs.heart = make_like<std::int32_t>(out.volume);
  out.organs.aorta = make_like<std::int32_t>(out.volume);
  out.organs.lungs = make_like<std::int32_t>(out.volume);
  fill_box(out.organs.heart, spec.heart);
  fill_box(out.organs.aorta, spec.aorta);
  for (const auto& lung : spec.lungs) fill_box(out.organs.lungs, lung);

  out.expected.slice_thickness_mm = spec.spacing.z();
  out.expected.threshold_hu = 130.0;

  std::vector<std::vector<Eigen::Vector3i>> planted;
  for (std::size_t n = 0; n < spec.lesions.size(); ++n) {
    const auto& lesion = spec.lesions[n];
    auto voxels = ellipsoid_voxels(lesion, spec.dims, static_cast<int>(n + 1));
    const int label = static_cast<int>(n + 1);

    for (const auto& v : voxels) {
      // Distinctness guard: no voxel of an earlier lesion within the
      // 26-neighborhood, or planted components would merge.
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = v.x() + dx, y = v.y() + dy, z = v.z() + dz;
            if (!out.ground_truth.in_bounds(x, y, z)) continue;
            const int other = out.ground_truth.at(x, y, z);
            if (other != 0 && other != label)
              throw Error(errc::spec_error,
                          "lesions " + std::to_string(other) + " and " +
                              std::to_string(label) +
                              " overlap or touch under 26-connectivity");
          }
      out.ground_truth.at(v.x(), v.y(), v.z()) = label;
      out.volume.at(v.x(), v.y(), v.z()) = static_cast<float>(lesion.hu);
    }

    const double score = planted_score(voxels, lesion.hu, spec.spacing);
    out.expected.per_lesion.emplace_back(label, score);
    out.expected.total += score;
    planted.push_back(std::move(voxels));
  }
  out.expected.category = risk_category(out.expected.total);

  // Acquisition artifacts touch the volume only: expected scores and the
  // ground truth stay noise-free.
  if (spec.motion_blur > 0)
    out.volume = add_motion_blur(out.volume, spec.motion_blur, spec.seed + 1);
  if (spec.noise_sigma_hu > 0.0)
    out.volume = add_noise(out.volume, spec.noise_sigma_hu, spec.seed);

  return out;
}

Volume add_noise(const Volume& v, double sigma_hu, std::uint64_t seed) {
  if (sigma_hu < 0.0)
    throw Error(errc::spec_error, "noise sigma must be non-negative");
  if (sigma_hu == 0.0) return v;

  Volume out = v;
  GaussianSampler rng(seed);
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out.data[i] += static_cast<float>(sigma_hu * rng.next());
  return out;
}

Volume add_motion_blur(const Volume& v, int half_width, std::uint64_t seed) {
  if (half_width < 0)
    throw Error(errc::spec_error, "blur half-width must be >= 0");
  if (half_width == 0) return v;

  Volume out = v;
  GaussianSampler rng(seed);
  for (int k = 0; k < v.dims.z(); ++k) {
    const bool along_x = (rng.bits() & 1) != 0;
    const int nx = v.dims.x(), ny = v.dims.y();
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double sum = 0.0;
        int count = 0;
        for (int d = -half_width; d <= half_width; ++d) {
          const int x = along_x ? i + d : i;
          const int y = along_x ? j : j + d;
          if (x < 0 || x >= nx || y < 0 || y >= ny) continue;
          sum += v.at(x, y, k);
          ++count;
        }
        out.at(i, j, k) = static_cast<float>(sum / count);
      }
  }
  return out;
}

}  // namespace cacs::phantom
