#include "cacs/lesion.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace cacs {

LabelMask threshold_mask(const Volume& v, double threshold_hu) {
  LabelMask out = make_like<std::int32_t>(v);
  out.data = (v.data >= static_cast<float>(threshold_hu)).cast<std::int32_t>();
  return out;
}

namespace {

// Union-find over provisional labels.
class DisjointSet {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

}  // namespace

LabelMask connected_components(const LabelMask& binary, Connectivity conn) {
  LabelMask out = make_like<std::int32_t>(binary);

  // Backward neighbors: already-scanned voxels in (k, j, i ascending) order.
  std::vector<Eigen::Vector3i> back;
  if (conn == Connectivity::face6) {
    back = {{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  } else {
    for (int dz = -1; dz <= 0; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dz == 0 && (dy > 0 || (dy == 0 && dx >= 0))) continue;
          back.push_back({dx, dy, dz});
        }
  }

  DisjointSet sets;
  std::vector<int> provisional(static_cast<std::size_t>(binary.size()), -1);

  for (int k = 0; k < binary.dims.z(); ++k)
    for (int j = 0; j < binary.dims.y(); ++j)
      for (int i = 0; i < binary.dims.x(); ++i) {
        if (binary.at(i, j, k) == 0) continue;
        const Eigen::Index idx = binary.index(i, j, k);
        int label = -1;
        for (const auto& d : back) {
          const int x = i + d.x(), y = j + d.y(), z = k + d.z();
          if (!binary.in_bounds(x, y, z)) continue;
          const int nb = provisional[binary.index(x, y, z)];
          if (nb < 0) continue;
          if (label < 0)
            label = sets.find(nb);
          else
            sets.unite(label, nb);
        }
        if (label < 0) label = sets.make();
        provisional[idx] = label;
      }

  // Final labels follow first-encounter order of the resolved roots.
  std::map<int, int> final_label;
  int next = 0;
  for (Eigen::Index idx = 0; idx < binary.size(); ++idx) {
    if (provisional[idx] < 0) continue;
    const int root = sets.find(provisional[idx]);
    auto [it, inserted] = final_label.try_emplace(root, 0);
    if (inserted) it->second = ++next;
    out.data[idx] = it->second;
  }
  return out;
}

std::vector<Lesion> extract_lesions(const Volume& v, const LabelMask& labels) {
  require_same_geometry(v, labels, "extract_lesions");

  std::map<int, Lesion> by_id;
  std::map<int, std::map<int, std::pair<int, double>>> slices;  // id -> k -> (count, peak)

  for (int k = 0; k < labels.dims.z(); ++k)
    for (int j = 0; j < labels.dims.y(); ++j)
      for (int i = 0; i < labels.dims.x(); ++i) {
        const int id = labels.at(i, j, k);
        if (id == 0) continue;
        const double hu = v.at(i, j, k);

        Lesion& lesion = by_id[id];
        lesion.id = id;
        lesion.voxels.push_back({i, j, k});
        lesion.centroid += Eigen::Vector3d(i, j, k);

        auto& [count, peak] = slices[id][k];
        if (count == 0 || hu > peak) peak = hu;
        ++count;
      }

  const double voxel_volume = v.voxel_volume_mm3();
  const double pixel_area = v.pixel_area_mm2();

  std::vector<Lesion> out;
  out.reserve(by_id.size());
  for (auto& [id, lesion] : by_id) {
    lesion.volume_mm3 = static_cast<double>(lesion.voxels.size()) * voxel_volume;
    lesion.centroid /= static_cast<double>(lesion.voxels.size());
    double peak = std::numeric_limits<double>::lowest();
    for (const auto& [k, entry] : slices[id]) {
      lesion.per_slice.push_back({k, entry.first * pixel_area, entry.second});
      peak = std::max(peak, entry.second);
    }
    lesion.peak_hu = peak;
    out.push_back(std::move(lesion));
  }
  return out;
}

std::vector<Lesion> filter_min_size(std::vector<Lesion> lesions,
                                    int min_voxels) {
  std::erase_if(lesions, [min_voxels](const Lesion& l) {
    return static_cast<int>(l.voxels.size()) < min_voxels;
  });
  return lesions;
}

}  // namespace cacs
