#include "cacs/mask_ops.hpp"

#include <algorithm>
#include <cstdlib>

namespace cacs {

StructuringElement StructuringElement::ball(int radius) {
  // radius 0 is the identity dilation (center offset only)
  if (radius < 0)
    throw Error(errc::spec_error, "structuring-element radius must be >= 0");
  return {Kind::ball, radius};
}

std::vector<Eigen::Vector3i> StructuringElement::offsets() const {
  std::vector<Eigen::Vector3i> out;
  switch (kind) {
    case Kind::face6:
      out = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
             {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
      break;
    case Kind::full26:
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) out.push_back({dx, dy, dz});
      break;
    case Kind::ball:
      // L1 ball: ball(1) coincides with the face-6 neighborhood.
      for (int dz = -radius; dz <= radius; ++dz)
        for (int dy = -radius; dy <= radius; ++dy)
          for (int dx = -radius; dx <= radius; ++dx)
            if (std::abs(dx) + std::abs(dy) + std::abs(dz) <= radius)
              out.push_back({dx, dy, dz});
      break;
  }
  return out;
}

LabelMask mask_union(const LabelMask& a, const LabelMask& b) {
  require_same_geometry(a, b, "mask_union");
  LabelMask out = make_like<std::int32_t>(a);
  out.data = a.data.max(b.data);
  return out;
}

LabelMask mask_intersect(const LabelMask& a, const LabelMask& b) {
  require_same_geometry(a, b, "mask_intersect");
  LabelMask out = make_like<std::int32_t>(a);
  out.data = a.data.min(b.data);
  return out;
}

LabelMask dilate(const LabelMask& m, const StructuringElement& se) {
  LabelMask out = make_like<std::int32_t>(m);
  const auto offsets = se.offsets();
  for (int k = 0; k < m.dims.z(); ++k)
    for (int j = 0; j < m.dims.y(); ++j)
      for (int i = 0; i < m.dims.x(); ++i) {
        if (m.at(i, j, k) == 0) continue;
        for (const auto& d : offsets) {
          const int x = i + d.x(), y = j + d.y(), z = k + d.z();
          if (out.in_bounds(x, y, z)) out.at(x, y, z) = 1;
        }
      }
  return out;
}

LabelMask negate(const LabelMask& m) {
  LabelMask out = make_like<std::int32_t>(m);
  out.data = 1 - m.data;
  return out;
}

namespace {

using Point2 = Eigen::Vector2<long>;  // (i, j), exact integer arithmetic

long cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Monotone chain; returns the hull counter-clockwise without repeating the
// first vertex. Collinear input collapses to fewer than 3 vertices.
std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) { return a == b; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;

  std::vector<Point2> hull(2 * n);
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = h + 1; i-- > 0;) {  // upper
    while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  return hull;
}

bool inside_hull(const std::vector<Point2>& hull, const Point2& p) {
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i)
    if (cross(hull[i], hull[(i + 1) % n], p) < 0) return false;
  return true;  // boundary inclusive
}

}  // namespace

LabelMask convex_hull_slicewise(const LabelMask& m) {
  LabelMask out = make_like<std::int32_t>(m);
  for (int k = 0; k < m.dims.z(); ++k) {
    std::vector<Point2> pts;
    long min_i = m.dims.x(), max_i = -1, min_j = m.dims.y(), max_j = -1;
    for (int j = 0; j < m.dims.y(); ++j)
      for (int i = 0; i < m.dims.x(); ++i)
        if (m.at(i, j, k) != 0) {
          pts.push_back({i, j});
          min_i = std::min<long>(min_i, i);
          max_i = std::max<long>(max_i, i);
          min_j = std::min<long>(min_j, j);
          max_j = std::max<long>(max_j, j);
        }

    const auto hull = convex_hull(pts);
    if (hull.size() < 3) {
      // Degenerate slice (empty, single point, or collinear): keep as-is.
      out.slice(k) = m.slice(k);
      continue;
    }
    for (long j = min_j; j <= max_j; ++j)
      for (long i = min_i; i <= max_i; ++i)
        if (inside_hull(hull, {i, j}))
          out.at(static_cast<int>(i), static_cast<int>(j), k) = 1;
  }
  return out;
}

LabelMask build_cardiac_roi(const OrganMasks& organs, int dilation_radius) {
  require_same_geometry(organs.heart, organs.aorta, "build_cardiac_roi");
  require_same_geometry(organs.heart, organs.lungs, "build_cardiac_roi");
  const LabelMask core =
      dilate(mask_union(organs.heart, organs.aorta),
             StructuringElement::ball(dilation_radius));
  return mask_intersect(convex_hull_slicewise(core), negate(organs.lungs));
}

}  // namespace cacs
