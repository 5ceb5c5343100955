#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cacs/mask_ops.hpp"
#include "oracles.hpp"

using namespace cacs;

TEST_CASE("structuring element cardinalities") {
  CHECK(StructuringElement::face6().offsets().size() == 7);
  CHECK(StructuringElement::full26().offsets().size() == 27);
  CHECK(StructuringElement::ball(1).offsets().size() == 7);
  CHECK(StructuringElement::ball(2).offsets().size() == 25);
  CHECK(StructuringElement::ball(0).offsets().size() == 1);
}

TEST_CASE("union of disjoint masks adds cardinalities") {
  const Eigen::Vector3i dims(6, 6, 3);
  const LabelMask a = oracle::mask_from(dims, {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}});
  const LabelMask b = oracle::mask_from(dims, {{5, 5, 0}, {4, 4, 1}});
  CHECK((mask_union(a, b).data != 0).count() == 5);
  CHECK((mask_union(a, a).data == a.data).all());
  const LabelMask empty(dims, {1.0, 1.0, 1.0});
  CHECK((mask_union(a, empty).data == a.data).all());
}

TEST_CASE("union requires identical geometry") {
  const LabelMask a({4, 4, 2}, {1.0, 1.0, 1.0});
  const LabelMask b({4, 4, 3}, {1.0, 1.0, 1.0});
  CHECK_THROWS_AS((void)mask_union(a, b), Error);
}

TEST_CASE("dilating a single voxel matches kernel cardinality") {
  const Eigen::Vector3i dims(7, 7, 7);
  const LabelMask center = oracle::mask_from(dims, {{3, 3, 3}});
  CHECK((dilate(center, StructuringElement::face6()).data != 0).count() == 7);
  CHECK((dilate(center, StructuringElement::full26()).data != 0).count() == 27);

  // corner voxel: offsets clip to the inside of the grid
  const LabelMask corner = oracle::mask_from(dims, {{0, 0, 0}});
  const LabelMask d = dilate(corner, StructuringElement::face6());
  long expected = 0;
  for (const auto& off : StructuringElement::face6().offsets())
    if (corner.in_bounds(off.x(), off.y(), off.z())) ++expected;
  CHECK(expected == 4);
  CHECK((d.data != 0).count() == expected);
}

TEST_CASE("negate complements within the grid") {
  const Eigen::Vector3i dims(5, 4, 3);
  const LabelMask m = oracle::random_mask(dims, 0.4, 99);
  const LabelMask n = negate(m);
  CHECK((n.data != 0).count() == m.size() - (m.data != 0).count());
  CHECK((negate(n).data == m.data).all());

  LabelMask full(dims, {1.0, 1.0, 1.0});
  full.data.setConstant(1);
  CHECK((negate(full).data == 0).all());
}

TEST_CASE("triangle slice fills to the lattice triangle") {
  const Eigen::Vector3i dims(8, 8, 1);
  const LabelMask m = oracle::mask_from(dims, {{0, 0, 0}, {4, 0, 0}, {0, 4, 0}});
  const LabelMask h = convex_hull_slicewise(m);

  // brute-force point-in-triangle over the slice lattice
  long count = 0;
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) {
      const bool inside = i >= 0 && j >= 0 && i + j <= 4;
      CHECK((h.at(i, j, 0) != 0) == inside);
      if (inside) ++count;
    }
  CHECK(count == 15);
  CHECK((h.data != 0).count() == 15);
}

TEST_CASE("filled rectangles and degenerate slices are hull fixed points") {
  LabelMask rect({8, 8, 2}, {1.0, 1.0, 1.0});
  for (int j = 2; j <= 5; ++j)
    for (int i = 1; i <= 6; ++i) rect.at(i, j, 0) = 1;
  // slice 1: two voxels only -> degenerate, unchanged
  rect.at(2, 2, 1) = 1;
  rect.at(6, 7, 1) = 1;

  const LabelMask h = convex_hull_slicewise(rect);
  CHECK((h.data == rect.data).all());
}

TEST_CASE("hull matches the gift-wrapping oracle on random slices") {
  for (int trial = 0; trial < 60; ++trial) {
    const LabelMask m = oracle::random_mask({12, 12, 3}, 0.08, 1000 + trial);
    const LabelMask got = convex_hull_slicewise(m);
    const LabelMask want = oracle::hull_slicewise_naive(m);
    CHECK((got.data == want.data).all());
  }
}

TEST_CASE("hull is extensive and idempotent; dilation properties hold") {
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMask a = oracle::random_mask({10, 10, 3}, 0.15, 2000 + trial);
    const LabelMask b = oracle::random_mask({10, 10, 3}, 0.1, 3000 + trial);
    const auto se = StructuringElement::ball(1 + trial % 2);

    const LabelMask da = dilate(a, se);
    // extensive
    CHECK(((a.data == 0) || (da.data != 0)).all());
    // increasing: a subset of a|b implies dilate(a) subset of dilate(a|b)
    const LabelMask dab = dilate(mask_union(a, b), se);
    CHECK(((da.data == 0) || (dab.data != 0)).all());
    // commutes with union
    CHECK((dab.data == mask_union(da, dilate(b, se)).data).all());

    const LabelMask h = convex_hull_slicewise(a);
    CHECK(((a.data == 0) || (h.data != 0)).all());
    CHECK((convex_hull_slicewise(h).data == h.data).all());
  }
}

TEST_CASE("dilation matches the naive oracle") {
  for (int trial = 0; trial < 20; ++trial) {
    const LabelMask m = oracle::random_mask({9, 9, 4}, 0.1, 4000 + trial);
    const int radius = 1 + trial % 3;
    const LabelMask got = dilate(m, StructuringElement::ball(radius));
    CHECK((got.data == oracle::dilate_naive(m, radius).data).all());
  }
}

namespace {

OrganMasks demo_organs() {
  const Eigen::Vector3i dims(20, 20, 20);
  OrganMasks organs;
  organs.heart = LabelMask(dims, {1.0, 1.0, 1.0});
  organs.aorta = LabelMask(dims, {1.0, 1.0, 1.0});
  organs.lungs = LabelMask(dims, {1.0, 1.0, 1.0});
  for (int k = 4; k < 16; ++k)
    for (int j = 6; j < 14; ++j)
      for (int i = 6; i < 14; ++i) organs.heart.at(i, j, k) = 1;
  for (int k = 4; k < 18; ++k)
    for (int j = 14; j < 17; ++j)
      for (int i = 9; i < 12; ++i) organs.aorta.at(i, j, k) = 1;
  for (int k = 0; k < 20; ++k)
    for (int j = 0; j < 20; ++j)
      for (int i : {0, 1, 18, 19}) organs.lungs.at(i, j, k) = 1;
  return organs;
}

}  // namespace

TEST_CASE("cardiac roi composition matches a step-by-step oracle") {
  const OrganMasks organs = demo_organs();
  const LabelMask roi = build_cardiac_roi(organs, 3);
  const LabelMask want = oracle::build_roi_naive(organs, 3);
  CHECK((roi.data == want.data).all());
  CHECK((roi.data != 0).count() == (want.data != 0).count());

  // superset of heart minus lungs, and never inside the lungs
  CHECK(((organs.heart.data == 0) || (organs.lungs.data != 0) ||
         (roi.data != 0))
            .all());
  CHECK(((roi.data == 0) || (organs.lungs.data == 0)).all());
}

TEST_CASE("empty organs give an empty roi") {
  const Eigen::Vector3i dims(8, 8, 8);
  OrganMasks organs;
  organs.heart = LabelMask(dims, {1.0, 1.0, 1.0});
  organs.aorta = LabelMask(dims, {1.0, 1.0, 1.0});
  organs.lungs = LabelMask(dims, {1.0, 1.0, 1.0});
  CHECK((build_cardiac_roi(organs, 3).data == 0).all());
}

TEST_CASE("all operations preserve geometry metadata") {
  LabelMask m({6, 5, 4}, {0.6, 0.7, 2.5}, {-3.0, 4.0, 9.0});
  m.at(2, 2, 2) = 1;
  for (const LabelMask& out :
       {dilate(m, StructuringElement::full26()), negate(m),
        convex_hull_slicewise(m), mask_union(m, m)}) {
    CHECK(out.same_geometry(m));
  }
}
