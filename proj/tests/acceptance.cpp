// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.

#include <unistd.h>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cacs/agatston.hpp"
#include "cacs/calibration.hpp"
#include "cacs/cli.hpp"
#include "cacs/detect.hpp"
#include "cacs/evaluation.hpp"
#include "cacs/mask_ops.hpp"
#include "cacs/nifti.hpp"
#include "cacs/phantom.hpp"
#include "cacs/rng.hpp"
#include "cacs/serialize.hpp"
#include "oracles.hpp"

using namespace cacs;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// Keeps the per-criterion lines readable: cli::run prints its normal
// summary to stdout, which is swallowed here.
struct QuietStdout {
  std::stringstream sink;
  std::streambuf* saved;
  QuietStdout() : saved(std::cout.rdbuf(sink.rdbuf())) {}
  ~QuietStdout() { std::cout.rdbuf(saved); }
};

int run_quiet(const std::vector<std::string>& args) {
  QuietStdout quiet;
  return cli::run(args);
}

// Seeded phantom layouts: organ slabs plus 1..8 well-separated lesions
// inside the heart box. Lesion HU >= 250 so cores survive the stressed
// (blur + noise) runs.
phantom::PhantomSpec suite_phantom(std::uint64_t seed, bool stressed) {
  std::mt19937_64 gen(seed);
  const auto pick = [&](int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  phantom::PhantomSpec spec;
  const int nx = pick(48, 64), ny = pick(48, 64), nz = pick(8, 16);
  spec.dims = {nx, ny, nz};
  spec.spacing = {0.5, 0.5, 3.0};
  spec.background_hu = 40.0;
  spec.seed = seed;
  if (stressed) {
    spec.noise_sigma_hu = 20.0;
    spec.motion_blur = 1;
  }

  const int hx0 = nx / 4, hx1 = 3 * nx / 4;
  const int hy0 = ny / 4, hy1 = 3 * ny / 4;
  spec.heart = {{hx0, hy0, 1}, {hx1, hy1, nz - 1}};
  spec.aorta = {{nx / 2 - 3, hy1, 1}, {nx / 2 + 3, std::min(hy1 + 4, ny), nz - 1}};
  spec.lungs = {{{0, 0, 0}, {std::max(1, hx0 - 3), ny, nz}},
                {{std::min(nx - 1, hx1 + 3), 0, 0}, {nx, ny, nz}}};

  struct Placed {
    Eigen::Vector3i lo, hi;
  };
  std::vector<Placed> placed;
  const int wanted = pick(1, 8);
  int attempts = 0;
  while (static_cast<int>(spec.lesions.size()) < wanted && attempts++ < 200) {
    phantom::LesionSpec lesion;
    // stressed suites mix in faint minimum-size lesions that sit near the
    // detection limit once blur and noise are applied
    if (stressed && pick(0, 2) == 0) {
      lesion.radii = {1.0, 1.0, 0.3};
      lesion.hu = static_cast<double>(pick(170, 230));
    } else {
      lesion.radii = {0.5 * pick(2, 5), 0.5 * pick(2, 5), 0.3 * pick(1, 4)};
      lesion.hu = static_cast<double>(pick(250, 600));
    }
    const auto margin = [&](double r) { return static_cast<int>(r) + 2; };
    const int mx = margin(lesion.radii.x()), my = margin(lesion.radii.y());
    const int mz = margin(lesion.radii.z());
    if (hx0 + mx >= hx1 - mx || hy0 + my >= hy1 - my || 1 + mz >= nz - 1 - mz)
      continue;
    lesion.center = {pick(hx0 + mx, hx1 - 1 - mx), pick(hy0 + my, hy1 - 1 - my),
                     pick(1 + mz, nz - 2 - mz)};

    // bounding boxes padded by 2 voxels must stay disjoint so planted
    // components never touch, even diagonally
    Placed box;
    box.lo = lesion.center - Eigen::Vector3i(mx + 1, my + 1, mz + 1);
    box.hi = lesion.center + Eigen::Vector3i(mx + 1, my + 1, mz + 1);
    bool clash = false;
    for (const auto& other : placed) {
      const bool disjoint =
          box.hi.x() < other.lo.x() || other.hi.x() < box.lo.x() ||
          box.hi.y() < other.lo.y() || other.hi.y() < box.lo.y() ||
          box.hi.z() < other.lo.z() || other.hi.z() < box.lo.z();
      if (!disjoint) {
        clash = true;
        break;
      }
    }
    if (clash) continue;
    placed.push_back(box);
    spec.lesions.push_back(lesion);
  }
  return spec;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome criterion_1_phantom_scoring() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path root =
      fs::temp_directory_path() / ("cacs_accept_" + std::to_string(::getpid()));
  fs::create_directories(root);

  int ok = 0;
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const fs::path dir = root / ("c1_" + std::to_string(n));
    const phantom::PhantomSpec spec = suite_phantom(1000 + n, false);
    write_json_file(root / "spec.json", to_json(spec));

    if (run_quiet({"phantom", "--spec", (root / "spec.json").string(),
                  "--out-dir", dir.string()}) != 0)
      return {false, "cmd_phantom failed"};
    if (run_quiet({"score", "--volume", (dir / "volume.nii.gz").string(),
                  "--mask", (dir / "gt.nii.gz").string(), "--out",
                  (dir / "report.json").string()}) != 0)
      return {false, "cmd_score failed"};

    const double got = read_json_file(dir / "report.json").at("total");
    const double want =
        read_json_file(dir / "expected_report.json").at("total");
    const double tol = std::max(0.01 * want, 0.01);
    worst = std::max(worst, std::abs(got - want));
    if (std::abs(got - want) <= tol) ++ok;
  }
  fs::remove_all(root);

  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << ok << "/20 phantoms within max(1%, 0.01), worst |diff| " << worst
         << ", " << elapsed << " s";
  return {ok == 20 && elapsed < 10.0, detail.str()};
}

Outcome criterion_2_noiseless_detection() {
  int total_tp = 0, total_fp = 0, total_fn = 0;
  bool dice_all_one = true;
  for (int n = 0; n < 20; ++n) {
    const auto out = phantom::generate(suite_phantom(1000 + n, false));
    const LabelMask roi = build_cardiac_roi(out.organs, 3);
    const LabelMask pred = detect_classical(out.volume, roi, 130.0, 3);
    const DetectionReport r = match_lesions(pred, out.ground_truth);
    total_tp += r.tp;
    total_fp += r.fp;
    total_fn += r.fn;
    for (const double d : r.dice_values)
      if (d != 1.0) dice_all_one = false;
  }
  std::ostringstream detail;
  detail << "tp " << total_tp << ", fp " << total_fp << ", fn " << total_fn
         << ", all Dice == 1.0: " << (dice_all_one ? "yes" : "no");
  return {total_fp == 0 && total_fn == 0 && total_tp > 0 && dice_all_one,
          detail.str()};
}

Outcome criterion_3_stressed_detection() {
  int tp = 0, fp = 0, fn = 0;
  for (int n = 0; n < 50; ++n) {
    const std::uint64_t seed = 5000 + n;
    phantom::PhantomSpec spec = suite_phantom(seed, true);

    // generate clean, place non-plaque bright artifacts (a line of three
    // voxels, outside the ground truth), then stress the volume exactly
    // the way generate() would
    phantom::PhantomSpec clean = spec;
    clean.noise_sigma_hu = 0.0;
    clean.motion_blur = 0;
    auto out = phantom::generate(clean);

    std::mt19937_64 artifact_gen(seed ^ 0xA57);
    if (artifact_gen() % 3 == 0) {
      const int nx = spec.dims.x(), ny = spec.dims.y(), nz = spec.dims.z();
      const auto in_range = [&](int lo, int hi) {
        return lo + static_cast<int>(artifact_gen() %
                                     static_cast<std::uint64_t>(hi - lo + 1));
      };
      for (int attempt = 0; attempt < 40; ++attempt) {
        const int ci = in_range(nx / 4 + 4, 3 * nx / 4 - 5);
        const int cj = in_range(ny / 4 + 4, 3 * ny / 4 - 5);
        const int ck = in_range(2, nz - 3);
        bool clear = true;
        for (const auto& lesion : spec.lesions)
          if ((lesion.center - Eigen::Vector3i(ci, cj, ck))
                  .cwiseAbs()
                  .maxCoeff() < 8)
            clear = false;
        if (!clear) continue;
        const bool along_x = (artifact_gen() & 1) != 0;
        const float hu = static_cast<float>(in_range(250, 450));
        for (int d = -1; d <= 1; ++d)
          out.volume.at(along_x ? ci + d : ci, along_x ? cj : cj + d, ck) = hu;
        break;
      }
    }

    const Volume stressed = phantom::add_noise(
        phantom::add_motion_blur(out.volume, spec.motion_blur, seed + 1),
        spec.noise_sigma_hu, seed);

    const LabelMask roi = build_cardiac_roi(out.organs, 3);
    const LabelMask pred = detect_classical(stressed, roi, 130.0, 3);
    const DetectionReport r = match_lesions(pred, out.ground_truth);
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
  }
  const double precision = static_cast<double>(tp) / (tp + fp);
  const double recall = static_cast<double>(tp) / (tp + fn);
  std::ostringstream detail;
  detail << "aggregate precision " << precision << ", recall " << recall
         << " over 50 stressed phantoms (tp " << tp << ", fp " << fp << ", fn "
         << fn << ")";
  return {precision >= 0.85 && recall >= 0.85, detail.str()};
}

std::vector<ScorePair> exact_line_pairs() {
  std::vector<ScorePair> pairs;
  for (int m = 0; m <= 1000; m += 25)
    pairs.push_back({static_cast<double>(m), 0.841 * m + 16.0});
  return pairs;
}

Outcome criterion_4_calibration_recovery() {
  const CalibrationModel exact = fit_linear(exact_line_pairs());
  const bool exact_ok = std::abs(exact.slope - 0.841) <= 1e-9 &&
                        std::abs(exact.intercept - 16.0) <= 1e-6 &&
                        std::abs(*exact.r2 - 1.0) <= 1e-9;

  int good = 0;
  for (int seed = 0; seed < 100; ++seed) {
    GaussianSampler rng(9000 + seed);
    std::vector<ScorePair> pairs;
    for (int q = 0; q < 160; ++q) {
      const double m = 1000.0 * q / 159.0;
      pairs.push_back({m, 0.841 * m + 16.0 + 5.0 * rng.next()});
    }
    const CalibrationModel noisy = fit_linear(pairs);
    if (std::abs(noisy.slope - 0.841) <= 0.02 &&
        std::abs(noisy.intercept - 16.0) <= 4.0)
      ++good;
  }
  std::ostringstream detail;
  detail << "exact fit: slope err " << std::abs(exact.slope - 0.841)
         << ", intercept err " << std::abs(exact.intercept - 16.0)
         << ", noisy recovery " << good << "/100 (need >= 95)";
  return {exact_ok && good >= 95, detail.str()};
}

Outcome criterion_5_correction_inversion() {
  const auto pairs = exact_line_pairs();
  const CalibrationModel model = fit_linear(pairs);
  double worst = 0.0;
  for (const auto& p : pairs)
    worst = std::max(worst,
                     std::abs(apply_correction(model, p.automated) - p.manual));
  std::ostringstream detail;
  detail << "worst |corrected - manual| " << worst << " over "
         << pairs.size() << " samples";
  return {worst <= 1e-6, detail.str()};
}

Outcome criterion_6_components_oracle() {
  const auto start = std::chrono::steady_clock::now();
  int checked = 0;
  bool all_ok = true;
  for (int n = 0; n < 100; ++n) {
    const double fill = n % 3 == 0 ? 0.1 : n % 3 == 1 ? 0.3 : 0.5;
    const LabelMask mask = oracle::random_mask({16, 16, 16}, fill, 40000 + n);
    for (const auto conn : {Connectivity::face6, Connectivity::full26}) {
      const LabelMask got = connected_components(mask, conn);
      const LabelMask want = oracle::flood_fill_components(mask, conn);
      if (!oracle::same_partition(got, want)) all_ok = false;
      ++checked;
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << checked << " labelings vs flood-fill oracle, " << elapsed << " s";
  return {all_ok && elapsed < 5.0, detail.str()};
}

Outcome criterion_7_evaluation_oracle() {
  bool all_ok = true;
  for (int n = 0; n < 100; ++n) {
    const LabelMask pred = connected_components(
        oracle::random_mask({12, 12, 12}, 0.10 + 0.002 * (n % 10), 50000 + n),
        Connectivity::full26);
    const LabelMask gt = connected_components(
        oracle::random_mask({12, 12, 12}, 0.10 + 0.002 * (n % 7), 60000 + n),
        Connectivity::full26);
    const DetectionReport got = match_lesions(pred, gt);
    const oracle::EvalCounts want = oracle::all_pairs_eval(pred, gt);
    if (got.tp != want.tp || got.fp != want.fp || got.fn != want.fn ||
        got.pairs != want.pairs)
      all_ok = false;
    if (got.dice_values.size() != want.dice.size())
      all_ok = false;
    else
      for (std::size_t q = 0; q < want.dice.size(); ++q)
        if (std::abs(got.dice_values[q] - want.dice[q]) > 1e-12)
          all_ok = false;
  }
  return {all_ok, "100 paired masks vs all-pairs intersection oracle"};
}

Outcome criterion_8_nifti_roundtrip() {
  bool all_ok = true;
  std::ostringstream detail;

  LabelMask mask({5, 4, 3}, {0.5, 0.75, 3.0}, {-7.5, 2.25, 11.0});
  std::mt19937_64 gen(321);
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data[i] = static_cast<int>(gen() % 20000) - 10000;

  for (const auto dt : {nifti::DataType::int16, nifti::DataType::int32}) {
    for (const bool gz : {false, true}) {
      auto bytes = nifti::write_mask(mask, dt);
      if (gz) bytes = nifti::gzip_compress(bytes);
      const LabelMask back = nifti::parse_mask(bytes);
      if (back.dims != mask.dims || back.spacing != mask.spacing ||
          back.origin != mask.origin || !(back.data == mask.data).all())
        all_ok = false;
    }
  }

  Volume vol = make_like<float>(mask);
  for (Eigen::Index i = 0; i < vol.size(); ++i)
    vol.data[i] = static_cast<float>(static_cast<double>(gen()) / 1e15 - 5.0);
  for (const bool gz : {false, true}) {
    auto bytes = nifti::write_volume(vol);
    if (gz) bytes = nifti::gzip_compress(bytes);
    const Volume back = nifti::parse_volume(bytes);
    if (back.dims != vol.dims || back.spacing != vol.spacing ||
        back.origin != vol.origin || !(back.data == vol.data).all())
      all_ok = false;
  }

  detail << "int16/int32/float32, plain and gzipped, bit-exact payloads";
  return {all_ok, detail.str()};
}

Outcome criterion_9_agatston_fixtures() {
  bool ok = true;

  Lesion a;
  a.per_slice.push_back({0, 1.0, 320.0});
  if (std::abs(lesion_score(a, 3.0) - 3.0) > 1e-9) ok = false;

  Lesion b;
  b.per_slice.push_back({0, 10 * 0.6 * 0.6, 180.0});
  b.per_slice.push_back({1, 6 * 0.6 * 0.6, 450.0});
  if (std::abs(lesion_score(b, 3.0) - 12.24) > 1e-9) ok = false;

  const std::pair<double, int> edges[] = {{129.0, 0}, {130.0, 1}, {199.0, 1},
                                          {200.0, 2}, {299.0, 2}, {300.0, 3},
                                          {399.0, 3}, {400.0, 4}};
  for (const auto& [hu, want] : edges)
    if (density_weight(hu) != want) ok = false;

  return {ok, "lesion scores 3.0 and 12.24; all eight bin edges"};
}

Outcome criterion_10_morphology_and_bland_altman() {
  bool ok = true;
  for (int n = 0; n < 200; ++n) {
    const Eigen::Vector3i dims(10, 10, 4);
    const LabelMask a = oracle::random_mask(dims, 0.12, 70000 + n);
    const LabelMask b = oracle::random_mask(dims, 0.10, 80000 + n);
    const auto se = StructuringElement::ball(1 + n % 2);

    const LabelMask da = dilate(a, se);
    const LabelMask db = dilate(b, se);
    const LabelMask dab = dilate(mask_union(a, b), se);
    if (!((a.data == 0) || (da.data != 0)).all()) ok = false;      // extensive
    if (!((da.data == 0) || (dab.data != 0)).all()) ok = false;    // monotone
    if (!(dab.data == mask_union(da, db).data).all()) ok = false;  // distributes

    const LabelMask h = convex_hull_slicewise(a);
    if (!((a.data == 0) || (h.data != 0)).all()) ok = false;       // extensive
    if (!(convex_hull_slicewise(h).data == h.data).all()) ok = false;
  }

  const ScorePair fixture[] = {{10, 12}, {20, 18}};
  const BlandAltman ba = bland_altman(fixture);
  if (std::abs(ba.loa_high - 5.5437) > 1e-3) ok = false;
  if (std::abs(ba.loa_low + 5.5437) > 1e-3) ok = false;

  return {ok, "200 masks: dilation/hull properties; loa within 1e-3"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"phantom scoring oracle (20 phantoms, cmd_score vs expected)",
       criterion_1_phantom_scoring},
      {"noiseless detection is exact (precision = recall = 1, Dice = 1)",
       criterion_2_noiseless_detection},
      {"stressed detection (sigma 20, blur 1): precision/recall >= 0.85",
       criterion_3_stressed_detection},
      {"calibration recovery, exact and under noise",
       criterion_4_calibration_recovery},
      {"correction inversion within 1e-6", criterion_5_correction_inversion},
      {"connected components vs flood-fill oracle",
       criterion_6_components_oracle},
      {"evaluation vs all-pairs overlap oracle", criterion_7_evaluation_oracle},
      {"NIfTI round-trip, three datatypes, gzipped and plain",
       criterion_8_nifti_roundtrip},
      {"Agatston unit fixtures", criterion_9_agatston_fixtures},
      {"morphology properties and Bland-Altman fixture",
       criterion_10_morphology_and_bland_altman},
  };

  int failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %2d. %s — %s\n", outcome.pass ? "PASS" : "FAIL", index,
                name, outcome.detail.c_str());
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
