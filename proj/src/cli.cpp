// cacscore command-line pipeline: phantom -> roi -> score -> eval ->
// calibrate, each stage independently invocable.

#include "cacs/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include "cacs/agatston.hpp"
#include "cacs/calibration.hpp"
#include "cacs/detect.hpp"
#include "cacs/evaluation.hpp"
#include "cacs/mask_ops.hpp"
#include "cacs/nifti.hpp"
#include "cacs/phantom.hpp"
#include "cacs/serialize.hpp"
#include "cacs/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cacs::cli {

namespace {

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("CACSCORE_LOG");
    if (env) {
      const std::string v(env);
      if (v == "debug") return LogLevel::debug;
      if (v == "info") return LogLevel::info;
    }
    return LogLevel::error;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << "[info] " << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << "[debug] " << msg << '\n';
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::geometry_mismatch:
      return kExitGeometry;
    case errc::degenerate_input:
    case errc::zero_slope:
    case errc::empty_input:
      return kExitDegenerate;
    default:
      return kExitInput;
  }
}

CalibrationModel resolve_model(const std::string& spec) {
  if (spec == "default") return default_model();
  return load_calibration_model(spec);
}

struct ScoreOptions {
  std::string volume_path;
  std::string mask_path;
  std::string roi_path;
  std::string heart_path, aorta_path, lungs_path;
  double threshold_hu = 130.0;
  int min_voxels = 3;
  int dilation_radius = 3;
  bool ingest = false;
  std::string calibration;
  std::string out_path;
  std::string save_mask_path;
  std::string batch_dir;
};

json score_one(const Volume& volume, const LabelMask& labels,
               const ScoreOptions& opt,
               const std::optional<CalibrationModel>& model) {
  const AgatstonReport report =
      total_score(volume, labels, opt.threshold_hu);
  std::optional<double> corrected;
  if (model) corrected = apply_correction(*model, report.total);
  return to_json(report, corrected);
}

// A batch case is a subdirectory holding volume.nii[.gz] plus a
// mask.nii[.gz] (or gt.nii[.gz]) label mask.
fs::path find_case_file(const fs::path& dir, const char* stem) {
  for (const char* ext : {".nii.gz", ".nii"}) {
    fs::path p = dir / (std::string(stem) + ext);
    if (fs::exists(p)) return p;
  }
  return {};
}

int run_score_batch(const ScoreOptions& opt,
                    const std::optional<CalibrationModel>& model) {
  std::vector<fs::path> cases;
  for (const auto& entry : fs::directory_iterator(opt.batch_dir))
    if (entry.is_directory() &&
        !find_case_file(entry.path(), "volume").empty())
      cases.push_back(entry.path());
  std::sort(cases.begin(), cases.end());
  if (cases.empty())
    throw Error(errc::io_error, "no cases with a volume.nii[.gz] under " +
                                    opt.batch_dir);

  std::vector<std::future<json>> futures;
  futures.reserve(cases.size());
  for (const fs::path& dir : cases) {
    futures.push_back(std::async(std::launch::async, [&, dir]() {
      const fs::path volume_path = find_case_file(dir, "volume");
      fs::path mask_path = find_case_file(dir, "mask");
      if (mask_path.empty()) mask_path = find_case_file(dir, "gt");
      if (mask_path.empty())
        throw Error(errc::io_error,
                    "no mask.nii[.gz] or gt.nii[.gz] in " + dir.string());

      const Volume volume = nifti::load_volume(volume_path);
      LabelMask labels = nifti::load_mask(mask_path);
      if (opt.ingest) labels = ingest_predictions(labels, volume, opt.min_voxels);
      json report = score_one(volume, labels, opt, model);
      write_json_file(dir / "report.json", report);
      return json{{"case", dir.filename().string()},
                  {"total", report.at("total")},
                  {"category", report.at("category")}};
    }));
  }

  // Collect in sorted-path order so the merged summary is deterministic.
  json summary{{"cases", json::array()}};
  for (auto& f : futures) summary["cases"].push_back(f.get());

  const std::string out = opt.out_path.empty() ? "summary.json" : opt.out_path;
  write_json_file(out, summary);
  for (const auto& c : summary["cases"])
    std::cout << c.at("case").get<std::string>() << ": total "
              << c.at("total").get<double>() << " ("
              << c.at("category").get<std::string>() << ")\n";
  log_info("batch summary written to " + out);
  return kExitOk;
}

int run_score(const ScoreOptions& opt) {
  std::optional<CalibrationModel> model;
  if (!opt.calibration.empty()) model = resolve_model(opt.calibration);

  if (!opt.batch_dir.empty()) return run_score_batch(opt, model);

  log_info("loading volume " + opt.volume_path);
  const Volume volume = nifti::load_volume(opt.volume_path);

  LabelMask labels;
  if (!opt.mask_path.empty()) {
    labels = nifti::load_mask(opt.mask_path);
    require_same_geometry(volume, labels, "score");
    if (opt.ingest) labels = ingest_predictions(labels, opt.min_voxels);
  } else {
    LabelMask roi;
    if (!opt.roi_path.empty()) {
      roi = nifti::load_mask(opt.roi_path);
    } else {
      OrganMasks organs{nifti::load_mask(opt.heart_path),
                        nifti::load_mask(opt.aorta_path),
                        nifti::load_mask(opt.lungs_path)};
      require_same_geometry(volume, organs.heart, "score");
      roi = build_cardiac_roi(organs, opt.dilation_radius);
    }
    labels = detect_classical(volume, roi, opt.threshold_hu, opt.min_voxels);
    log_debug("detector found " +
              std::to_string(labels.data.maxCoeff()) + " lesions");
  }

  if (!opt.save_mask_path.empty()) nifti::save(opt.save_mask_path, labels);

  const json report = score_one(volume, labels, opt, model);
  const std::string out = opt.out_path.empty() ? "report.json" : opt.out_path;
  write_json_file(out, report);

  std::cout << "total " << report.at("total").get<double>() << '\n'
            << "category " << report.at("category").get<std::string>() << '\n';
  if (report.contains("corrected_total"))
    std::cout << "corrected_total "
              << report.at("corrected_total").get<double>() << '\n';
  log_info("report written to " + out);
  return kExitOk;
}

struct EvalOptions {
  std::string pred_path;
  std::string gt_path;
  bool ingest = false;
  int min_voxels = 3;
  std::string out_path;
};

int run_eval(const EvalOptions& opt) {
  LabelMask pred = nifti::load_mask(opt.pred_path);
  const LabelMask gt = nifti::load_mask(opt.gt_path);
  require_same_geometry(pred, gt, "eval");
  if (opt.ingest) pred = ingest_predictions(pred, opt.min_voxels);

  const DetectionReport report = match_lesions(pred, gt);
  const json j = to_json(report);
  const std::string out =
      opt.out_path.empty() ? "detection_report.json" : opt.out_path;
  write_json_file(out, j);

  std::cout << "tp " << report.tp << " fp " << report.fp << " fn " << report.fn
            << '\n';
  std::cout << "precision "
            << (report.precision ? std::to_string(*report.precision)
                                 : "undefined")
            << '\n';
  std::cout << "recall "
            << (report.recall ? std::to_string(*report.recall) : "undefined")
            << '\n';
  if (!j.at("dice_summary").is_null())
    std::cout << "dice " << j.at("dice_summary").get<std::string>() << '\n';
  log_info("detection report written to " + out);
  return kExitOk;
}

struct CalibrateOptions {
  std::string pairs_path;
  bool swap_direction = false;
  std::string out_model;
  std::string out_scatter;
  std::string out_ba;
};

int run_calibrate(const CalibrateOptions& opt) {
  const std::vector<ScorePair> pairs = load_pairs_csv(opt.pairs_path);

  std::vector<ScorePair> fit_pairs = pairs;
  if (opt.swap_direction)
    for (auto& p : fit_pairs) std::swap(p.manual, p.automated);

  const CalibrationModel model = fit_linear(fit_pairs);
  const BlandAltman ba = bland_altman(pairs);

  const std::string model_out =
      opt.out_model.empty() ? "model.json" : opt.out_model;
  write_json_file(model_out, to_json(model));

  const std::string scatter_out =
      opt.out_scatter.empty() ? "scatter.csv" : opt.out_scatter;
  std::ofstream scatter(scatter_out, std::ios::trunc);
  if (!scatter)
    throw Error(errc::io_error, "cannot open " + scatter_out + " for writing");
  scatter << scatter_csv(pairs, model, opt.swap_direction);

  const std::string ba_out =
      opt.out_ba.empty() ? "bland_altman.csv" : opt.out_ba;
  std::ofstream ba_file(ba_out, std::ios::trunc);
  if (!ba_file)
    throw Error(errc::io_error, "cannot open " + ba_out + " for writing");
  ba_file << bland_altman_csv(ba);

  std::cout << "slope " << model.slope << '\n'
            << "intercept " << model.intercept << '\n'
            << "r2 " << (model.r2 ? std::to_string(*model.r2) : "undefined")
            << '\n';
  log_info("model written to " + model_out);
  return kExitOk;
}

struct PhantomOptions {
  std::string spec_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

int run_phantom(const PhantomOptions& opt) {
  phantom::PhantomSpec spec = load_phantom_spec(opt.spec_path);
  if (opt.seed) spec.seed = *opt.seed;

  const phantom::PhantomOutput result = phantom::generate(spec);

  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  nifti::save(dir / "volume.nii.gz", result.volume);
  nifti::save(dir / "gt.nii.gz", result.ground_truth);
  nifti::save(dir / "heart.nii.gz", result.organs.heart);
  nifti::save(dir / "aorta.nii.gz", result.organs.aorta);
  nifti::save(dir / "lungs.nii.gz", result.organs.lungs);
  write_json_file(dir / "expected_report.json", to_json(result.expected));

  std::cout << "phantom written to " << dir.string() << " (expected total "
            << round_score(result.expected.total) << ")\n";
  return kExitOk;
}

struct ResampleOptions {
  std::string volume_path;
  double thickness_mm = 3.0;
  std::string out_path = "resampled.nii.gz";
};

int run_resample(const ResampleOptions& opt) {
  const Volume v = nifti::load_volume(opt.volume_path);
  const Volume out = resample_axial(v, opt.thickness_mm);
  nifti::save(opt.out_path, out);
  std::cout << "slices " << v.dims.z() << " @ " << v.spacing.z()
            << " mm -> " << out.dims.z() << " @ " << out.spacing.z()
            << " mm\n";
  return kExitOk;
}

struct RoiOptions {
  std::string heart_path, aorta_path, lungs_path;
  int dilation_radius = 3;
  std::string out_path = "roi.nii.gz";
};

int run_roi(const RoiOptions& opt) {
  OrganMasks organs{nifti::load_mask(opt.heart_path),
                    nifti::load_mask(opt.aorta_path),
                    nifti::load_mask(opt.lungs_path)};
  const LabelMask roi = build_cardiac_roi(organs, opt.dilation_radius);
  nifti::save(opt.out_path, roi);
  std::cout << "roi voxels " << static_cast<long>(roi.data.sum()) << '\n';
  log_info("roi written to " + opt.out_path);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Coronary calcium quantification for non-contrast chest CT"};
  app.name("cacscore");
  app.require_subcommand(1);

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand(
      "score", "Compute an Agatston report for a volume");
  score_cmd->add_option("--volume,-v", score.volume_path, "CT volume (.nii[.gz])");
  auto* mask_opt =
      score_cmd->add_option("--mask,-m", score.mask_path,
                            "label mask to score as-is (.nii[.gz])");
  auto* roi_opt = score_cmd->add_option(
      "--roi", score.roi_path, "ROI mask; runs the classical detector");
  auto* heart_opt =
      score_cmd->add_option("--heart", score.heart_path, "heart mask");
  score_cmd->add_option("--aorta", score.aorta_path, "aorta mask");
  score_cmd->add_option("--lungs", score.lungs_path, "lungs mask");
  score_cmd->add_option("--threshold-hu", score.threshold_hu,
                        "calcium threshold in HU")
      ->capture_default_str();
  score_cmd->add_option("--min-voxels", score.min_voxels,
                        "minimum component size")
      ->capture_default_str();
  score_cmd->add_option("--dilation-radius", score.dilation_radius,
                        "ROI dilation radius in voxels")
      ->capture_default_str();
  score_cmd->add_flag("--ingest", score.ingest,
                      "re-label the mask as 26-connected components and "
                      "apply the size filter before scoring");
  score_cmd->add_option("--calibration", score.calibration,
                        "correction model JSON, or 'default'");
  score_cmd->add_option("--out,-o", score.out_path,
                        "report path (default report.json)");
  score_cmd->add_option("--save-mask", score.save_mask_path,
                        "write the detected label mask here");
  auto* batch_opt = score_cmd->add_option(
      "--batch", score.batch_dir,
      "directory of case subdirectories with volume.nii[.gz] and "
      "mask/gt.nii[.gz]; writes per-case reports and a merged summary");
  mask_opt->excludes(roi_opt)->excludes(heart_opt);
  roi_opt->excludes(heart_opt);
  batch_opt->excludes(mask_opt)->excludes(roi_opt)->excludes(heart_opt);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Match predicted lesions against ground truth");
  eval_cmd->add_option("--pred,-p", eval.pred_path, "predicted mask")
      ->required();
  eval_cmd->add_option("--gt,-g", eval.gt_path, "ground-truth mask")
      ->required();
  eval_cmd->add_flag("--ingest", eval.ingest,
                     "normalize the prediction (binarize, re-label "
                     "components, size filter) before matching");
  eval_cmd->add_option("--min-voxels", eval.min_voxels,
                       "minimum component size for --ingest")
      ->capture_default_str();
  eval_cmd->add_option("--out,-o", eval.out_path,
                       "report path (default detection_report.json)");

  CalibrateOptions calibrate;
  auto* cal_cmd = app.add_subcommand(
      "calibrate", "Fit the manual/automated linear correction");
  cal_cmd->add_option("--pairs", calibrate.pairs_path,
                      "CSV with header manual,automated")
      ->required();
  cal_cmd->add_flag("--swap-regression-direction", calibrate.swap_direction,
                    "regress manual on automated instead");
  cal_cmd->add_option("--out-model", calibrate.out_model,
                      "model path (default model.json)");
  cal_cmd->add_option("--out-scatter", calibrate.out_scatter,
                      "scatter CSV path (default scatter.csv)");
  cal_cmd->add_option("--out-bland-altman", calibrate.out_ba,
                      "Bland-Altman CSV path (default bland_altman.csv)");

  PhantomOptions phantom_opts;
  auto* phantom_cmd = app.add_subcommand(
      "phantom", "Generate a synthetic phantom with known scores");
  phantom_cmd->add_option("--spec,-s", phantom_opts.spec_path,
                          "phantom spec JSON")
      ->required();
  phantom_cmd->add_option("--out-dir,-o", phantom_opts.out_dir,
                          "output directory")
      ->capture_default_str();
  phantom_cmd->add_option("--seed", phantom_opts.seed,
                          "override the spec's seed");

  ResampleOptions resample;
  auto* resample_cmd = app.add_subcommand(
      "resample", "Reformat a volume to a new axial slice thickness");
  resample_cmd->add_option("--volume,-v", resample.volume_path, "CT volume")
      ->required();
  resample_cmd
      ->add_option("--thickness", resample.thickness_mm,
                   "target slice thickness in mm")
      ->capture_default_str();
  resample_cmd->add_option("--out,-o", resample.out_path, "output path")
      ->capture_default_str();

  RoiOptions roi;
  auto* roi_cmd = app.add_subcommand(
      "roi", "Build the cardiac ROI from organ masks");
  roi_cmd->add_option("--heart", roi.heart_path, "heart mask")->required();
  roi_cmd->add_option("--aorta", roi.aorta_path, "aorta mask")->required();
  roi_cmd->add_option("--lungs", roi.lungs_path, "lungs mask")->required();
  roi_cmd->add_option("--dilation-radius", roi.dilation_radius,
                      "dilation radius in voxels")
      ->capture_default_str();
  roi_cmd->add_option("--out,-o", roi.out_path, "output path")
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("cacscore");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (score_cmd->parsed()) {
      if (score.batch_dir.empty() && score.volume_path.empty())
        throw Error(errc::io_error, "score requires --volume (or --batch)");
      if (score.batch_dir.empty() && score.mask_path.empty() &&
          score.roi_path.empty() &&
          (score.heart_path.empty() || score.aorta_path.empty() ||
           score.lungs_path.empty()))
        throw Error(errc::io_error,
                    "score needs --mask, --roi, or all of --heart/--aorta/"
                    "--lungs");
      return run_score(score);
    }
    if (eval_cmd->parsed()) return run_eval(eval);
    if (cal_cmd->parsed()) return run_calibrate(calibrate);
    if (phantom_cmd->parsed()) return run_phantom(phantom_opts);
    if (resample_cmd->parsed()) return run_resample(resample);
    if (roi_cmd->parsed()) return run_roi(roi);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

int main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace cacs::cli
