#include "cacs/serialize.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace cacs {

using nlohmann::json;

double round_score(double value) { return std::round(value * 100.0) / 100.0; }

json to_json(const AgatstonReport& report,
             std::optional<double> corrected_total) {
  json lesions = json::array();
  for (const auto& [id, score] : report.per_lesion)
    lesions.push_back({{"id", id}, {"score", round_score(score)}});

  json j{
      {"total", round_score(report.total)},
      {"category", std::string(to_string(report.category))},
      {"slice_thickness_mm", report.slice_thickness_mm},
      {"threshold_hu", report.threshold_hu},
      {"per_lesion", std::move(lesions)},
  };
  if (corrected_total) j["corrected_total"] = round_score(*corrected_total);
  return j;
}

namespace {

std::string format_2dp(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << v;
  return out.str();
}

}  // namespace

json to_json(const DetectionReport& report) {
  json j{
      {"tp", report.tp},
      {"fp", report.fp},
      {"fn", report.fn},
      {"precision", report.precision ? json(*report.precision) : json()},
      {"recall", report.recall ? json(*report.recall) : json()},
      {"dice_values", report.dice_values},
      {"dice_mean", report.dice_mean ? json(*report.dice_mean) : json()},
      {"dice_sd", report.dice_sd ? json(*report.dice_sd) : json()},
  };
  // The mean±sd convention, e.g. "0.75±0.16".
  if (report.dice_mean && report.dice_sd)
    j["dice_summary"] =
        format_2dp(*report.dice_mean) + "±" + format_2dp(*report.dice_sd);
  else
    j["dice_summary"] = json();

  json pairs = json::array();
  for (const auto& [p, g] : report.pairs)
    pairs.push_back(json::array({p, g}));
  j["pairs"] = std::move(pairs);
  return j;
}

json to_json(const CalibrationModel& model) {
  return json{
      {"slope", model.slope},
      {"intercept", model.intercept},
      {"r2", model.r2 ? json(*model.r2) : json()},
      {"n", model.n ? json(*model.n) : json()},
  };
}

CalibrationModel calibration_model_from_json(const json& j) {
  try {
    CalibrationModel model;
    model.slope = j.at("slope").get<double>();
    model.intercept = j.at("intercept").get<double>();
    if (j.contains("r2") && !j.at("r2").is_null())
      model.r2 = j.at("r2").get<double>();
    if (j.contains("n") && !j.at("n").is_null())
      model.n = j.at("n").get<int>();
    return model;
  } catch (const json::exception& e) {
    throw Error(errc::schema_error,
                std::string("invalid calibration model: ") + e.what());
  }
}

namespace {

Eigen::Vector3i vec3i_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3)
    throw Error(errc::schema_error,
                std::string(key) + " must be an array of 3 integers");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

Eigen::Vector3d vec3d_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3)
    throw Error(errc::schema_error,
                std::string(key) + " must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

phantom::Box box_from(const json& j, const char* key) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
    throw Error(errc::schema_error,
                std::string(key) + " must be an object with lo and hi");
  phantom::Box box;
  box.lo = vec3i_from(j.at("lo"), key);
  box.hi = vec3i_from(j.at("hi"), key);
  return box;
}

json box_to(const phantom::Box& box) {
  return json{{"lo", {box.lo.x(), box.lo.y(), box.lo.z()}},
              {"hi", {box.hi.x(), box.hi.y(), box.hi.z()}}};
}

}  // namespace

phantom::PhantomSpec phantom_spec_from_json(const json& j) {
  try {
    phantom::PhantomSpec spec;
    spec.dims = vec3i_from(j.at("dims"), "dims");
    if (j.contains("spacing")) spec.spacing = vec3d_from(j.at("spacing"), "spacing");
    if (j.contains("background_hu"))
      spec.background_hu = j.at("background_hu").get<double>();
    if (j.contains("lesions")) {
      for (const auto& l : j.at("lesions")) {
        phantom::LesionSpec lesion;
        lesion.center = vec3i_from(l.at("center"), "lesion center");
        lesion.radii = vec3d_from(l.at("radii"), "lesion radii");
        lesion.hu = l.at("hu").get<double>();
        spec.lesions.push_back(lesion);
      }
    }
    const auto& organs = j.at("organs");
    spec.heart = box_from(organs.at("heart"), "heart");
    spec.aorta = box_from(organs.at("aorta"), "aorta");
    for (const auto& lung : organs.at("lungs"))
      spec.lungs.push_back(box_from(lung, "lung"));
    if (j.contains("noise_sigma_hu"))
      spec.noise_sigma_hu = j.at("noise_sigma_hu").get<double>();
    if (j.contains("motion_blur"))
      spec.motion_blur = j.at("motion_blur").get<int>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  } catch (const json::exception& e) {
    throw Error(errc::schema_error,
                std::string("invalid phantom spec: ") + e.what());
  }
}

json to_json(const phantom::PhantomSpec& spec) {
  json lesions = json::array();
  for (const auto& l : spec.lesions)
    lesions.push_back({{"center", {l.center.x(), l.center.y(), l.center.z()}},
                       {"radii", {l.radii.x(), l.radii.y(), l.radii.z()}},
                       {"hu", l.hu}});
  json lungs = json::array();
  for (const auto& lung : spec.lungs) lungs.push_back(box_to(lung));
  return json{
      {"dims", {spec.dims.x(), spec.dims.y(), spec.dims.z()}},
      {"spacing", {spec.spacing.x(), spec.spacing.y(), spec.spacing.z()}},
      {"background_hu", spec.background_hu},
      {"lesions", std::move(lesions)},
      {"organs",
       {{"heart", box_to(spec.heart)},
        {"aorta", box_to(spec.aorta)},
        {"lungs", std::move(lungs)}}},
      {"noise_sigma_hu", spec.noise_sigma_hu},
      {"motion_blur", spec.motion_blur},
      {"seed", spec.seed},
  };
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error(errc::io_error, "write failure on " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(errc::schema_error, path.string() + ": " + e.what());
  }
}

CalibrationModel load_calibration_model(const std::filesystem::path& path) {
  return calibration_model_from_json(read_json_file(path));
}

void save_calibration_model(const std::filesystem::path& path,
                            const CalibrationModel& model) {
  write_json_file(path, to_json(model));
}

phantom::PhantomSpec load_phantom_spec(const std::filesystem::path& path) {
  return phantom_spec_from_json(read_json_file(path));
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, std::size_t line_no) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(errc::schema_error, "pairs CSV line " + std::to_string(line_no) +
                                        ": '" + text + "' is not a number");
  }
  if (used != text.size())
    throw Error(errc::schema_error, "pairs CSV line " + std::to_string(line_no) +
                                        ": '" + text + "' is not a number");
  return value;
}

}  // namespace

std::vector<ScorePair> parse_pairs_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line))
    throw Error(errc::schema_error, "pairs CSV is empty");
  ++line_no;
  if (trim(line) != "manual,automated")
    throw Error(errc::schema_error,
                "pairs CSV must start with the header 'manual,automated'");

  std::vector<ScorePair> pairs;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos ||
        row.find(',', comma + 1) != std::string::npos)
      throw Error(errc::schema_error,
                  "pairs CSV line " + std::to_string(line_no) +
                      ": expected exactly two comma-separated values");
    pairs.push_back({parse_double(trim(row.substr(0, comma)), line_no),
                     parse_double(trim(row.substr(comma + 1)), line_no)});
  }
  return pairs;
}

std::vector<ScorePair> load_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_pairs_csv(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string scatter_csv(std::span<const ScorePair> pairs,
                        const CalibrationModel& model, bool swapped) {
  std::ostringstream out;
  out.precision(17);
  out << "manual,automated,fitted\n";
  for (const auto& p : pairs) {
    const double predictor = swapped ? p.automated : p.manual;
    out << p.manual << ',' << p.automated << ','
        << model.slope * predictor + model.intercept << '\n';
  }
  return out.str();
}

std::string bland_altman_csv(const BlandAltman& ba) {
  std::ostringstream out;
  out.precision(17);
  out << "mean,difference,loa_low,loa_high\n";
  for (const auto& [mean, diff] : ba.points)
    out << mean << ',' << diff << ',' << ba.loa_low << ',' << ba.loa_high
        << '\n';
  return out.str();
}

}  // namespace cacs
