#ifndef CACS_SERIALIZE_HPP
#define CACS_SERIALIZE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cacs/agatston.hpp"
#include "cacs/calibration.hpp"
#include "cacs/evaluation.hpp"
#include "cacs/phantom.hpp"

namespace cacs {

// Scores are serialized to 2 decimal places; model coefficients keep full
// precision.
double round_score(double value);

nlohmann::json to_json(const AgatstonReport& report,
                       std::optional<double> corrected_total = {});
nlohmann::json to_json(const DetectionReport& report);
nlohmann::json to_json(const CalibrationModel& model);

CalibrationModel calibration_model_from_json(const nlohmann::json& j);
phantom::PhantomSpec phantom_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const phantom::PhantomSpec& spec);

CalibrationModel load_calibration_model(const std::filesystem::path& path);
void save_calibration_model(const std::filesystem::path& path,
                            const CalibrationModel& model);
phantom::PhantomSpec load_phantom_spec(const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

// pairs CSV: header "manual,automated", one pair per row.
std::vector<ScorePair> parse_pairs_csv(const std::string& text);
std::vector<ScorePair> load_pairs_csv(const std::filesystem::path& path);

// Plot-data emission (full precision). The fitted column is the model's
// fitted response: slope*manual+intercept normally, slope*automated+
// intercept when the regression direction was swapped.
std::string scatter_csv(std::span<const ScorePair> pairs,
                        const CalibrationModel& model, bool swapped = false);
std::string bland_altman_csv(const BlandAltman& ba);

}  // namespace cacs

#endif  // CACS_SERIALIZE_HPP
