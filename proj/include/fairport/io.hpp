#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairport/csv.hpp"
#include "fairport/fair_projection.hpp"
#include "fairport/metrics.hpp"
#include "fairport/synth_bench.hpp"

namespace fairport {

inline constexpr int kCalibratorFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

struct ColumnNames {
    std::string id = "id";
    std::string score = "score";
    std::string group = "group";
    std::string label = "label";
    bool label_required = false;  // true when the user named the label column
};

/// A scored CSV file. `table` keeps the raw cells so outputs can retain
/// every original column.
struct Dataset {
    CsvTable table;
    std::vector<ScoreRecord> records;
    bool has_labels = false;
};

/// Validates scores in [0,1], labels in {0,1} (empty cell = unlabeled) and
/// unique ids. Errors name the offending line, column or id.
Dataset parse_dataset(CsvTable table, const ColumnNames& cols = {});
Dataset load_dataset(const std::filesystem::path& path, const ColumnNames& cols = {});

nlohmann::ordered_json calibrator_to_json(const FairCalibrator& c);
FairCalibrator calibrator_from_json(const nlohmann::ordered_json& doc);
void save_calibrator(const FairCalibrator& c, const std::filesystem::path& path);
FairCalibrator load_calibrator(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const AuditMetrics& m);
/// `include_timing = false` writes meta.timing_ms as null so the document is
/// byte-reproducible.
nlohmann::ordered_json to_json(const AuditReport& r, bool include_timing = true);
nlohmann::ordered_json to_json(const ExperimentResult& r, bool include_timing = true);

nlohmann::ordered_json to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const nlohmann::ordered_json& doc);

/// Parses "LABEL:beta:A:B:SIZE" or "LABEL:gauss:MU:SIGMA:SIZE".
GroupSpec parse_group_spec(const std::string& text);

/// Pretty-printed with a trailing newline.
std::string dump(const nlohmann::ordered_json& doc);

}  // namespace fairport
