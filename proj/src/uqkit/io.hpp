#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqkit/calibrator_model.hpp"
#include "uqkit/core.hpp"
#include "uqkit/dose.hpp"
#include "uqkit/features.hpp"

namespace uqkit::io {

// Shortest decimal representation that round-trips the double, so emitted
// files are byte-stable across runs.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);
std::string format_optional(const std::optional<int>& v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;   // every row matches header size
};

// Strict comma-separated reader: no quoting, one header line, uniform cell
// counts. Malformed rows raise parse_error naming the 1-based data row.
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Cell parsers carrying row/column diagnostics into the error message.
double parse_double_cell(const std::string& cell, std::size_t row, const std::string& column);
int parse_int_cell(const std::string& cell, std::size_t row, const std::string& column);
int parse_label_cell(const std::string& cell, std::size_t row, const std::string& column);

// Dataset files. features.csv: sample_id then named feature columns;
// labels.csv: sample_id,label; oracle.csv: sample_id,posterior. Readers
// require identical sample_id order across the files they join.
void write_features_csv(const std::string& path, const Dataset& ds);
void write_labels_csv(const std::string& path, const Dataset& ds);
void write_oracle_csv(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& features_path,
                     const std::string& labels_path,
                     const std::optional<std::string>& oracle_path = std::nullopt);

// Standalone feature matrix (no labels), same features.csv layout.
FeatureMatrix read_feature_matrix(const std::string& path,
                                  std::vector<std::string>& sample_ids);
void write_feature_matrix(const std::string& path,
                          const std::vector<std::string>& sample_ids,
                          const FeatureMatrix& m);

// External score files: sample_id,raw_score with an optional label column.
struct ScoreRow {
    std::string sample_id;
    double raw_score = 0.0;
    std::optional<int> label;
};
std::vector<ScoreRow> read_scores_csv(const std::string& path);
void write_scores_csv(const std::string& path, const std::vector<ScoreRow>& rows);

// PredictionRecord files; absent optionals serialize as empty cells and
// parse(emit(x)) reproduces x exactly.
void write_predictions_csv(const std::string& path,
                           const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_predictions_csv(const std::string& path);

// Fitted calibrator round-trip through JSON.
nlohmann::json calibrator_to_json(const CalibratorModel& calibrator);
CalibratorModel calibrator_from_json(const nlohmann::json& j);
void save_calibrator(const std::string& path, const CalibratorModel& calibrator);
CalibratorModel load_calibrator(const std::string& path);

// Dose grids. CSV: voxel_index,dose,mask rows (index must run 0..V-1).
// Binary: magic "UQDG", u32 version, u64 count, count f64 doses, count u8
// mask flags, everything little-endian. Fractionation and alpha/beta are
// not stored; callers supply them.
DoseGrid read_dose_csv(const std::string& path);
DoseGrid read_dose_binary(const std::string& path);
void write_dose_csv(const std::string& path, const DoseGrid& grid);
void write_dose_binary(const std::string& path, const DoseGrid& grid);
// Dispatches on extension: ".bin" binary, anything else CSV.
DoseGrid read_dose_grid(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace uqkit::io
