#include "uqkit/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "uqkit/errors.hpp"

namespace uqkit::io {

std::string format_double(double v) {
    std::array<char, 40> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::string format_optional(const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw io_error("read failure on '" + path + "'");
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) throw io_error("write failure on '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error("'" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

} // namespace

CsvTable read_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    CsvTable table;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos = end + 1;
        if (line.empty() && pos >= text.size()) break;   // trailing blank line
        ++line_no;
        std::vector<std::string> cells = split_line(line);
        if (line_no == 1) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw parse_error("'" + path + "' row " + std::to_string(line_no - 1) +
                              ": expected " + std::to_string(table.header.size()) +
                              " cells, got " + std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw parse_error("'" + path + "': missing header line");
    return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += cells[i];
        }
        out.push_back('\n');
    };
    append_row(table.header);
    for (const auto& row : table.rows) append_row(row);
    write_text_file(path, out);
}

double parse_double_cell(const std::string& cell, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), last, value);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last) {
        throw parse_error("row " + std::to_string(row) + ", column '" + column +
                          "': expected a number, got '" + cell + "'");
    }
    return value;
}

int parse_int_cell(const std::string& cell, std::size_t row, const std::string& column) {
    int value = 0;
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), last, value);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last) {
        throw parse_error("row " + std::to_string(row) + ", column '" + column +
                          "': expected an integer, got '" + cell + "'");
    }
    return value;
}

int parse_label_cell(const std::string& cell, std::size_t row, const std::string& column) {
    const int value = parse_int_cell(cell, row, column);
    if (value != 0 && value != 1) {
        throw parse_error("row " + std::to_string(row) + ", column '" + column +
                          "': labels must be 0 or 1, got '" + cell + "'");
    }
    return value;
}

namespace {

void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                    const std::string& path) {
    if (table.header != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) want.push_back(',');
            want += expected[i];
        }
        throw parse_error("'" + path + "': expected header '" + want + "'");
    }
}

void require_id_column(const CsvTable& table, const std::string& path) {
    if (table.header.empty() || table.header.front() != "sample_id") {
        throw parse_error("'" + path + "': first column must be sample_id");
    }
}

} // namespace

void write_features_csv(const std::string& path, const Dataset& ds) {
    CsvTable table;
    table.header.push_back("sample_id");
    table.header.insert(table.header.end(), ds.feature_names.begin(), ds.feature_names.end());
    table.rows.reserve(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        std::vector<std::string> row;
        row.reserve(1 + ds.d());
        row.push_back(ds.sample_ids[i]);
        for (std::size_t j = 0; j < ds.d(); ++j) row.push_back(format_double(ds.at(i, j)));
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

void write_labels_csv(const std::string& path, const Dataset& ds) {
    CsvTable table;
    table.header = {"sample_id", "label"};
    for (std::size_t i = 0; i < ds.n(); ++i) {
        table.rows.push_back({ds.sample_ids[i], std::to_string(ds.labels[i])});
    }
    write_csv(path, table);
}

void write_oracle_csv(const std::string& path, const Dataset& ds) {
    if (!ds.oracle_posterior) throw input_error("dataset has no oracle posterior");
    CsvTable table;
    table.header = {"sample_id", "posterior"};
    for (std::size_t i = 0; i < ds.n(); ++i) {
        table.rows.push_back({ds.sample_ids[i], format_double((*ds.oracle_posterior)[i])});
    }
    write_csv(path, table);
}

FeatureMatrix read_feature_matrix(const std::string& path,
                                  std::vector<std::string>& sample_ids) {
    const CsvTable table = read_csv(path);
    require_id_column(table, path);
    if (table.header.size() < 2) {
        throw parse_error("'" + path + "': needs at least one feature column");
    }
    FeatureMatrix m;
    m.names.assign(table.header.begin() + 1, table.header.end());
    m.n_rows = table.rows.size();
    m.values.reserve(m.n_rows * m.names.size());
    sample_ids.clear();
    sample_ids.reserve(m.n_rows);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        sample_ids.push_back(table.rows[r][0]);
        for (std::size_t c = 1; c < table.header.size(); ++c) {
            m.values.push_back(parse_double_cell(table.rows[r][c], r + 1, table.header[c]));
        }
    }
    return m;
}

void write_feature_matrix(const std::string& path,
                          const std::vector<std::string>& sample_ids,
                          const FeatureMatrix& m) {
    if (sample_ids.size() != m.n_rows) throw input_error("sample_id count mismatch");
    CsvTable table;
    table.header.push_back("sample_id");
    table.header.insert(table.header.end(), m.names.begin(), m.names.end());
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        std::vector<std::string> row;
        row.reserve(1 + m.n_cols());
        row.push_back(sample_ids[r]);
        for (std::size_t c = 0; c < m.n_cols(); ++c) row.push_back(format_double(m.at(r, c)));
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

Dataset read_dataset(const std::string& features_path,
                     const std::string& labels_path,
                     const std::optional<std::string>& oracle_path) {
    Dataset ds;
    FeatureMatrix m = read_feature_matrix(features_path, ds.sample_ids);
    ds.feature_names = std::move(m.names);
    ds.features = std::move(m.values);

    const CsvTable labels = read_csv(labels_path);
    require_header(labels, {"sample_id", "label"}, labels_path);
    if (labels.rows.size() != ds.sample_ids.size()) {
        throw input_error("'" + labels_path + "' has " + std::to_string(labels.rows.size()) +
                          " rows but the feature file has " +
                          std::to_string(ds.sample_ids.size()));
    }
    ds.labels.reserve(labels.rows.size());
    for (std::size_t r = 0; r < labels.rows.size(); ++r) {
        if (labels.rows[r][0] != ds.sample_ids[r]) {
            throw input_error("'" + labels_path + "' row " + std::to_string(r + 1) +
                              ": sample_id '" + labels.rows[r][0] +
                              "' does not match feature file id '" + ds.sample_ids[r] + "'");
        }
        ds.labels.push_back(parse_label_cell(labels.rows[r][1], r + 1, "label"));
    }

    if (oracle_path) {
        const CsvTable oracle = read_csv(*oracle_path);
        require_header(oracle, {"sample_id", "posterior"}, *oracle_path);
        if (oracle.rows.size() != ds.sample_ids.size()) {
            throw input_error("'" + *oracle_path + "' row count does not match the feature file");
        }
        std::vector<double> posterior;
        posterior.reserve(oracle.rows.size());
        for (std::size_t r = 0; r < oracle.rows.size(); ++r) {
            if (oracle.rows[r][0] != ds.sample_ids[r]) {
                throw input_error("'" + *oracle_path + "' row " + std::to_string(r + 1) +
                                  ": sample_id mismatch");
            }
            const double q = parse_double_cell(oracle.rows[r][1], r + 1, "posterior");
            if (!(q >= 0.0 && q <= 1.0)) {
                throw input_error("'" + *oracle_path + "' row " + std::to_string(r + 1) +
                                  ": posterior outside [0,1]");
            }
            posterior.push_back(q);
        }
        ds.oracle_posterior = std::move(posterior);
    }
    validate_dataset(ds);
    return ds;
}

std::vector<ScoreRow> read_scores_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const bool with_labels = table.header.size() == 3;
    if (with_labels) {
        require_header(table, {"sample_id", "raw_score", "label"}, path);
    } else {
        require_header(table, {"sample_id", "raw_score"}, path);
    }
    std::vector<ScoreRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ScoreRow row;
        row.sample_id = table.rows[r][0];
        row.raw_score = parse_double_cell(table.rows[r][1], r + 1, "raw_score");
        if (!(row.raw_score >= 0.0 && row.raw_score <= 1.0)) {
            throw input_error("'" + path + "' row " + std::to_string(r + 1) +
                              ": raw_score outside [0,1]");
        }
        if (with_labels) {
            row.label = parse_label_cell(table.rows[r][2], r + 1, "label");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_scores_csv(const std::string& path, const std::vector<ScoreRow>& rows) {
    const bool with_labels = !rows.empty() && rows.front().label.has_value();
    CsvTable table;
    table.header = with_labels
        ? std::vector<std::string>{"sample_id", "raw_score", "label"}
        : std::vector<std::string>{"sample_id", "raw_score"};
    for (const ScoreRow& row : rows) {
        if (row.label.has_value() != with_labels) {
            throw input_error("score rows mix labeled and unlabeled entries");
        }
        std::vector<std::string> cells{row.sample_id, format_double(row.raw_score)};
        if (with_labels) cells.push_back(std::to_string(*row.label));
        table.rows.push_back(std::move(cells));
    }
    write_csv(path, table);
}

namespace {

const std::vector<std::string> prediction_header = {
    "sample_id", "model", "uq_method", "fold", "raw_score", "prob",
    "p_value", "predicted_label", "uncertainty", "true_label"};

} // namespace

void write_predictions_csv(const std::string& path,
                           const std::vector<PredictionRecord>& records) {
    CsvTable table;
    table.header = prediction_header;
    table.rows.reserve(records.size());
    for (const PredictionRecord& r : records) {
        table.rows.push_back({r.sample_id,
                              r.model_name,
                              uq_method_name(r.uq_method),
                              std::to_string(r.fold),
                              format_double(r.raw_score),
                              format_optional(r.prob),
                              format_optional(r.p_value),
                              std::to_string(r.predicted_label),
                              format_double(r.uncertainty),
                              format_optional(r.true_label)});
    }
    write_csv(path, table);
}

std::vector<PredictionRecord> read_predictions_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    require_header(table, prediction_header, path);
    std::vector<PredictionRecord> records;
    records.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t r = i + 1;
        PredictionRecord rec;
        rec.sample_id = row[0];
        rec.model_name = row[1];
        rec.uq_method = uq_method_from_name(row[2]);
        rec.fold = parse_int_cell(row[3], r, "fold");
        rec.raw_score = parse_double_cell(row[4], r, "raw_score");
        if (!row[5].empty()) rec.prob = parse_double_cell(row[5], r, "prob");
        if (!row[6].empty()) rec.p_value = parse_double_cell(row[6], r, "p_value");
        rec.predicted_label = parse_label_cell(row[7], r, "predicted_label");
        rec.uncertainty = parse_double_cell(row[8], r, "uncertainty");
        if (!row[9].empty()) rec.true_label = parse_label_cell(row[9], r, "true_label");
        validate_record(rec);
        records.push_back(std::move(rec));
    }
    return records;
}

nlohmann::json calibrator_to_json(const CalibratorModel& calibrator) {
    nlohmann::json j;
    j["method"] = uq_method_name(calibrator.method);
    switch (calibrator.method) {
        case UqMethod::uc:
            break;
        case UqMethod::ps: {
            const auto& p = std::get<PlattParams>(calibrator.model);
            j["params"] = {{"a", p.a}, {"b", p.b}};
            break;
        }
        case UqMethod::ir: {
            const auto& m = std::get<IsotonicModel>(calibrator.model);
            j["knots"] = {{"scores", m.knot_scores},
                          {"values", m.knot_values},
                          {"weights", m.knot_weights}};
            break;
        }
        case UqMethod::va: {
            const auto& m = std::get<VennAbersModel>(calibrator.model);
            std::vector<double> scores;
            std::vector<int> labels;
            scores.reserve(m.calibration_pairs.size());
            labels.reserve(m.calibration_pairs.size());
            for (const ScoreLabelPair& p : m.calibration_pairs) {
                scores.push_back(p.score);
                labels.push_back(p.label);
            }
            j["calibration"] = {{"scores", scores}, {"labels", labels}};
            break;
        }
        case UqMethod::cp: {
            const auto& m = std::get<ConformalModel>(calibrator.model);
            j["alphas"] = m.alphas;
            j["epsilon_clip"] = m.epsilon_clip;
            break;
        }
    }
    j["fit"] = {{"n", calibrator.meta.n},
                {"seed", calibrator.meta.seed},
                {"converged", calibrator.meta.convergence_flag}};
    return j;
}

CalibratorModel calibrator_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("method") || !j.at("method").is_string()) {
        throw parse_error("calibrator file needs a string 'method' field");
    }
    CalibratorModel calibrator;
    calibrator.method = uq_method_from_name(j.at("method").get<std::string>());
    try {
        switch (calibrator.method) {
            case UqMethod::uc:
                calibrator.model = std::monostate{};
                break;
            case UqMethod::ps: {
                PlattParams p;
                p.a = j.at("params").at("a").get<double>();
                p.b = j.at("params").at("b").get<double>();
                calibrator.model = p;
                break;
            }
            case UqMethod::ir: {
                IsotonicModel m;
                m.knot_scores = j.at("knots").at("scores").get<std::vector<double>>();
                m.knot_values = j.at("knots").at("values").get<std::vector<double>>();
                m.knot_weights = j.at("knots").at("weights").get<std::vector<double>>();
                if (m.knot_scores.size() != m.knot_values.size() ||
                    m.knot_scores.size() != m.knot_weights.size() || m.knot_scores.empty()) {
                    throw parse_error("isotonic knot arrays must be nonempty and equal length");
                }
                calibrator.model = std::move(m);
                break;
            }
            case UqMethod::va: {
                const auto scores = j.at("calibration").at("scores").get<std::vector<double>>();
                const auto labels = j.at("calibration").at("labels").get<std::vector<int>>();
                if (scores.size() != labels.size() || scores.empty()) {
                    throw parse_error("calibration arrays must be nonempty and equal length");
                }
                VennAbersModel m;
                m.calibration_pairs.reserve(scores.size());
                for (std::size_t i = 0; i < scores.size(); ++i) {
                    m.calibration_pairs.push_back({scores[i], labels[i]});
                }
                validate_pairs(m.calibration_pairs);
                calibrator.model = std::move(m);
                break;
            }
            case UqMethod::cp: {
                ConformalModel m;
                m.alphas = j.at("alphas").get<std::vector<double>>();
                if (m.alphas.empty()) throw parse_error("conformal alpha bag is empty");
                if (j.contains("epsilon_clip")) {
                    m.epsilon_clip = j.at("epsilon_clip").get<double>();
                }
                calibrator.model = std::move(m);
                break;
            }
        }
        if (j.contains("fit")) {
            const auto& fit = j.at("fit");
            calibrator.meta.n = fit.value("n", std::size_t{0});
            calibrator.meta.seed = fit.value("seed", std::uint64_t{0});
            calibrator.meta.convergence_flag = fit.value("converged", true);
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("calibrator file: ") + e.what());
    }
    return calibrator;
}

void save_calibrator(const std::string& path, const CalibratorModel& calibrator) {
    write_json_file(path, calibrator_to_json(calibrator));
}

CalibratorModel load_calibrator(const std::string& path) {
    return calibrator_from_json(read_json_file(path));
}

void write_dose_csv(const std::string& path, const DoseGrid& grid) {
    CsvTable table;
    table.header = {"voxel_index", "dose", "mask"};
    for (std::size_t i = 0; i < grid.voxels.size(); ++i) {
        table.rows.push_back({std::to_string(i), format_double(grid.voxels[i]),
                              grid.mask[i] ? "1" : "0"});
    }
    write_csv(path, table);
}

DoseGrid read_dose_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    require_header(table, {"voxel_index", "dose", "mask"}, path);
    DoseGrid grid;
    grid.voxels.reserve(table.rows.size());
    grid.mask.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const int idx = parse_int_cell(table.rows[r][0], r + 1, "voxel_index");
        if (idx != static_cast<int>(r)) {
            throw parse_error("'" + path + "' row " + std::to_string(r + 1) +
                              ": voxel_index must run 0.." +
                              std::to_string(table.rows.size() - 1) + " in order");
        }
        grid.voxels.push_back(parse_double_cell(table.rows[r][1], r + 1, "dose"));
        grid.mask.push_back(parse_label_cell(table.rows[r][2], r + 1, "mask") == 1);
    }
    return grid;
}

namespace {

constexpr char dose_magic[4] = {'U', 'Q', 'D', 'G'};
constexpr std::uint32_t dose_version = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | static_cast<unsigned char>(s[pos + static_cast<std::size_t>(i)]);
    }
    return v;
}

std::uint64_t get_u64(const std::string& s, std::size_t pos) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | static_cast<unsigned char>(s[pos + static_cast<std::size_t>(i)]);
    }
    return v;
}

} // namespace

void write_dose_binary(const std::string& path, const DoseGrid& grid) {
    std::string out;
    out.reserve(16 + grid.voxels.size() * 9);
    out.append(dose_magic, 4);
    put_u32(out, dose_version);
    put_u64(out, grid.voxels.size());
    for (double v : grid.voxels) put_u64(out, std::bit_cast<std::uint64_t>(v));
    for (bool b : grid.mask) out.push_back(b ? '\x01' : '\x00');
    write_text_file(path, out);
}

DoseGrid read_dose_binary(const std::string& path) {
    const std::string data = read_text_file(path);
    if (data.size() < 16 || data.compare(0, 4, dose_magic, 4) != 0) {
        throw parse_error("'" + path + "': not a dose grid file (bad magic)");
    }
    if (get_u32(data, 4) != dose_version) {
        throw parse_error("'" + path + "': unsupported dose grid version");
    }
    const std::uint64_t count = get_u64(data, 8);
    const std::size_t need = 16 + count * 9;
    if (data.size() != need) {
        throw parse_error("'" + path + "': truncated dose grid (expected " +
                          std::to_string(need) + " bytes, got " +
                          std::to_string(data.size()) + ")");
    }
    DoseGrid grid;
    grid.voxels.reserve(count);
    grid.mask.reserve(count);
    std::size_t pos = 16;
    for (std::uint64_t i = 0; i < count; ++i, pos += 8) {
        grid.voxels.push_back(std::bit_cast<double>(get_u64(data, pos)));
    }
    for (std::uint64_t i = 0; i < count; ++i, ++pos) {
        const auto b = static_cast<unsigned char>(data[pos]);
        if (b > 1) throw parse_error("'" + path + "': mask bytes must be 0 or 1");
        grid.mask.push_back(b == 1);
    }
    return grid;
}

DoseGrid read_dose_grid(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0) {
        return read_dose_binary(path);
    }
    return read_dose_csv(path);
}

} // namespace uqkit::io
