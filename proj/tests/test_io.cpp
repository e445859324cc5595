#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "support.hpp"
#include "uqkit/calibrator_model.hpp"
#include "uqkit/errors.hpp"
#include "uqkit/harness.hpp"
#include "uqkit/io.hpp"

using namespace uqkit;

TEST_CASE("format_double round-trips arbitrary doubles") {
    testutil::TestRng rng(211);
    auto roundtrip = [](double v) {
        const std::string s = io::format_double(v);
        return std::strtod(s.c_str(), nullptr);
    };
    for (int i = 0; i < 500; ++i) {
        const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.index(13)) ;
        CHECK(roundtrip(v) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(60.0) == "60");
    CHECK(io::format_double(-0.125) == "-0.125");
    CHECK(io::format_optional(std::optional<double>{}) == "");
    CHECK(io::format_optional(std::optional<int>{3}) == "3");
}

TEST_CASE("csv reader round-trips and tolerates CRLF") {
    testutil::TempDir dir("csv");
    io::CsvTable table;
    table.header = {"a", "b"};
    table.rows = {{"1", "x"}, {"2", ""}};
    const std::string path = dir.file("t.csv");
    io::write_csv(path, table);
    const io::CsvTable back = io::read_csv(path);
    CHECK(back.header == table.header);
    CHECK(back.rows == table.rows);

    const std::string crlf = dir.file("crlf.csv");
    testutil::write_file(crlf, "a,b\r\n1,x\r\n2,y\r\n");
    const io::CsvTable win = io::read_csv(crlf);
    CHECK(win.rows == std::vector<std::vector<std::string>>{{"1", "x"}, {"2", "y"}});
}

TEST_CASE("csv reader reports malformed input precisely") {
    testutil::TempDir dir("csvbad");
    const std::string ragged = dir.file("ragged.csv");
    testutil::write_file(ragged, "a,b\n1,2\n3\n");
    try {
        io::read_csv(ragged);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("expected 2 cells, got 1") != std::string::npos);
    }

    const std::string empty = dir.file("empty.csv");
    testutil::write_file(empty, "");
    CHECK_THROWS_AS(io::read_csv(empty), parse_error);
    CHECK_THROWS_AS(io::read_csv(dir.file("missing.csv")), io_error);
}

TEST_CASE("cell parsers name the offending row and column") {
    CHECK(io::parse_double_cell("1.5", 1, "x") == 1.5);
    CHECK(io::parse_int_cell("-3", 1, "x") == -3);
    CHECK(io::parse_label_cell("1", 1, "x") == 1);
    try {
        io::parse_double_cell("1.5extra", 4, "dose");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 4") != std::string::npos);
        CHECK(msg.find("'dose'") != std::string::npos);
        CHECK(msg.find("1.5extra") != std::string::npos);
    }
    CHECK_THROWS_AS(io::parse_double_cell("", 1, "x"), parse_error);
    CHECK_THROWS_AS(io::parse_int_cell("2.5", 1, "x"), parse_error);
    CHECK_THROWS_AS(io::parse_label_cell("2", 1, "x"), parse_error);
}

TEST_CASE("dataset files round-trip exactly") {
    testutil::TempDir dir("dataset");
    SynthSpec spec;
    spec.n = 25;
    spec.d = 2;
    spec.seed = 19;
    const Dataset ds = synth_generate(spec);

    const std::string fpath = dir.file("features.csv");
    const std::string lpath = dir.file("labels.csv");
    const std::string opath = dir.file("oracle.csv");
    io::write_features_csv(fpath, ds);
    io::write_labels_csv(lpath, ds);
    io::write_oracle_csv(opath, ds);

    const Dataset back = io::read_dataset(fpath, lpath, opath);
    CHECK(back.sample_ids == ds.sample_ids);
    CHECK(back.feature_names == ds.feature_names);
    CHECK(back.features == ds.features);
    CHECK(back.labels == ds.labels);
    REQUIRE(back.oracle_posterior.has_value());
    CHECK(*back.oracle_posterior == *ds.oracle_posterior);

    const Dataset no_oracle = io::read_dataset(fpath, lpath);
    CHECK_FALSE(no_oracle.oracle_posterior.has_value());
}

TEST_CASE("dataset reader rejects inconsistent files") {
    testutil::TempDir dir("datasetbad");
    const std::string fpath = dir.file("features.csv");
    const std::string lpath = dir.file("labels.csv");
    testutil::write_file(fpath, "sample_id,x0\na,0.1\nb,0.2\n");

    SUBCASE("sample order mismatch") {
        testutil::write_file(lpath, "sample_id,label\nb,1\na,0\n");
        CHECK_THROWS_AS(io::read_dataset(fpath, lpath), input_error);
    }
    SUBCASE("row count mismatch") {
        testutil::write_file(lpath, "sample_id,label\na,1\n");
        CHECK_THROWS_AS(io::read_dataset(fpath, lpath), input_error);
    }
    SUBCASE("bad label value") {
        testutil::write_file(lpath, "sample_id,label\na,1\nb,7\n");
        CHECK_THROWS_AS(io::read_dataset(fpath, lpath), parse_error);
    }
    SUBCASE("wrong label header") {
        testutil::write_file(lpath, "sample_id,y\na,1\nb,0\n");
        CHECK_THROWS_AS(io::read_dataset(fpath, lpath), parse_error);
    }
    SUBCASE("posterior outside unit interval") {
        testutil::write_file(lpath, "sample_id,label\na,1\nb,0\n");
        const std::string opath = dir.file("oracle.csv");
        testutil::write_file(opath, "sample_id,posterior\na,0.5\nb,1.5\n");
        CHECK_THROWS_AS(io::read_dataset(fpath, lpath, opath), input_error);
    }
}

TEST_CASE("feature matrix files need an id and one feature column") {
    testutil::TempDir dir("matrix");
    const std::string path = dir.file("m.csv");
    testutil::write_file(path, "sample_id\na\n");
    std::vector<std::string> ids;
    CHECK_THROWS_AS(io::read_feature_matrix(path, ids), parse_error);

    testutil::write_file(path, "id,x0\na,1\n");
    CHECK_THROWS_AS(io::read_feature_matrix(path, ids), parse_error);

    FeatureMatrix m;
    m.names = {"v1", "v2"};
    m.n_rows = 2;
    m.values = {0.25, -1.5, 3.0, 0.0};
    io::write_feature_matrix(path, {"a", "b"}, m);
    const FeatureMatrix back = io::read_feature_matrix(path, ids);
    CHECK(ids == std::vector<std::string>{"a", "b"});
    CHECK(back.names == m.names);
    CHECK(back.values == m.values);
    CHECK_THROWS_AS(io::write_feature_matrix(path, {"a"}, m), input_error);
}

TEST_CASE("score files round-trip with and without labels") {
    testutil::TempDir dir("scores");
    const std::string path = dir.file("scores.csv");

    std::vector<io::ScoreRow> labeled{{"a", 0.25, 1}, {"b", 0.75, 0}};
    io::write_scores_csv(path, labeled);
    auto back = io::read_scores_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].sample_id == "a");
    CHECK(back[0].raw_score == 0.25);
    CHECK(back[0].label == 1);
    CHECK(back[1].label == 0);

    std::vector<io::ScoreRow> bare{{"a", 0.5, std::nullopt}};
    io::write_scores_csv(path, bare);
    back = io::read_scores_csv(path);
    REQUIRE(back.size() == 1);
    CHECK_FALSE(back[0].label.has_value());

    std::vector<io::ScoreRow> mixed{{"a", 0.5, 1}, {"b", 0.5, std::nullopt}};
    CHECK_THROWS_AS(io::write_scores_csv(path, mixed), input_error);

    testutil::write_file(path, "sample_id,raw_score\na,1.25\n");
    CHECK_THROWS_AS(io::read_scores_csv(path), input_error);
    testutil::write_file(path, "sample_id,score\na,0.5\n");
    CHECK_THROWS_AS(io::read_scores_csv(path), parse_error);
}

TEST_CASE("prediction records survive the csv round-trip exactly") {
    testutil::TempDir dir("pred");
    std::vector<PredictionRecord> records;

    PredictionRecord prob;
    prob.sample_id = "s01";
    prob.model_name = "lr";
    prob.uq_method = UqMethod::ps;
    prob.fold = 3;
    prob.raw_score = 0.62;
    prob.prob = 0.7131;
    prob.predicted_label = 1;
    prob.uncertainty = 1.0 - 0.7131;
    prob.true_label = 0;
    records.push_back(prob);

    PredictionRecord pval;
    pval.sample_id = "s02";
    pval.model_name = "rf";
    pval.uq_method = UqMethod::cp;
    pval.fold = 0;
    pval.raw_score = 0.41;
    pval.p_value = 0.125;
    pval.predicted_label = 0;
    pval.uncertainty = 0.125;
    records.push_back(pval);   // true label left absent on purpose

    const std::string path = dir.file("predictions.csv");
    io::write_predictions_csv(path, records);
    const auto back = io::read_predictions_csv(path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].sample_id == records[i].sample_id);
        CHECK(back[i].model_name == records[i].model_name);
        CHECK(back[i].uq_method == records[i].uq_method);
        CHECK(back[i].fold == records[i].fold);
        CHECK(back[i].raw_score == records[i].raw_score);
        CHECK(back[i].prob == records[i].prob);
        CHECK(back[i].p_value == records[i].p_value);
        CHECK(back[i].predicted_label == records[i].predicted_label);
        CHECK(back[i].uncertainty == records[i].uncertainty);
        CHECK(back[i].true_label == records[i].true_label);
    }

    // Reading validates: a corrupted uncertainty cell is caught.
    std::string text = testutil::read_file(path);
    const auto pos = text.find("0.125,0,0.125");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 13, "0.125,0,0.999");
    testutil::write_file(path, text);
    CHECK_THROWS_AS(io::read_predictions_csv(path), input_error);
}

TEST_CASE("calibrators round-trip through json files") {
    testutil::TempDir dir("cal");
    testutil::TestRng rng(223);
    std::vector<ScoreLabelPair> pairs;
    for (int i = 0; i < 40; ++i) {
        const double f = rng.uniform();
        pairs.push_back({f, rng.bernoulli(f)});
    }
    pairs[0].label = 1;
    pairs[1].label = 0;

    const std::string path = dir.file("cal.json");
    for (UqMethod method : {UqMethod::uc, UqMethod::ps, UqMethod::ir,
                            UqMethod::va, UqMethod::cp}) {
        CAPTURE(uq_method_name(method));
        const CalibratorModel fitted = fit_calibrator(method, pairs);
        io::save_calibrator(path, fitted);
        const CalibratorModel loaded = io::load_calibrator(path);
        CHECK(loaded.method == fitted.method);
        CHECK(loaded.meta.n == fitted.meta.n);
        for (double f : {0.0, 0.1, 0.33, 0.5, 0.77, 1.0}) {
            const auto a = apply_calibrator(fitted, f, "q", "m");
            const auto b = apply_calibrator(loaded, f, "q", "m");
            CHECK(a.prob == b.prob);
            CHECK(a.p_value == b.p_value);
            CHECK(a.predicted_label == b.predicted_label);
            CHECK(a.uncertainty == b.uncertainty);
        }
    }
}

TEST_CASE("calibrator files reject malformed content") {
    testutil::TempDir dir("calbad");
    const std::string path = dir.file("cal.json");
    testutil::write_file(path, "{ not json");
    CHECK_THROWS_AS(io::load_calibrator(path), parse_error);
    testutil::write_file(path, "{\"params\": {\"a\": 0}}");
    CHECK_THROWS_AS(io::load_calibrator(path), parse_error);
    testutil::write_file(path, "{\"method\": \"ps\", \"params\": {\"a\": 0}}");
    CHECK_THROWS_AS(io::load_calibrator(path), parse_error);
    testutil::write_file(path, "{\"method\": \"ir\", \"knots\": {\"scores\": [], \"values\": [], \"weights\": []}}");
    CHECK_THROWS_AS(io::load_calibrator(path), parse_error);
    testutil::write_file(path, "{\"method\": \"cp\", \"alphas\": []}");
    CHECK_THROWS_AS(io::load_calibrator(path), parse_error);
}

TEST_CASE("dose grids round-trip through csv and binary") {
    testutil::TempDir dir("dose");
    DoseGrid grid;
    grid.voxels = {0.0, 2.5, 61.2, 1e-300, 12345.6789};
    grid.mask = {true, false, true, true, false};

    const std::string csv = dir.file("grid.csv");
    io::write_dose_csv(csv, grid);
    const DoseGrid via_csv = io::read_dose_csv(csv);
    CHECK(via_csv.voxels == grid.voxels);
    CHECK(via_csv.mask == grid.mask);

    const std::string bin = dir.file("grid.bin");
    io::write_dose_binary(bin, grid);
    const DoseGrid via_bin = io::read_dose_binary(bin);
    CHECK(via_bin.voxels == grid.voxels);
    CHECK(via_bin.mask == grid.mask);

    // Extension dispatch.
    CHECK(io::read_dose_grid(bin).voxels == grid.voxels);
    CHECK(io::read_dose_grid(csv).voxels == grid.voxels);
}

TEST_CASE("dose readers reject corrupted files") {
    testutil::TempDir dir("dosebad");
    const std::string csv = dir.file("grid.csv");
    testutil::write_file(csv, "voxel_index,dose,mask\n0,1.0,1\n2,2.0,0\n");
    CHECK_THROWS_AS(io::read_dose_csv(csv), parse_error);
    testutil::write_file(csv, "voxel_index,dose,mask\n0,1.0,3\n");
    CHECK_THROWS_AS(io::read_dose_csv(csv), parse_error);

    DoseGrid grid;
    grid.voxels = {1.0, 2.0};
    grid.mask = {true, true};
    const std::string bin = dir.file("grid.bin");
    io::write_dose_binary(bin, grid);

    std::string data = testutil::read_file(bin);
    testutil::write_file(bin, data.substr(0, data.size() - 3));
    CHECK_THROWS_AS(io::read_dose_binary(bin), parse_error);

    std::string magic = data;
    magic[0] = 'X';
    testutil::write_file(bin, magic);
    CHECK_THROWS_AS(io::read_dose_binary(bin), parse_error);

    std::string version = data;
    version[4] = '\x07';
    testutil::write_file(bin, version);
    CHECK_THROWS_AS(io::read_dose_binary(bin), parse_error);

    std::string badmask = data;
    badmask[badmask.size() - 1] = '\x02';
    testutil::write_file(bin, badmask);
    CHECK_THROWS_AS(io::read_dose_binary(bin), parse_error);
}

TEST_CASE("json file helpers") {
    testutil::TempDir dir("json");
    const std::string path = dir.file("x.json");
    const nlohmann::json j = {{"k", 1}, {"arr", {1, 2, 3}}};
    io::write_json_file(path, j);
    CHECK(io::read_json_file(path) == j);
    testutil::write_file(path, "[1, 2,");
    try {
        io::read_json_file(path);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
    CHECK_THROWS_AS(io::read_json_file(dir.file("nope.json")), io_error);
}
