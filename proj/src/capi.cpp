#include "uqkit.h"

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqkit/calibrator_model.hpp"
#include "uqkit/commands.hpp"
#include "uqkit/core.hpp"
#include "uqkit/dose.hpp"
#include "uqkit/errors.hpp"
#include "uqkit/io.hpp"
#include "uqkit/metrics.hpp"

struct uq_calibrator {
    uqkit::CalibratorModel model;
};

namespace {

thread_local std::string last_error_message;

void set_error(const std::string& message) { last_error_message = message; }

// Runs fn, translating exceptions into status codes and the thread-local
// message. fn may itself return a status (for the undefined-metric case).
template <typename Fn>
int guarded(Fn&& fn) noexcept {
    try {
        return fn();
    } catch (const uqkit::input_error& e) {
        set_error(e.what());
        return UQ_ERR_INPUT;
    } catch (const uqkit::io_error& e) {
        set_error(e.what());
        return UQ_ERR_IO;
    } catch (const uqkit::parse_error& e) {
        set_error(e.what());
        return UQ_ERR_PARSE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return UQ_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown failure");
        return UQ_ERR_INTERNAL;
    }
}

int require(bool ok, const char* message) {
    if (ok) return UQ_OK;
    set_error(message);
    return UQ_ERR_INPUT;
}

std::vector<uqkit::ScoreLabelPair> make_pairs(const double* scores, const int* labels,
                                              size_t n) {
    std::vector<uqkit::ScoreLabelPair> pairs(n);
    for (size_t i = 0; i < n; ++i) pairs[i] = {scores[i], labels[i]};
    return pairs;
}

nlohmann::json parse_options(const char* options_json) {
    if (options_json == nullptr) throw uqkit::input_error("options_json is null");
    try {
        return nlohmann::json::parse(options_json);
    } catch (const nlohmann::json::parse_error& e) {
        throw uqkit::parse_error(std::string("options: ") + e.what());
    }
}

} // namespace

extern "C" {

const char* uq_version(void) { return "0.1.0"; }

const char* uq_strerror(int status) {
    switch (status) {
        case UQ_OK: return "ok";
        case UQ_ERR_INPUT: return "invalid input";
        case UQ_ERR_IO: return "io failure";
        case UQ_ERR_PARSE: return "malformed file content";
        case UQ_ERR_UNDEFINED: return "undefined on this input";
        case UQ_ERR_INTERNAL: return "internal error";
        default: return "unknown status";
    }
}

const char* uq_last_error(void) { return last_error_message.c_str(); }

int uq_calibrator_fit(const char* method, const double* scores, const int* labels,
                      size_t n, uq_calibrator** out) {
    if (int rc = require(method && scores && labels && out, "null argument")) return rc;
    return guarded([&] {
        const uqkit::UqMethod m = uqkit::uq_method_from_name(method);
        auto handle = std::make_unique<uq_calibrator>();
        handle->model = uqkit::fit_calibrator(m, make_pairs(scores, labels, n));
        *out = handle.release();
        return UQ_OK;
    });
}

int uq_calibrator_apply(const uq_calibrator* calibrator, const double* raw_scores,
                        size_t n, double* out_value, int* out_label,
                        double* out_uncertainty) {
    if (int rc = require(calibrator && raw_scores, "null argument")) return rc;
    return guarded([&] {
        for (size_t i = 0; i < n; ++i) {
            const uqkit::PredictionRecord record =
                uqkit::apply_calibrator(calibrator->model, raw_scores[i], "", "");
            if (out_value) out_value[i] = record.output();
            if (out_label) out_label[i] = record.predicted_label;
            if (out_uncertainty) out_uncertainty[i] = record.uncertainty;
        }
        return UQ_OK;
    });
}

const char* uq_calibrator_method(const uq_calibrator* calibrator) {
    if (calibrator == nullptr) return "";
    return uqkit::uq_method_name(calibrator->model.method);
}

int uq_calibrator_save(const uq_calibrator* calibrator, const char* path) {
    if (int rc = require(calibrator && path, "null argument")) return rc;
    return guarded([&] {
        uqkit::io::save_calibrator(path, calibrator->model);
        return UQ_OK;
    });
}

int uq_calibrator_load(const char* path, uq_calibrator** out) {
    if (int rc = require(path && out, "null argument")) return rc;
    return guarded([&] {
        auto handle = std::make_unique<uq_calibrator>();
        handle->model = uqkit::io::load_calibrator(path);
        *out = handle.release();
        return UQ_OK;
    });
}

void uq_calibrator_free(uq_calibrator* calibrator) { delete calibrator; }

int uq_auroc(const double* scores, const int* labels, size_t n, double* out) {
    if (int rc = require(scores && labels && out, "null argument")) return rc;
    return guarded([&] {
        const auto value = uqkit::auroc(std::vector<double>(scores, scores + n),
                                        std::vector<int>(labels, labels + n));
        if (!value) {
            set_error("auroc undefined: both classes must be present");
            return static_cast<int>(UQ_ERR_UNDEFINED);
        }
        *out = *value;
        return static_cast<int>(UQ_OK);
    });
}

int uq_auprc(const double* scores, const int* labels, size_t n, double* out) {
    if (int rc = require(scores && labels && out, "null argument")) return rc;
    return guarded([&] {
        const auto value = uqkit::auprc(std::vector<double>(scores, scores + n),
                                        std::vector<int>(labels, labels + n));
        if (!value) {
            set_error("auprc undefined: no positive labels");
            return static_cast<int>(UQ_ERR_UNDEFINED);
        }
        *out = *value;
        return static_cast<int>(UQ_OK);
    });
}

int uq_ace(const double* probs, const int* labels, size_t n, int ranges, double* out) {
    if (int rc = require(probs && labels && out, "null argument")) return rc;
    return guarded([&] {
        *out = uqkit::ace(std::vector<double>(probs, probs + n),
                          std::vector<int>(labels, labels + n), ranges);
        return UQ_OK;
    });
}

int uq_decide_label(double p, int* out) {
    if (int rc = require(out != nullptr, "null argument")) return rc;
    return guarded([&] {
        *out = uqkit::decide_label(p);
        return UQ_OK;
    });
}

int uq_uncertainty_score(double p, int predicted_label, double* out) {
    if (int rc = require(out != nullptr, "null argument")) return rc;
    return guarded([&] {
        *out = uqkit::uncertainty_score(p, predicted_label);
        return UQ_OK;
    });
}

int uq_eqd2(double total_dose, int n_fractions, double alpha_beta, double* out) {
    if (int rc = require(out != nullptr, "null argument")) return rc;
    return guarded([&] {
        uqkit::DoseGrid grid;
        grid.voxels = {total_dose};
        grid.mask = {true};
        grid.n_fractions = n_fractions;
        grid.alpha_beta = alpha_beta;
        *out = uqkit::eqd2_transform(grid)[0];
        return UQ_OK;
    });
}

int uq_cmd_synth(const char* options_json) {
    return guarded([&] {
        uqkit::cmd::synth(uqkit::cmd::synth_options_from_json(parse_options(options_json)));
        return UQ_OK;
    });
}

int uq_cmd_features(const char* options_json) {
    return guarded([&] {
        uqkit::cmd::features(
            uqkit::cmd::features_options_from_json(parse_options(options_json)));
        return UQ_OK;
    });
}

int uq_cmd_run(const char* options_json) {
    return guarded([&] {
        uqkit::cmd::run(uqkit::cmd::run_options_from_json(parse_options(options_json)));
        return UQ_OK;
    });
}

int uq_cmd_report(const char* options_json) {
    return guarded([&] {
        uqkit::cmd::report(uqkit::cmd::report_options_from_json(parse_options(options_json)));
        return UQ_OK;
    });
}

int uq_cmd_calibrate(const char* options_json) {
    return guarded([&] {
        uqkit::cmd::calibrate(
            uqkit::cmd::calibrate_options_from_json(parse_options(options_json)));
        return UQ_OK;
    });
}

int uq_cmd_apply(const char* options_json) {
    return guarded([&] {
        uqkit::cmd::apply(uqkit::cmd::apply_options_from_json(parse_options(options_json)));
        return UQ_OK;
    });
}

} // extern "C"
