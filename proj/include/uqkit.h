/* uqkit C interface: post-hoc uncertainty quantification for binary
 * classifiers. All functions return a uq_status code; uq_last_error()
 * holds a thread-local message for the most recent failure on the calling
 * thread. Array arguments are caller-owned; handles are released with
 * their matching _free function.
 */
#ifndef UQKIT_H
#define UQKIT_H

#include <stddef.h>

#ifndef UQ_API
#define UQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uq_status {
    UQ_OK = 0,
    UQ_ERR_INPUT = 1,       /* invalid values, lengths, or option schemas */
    UQ_ERR_IO = 2,          /* missing or unwritable files */
    UQ_ERR_PARSE = 3,       /* malformed file content */
    UQ_ERR_UNDEFINED = 4,   /* metric undefined on this input (single class) */
    UQ_ERR_INTERNAL = 5
} uq_status;

UQ_API const char* uq_version(void);

/* Static description of a status code. */
UQ_API const char* uq_strerror(int status);

/* Message for the calling thread's most recent failure; never NULL. */
UQ_API const char* uq_last_error(void);

/* ---- calibrators ----------------------------------------------------
 * method is one of "uc", "ps", "ir", "va", "cp". Fitting takes raw
 * classifier scores in [0,1] with binary labels. Applying fills, per
 * input score: the method's output (probability, or p-value for "cp"),
 * the decided label, and the uncertainty score s(x). Output arrays may
 * be NULL when the caller does not need them.
 */
typedef struct uq_calibrator uq_calibrator;

UQ_API int uq_calibrator_fit(const char* method, const double* scores,
                             const int* labels, size_t n, uq_calibrator** out);
UQ_API int uq_calibrator_apply(const uq_calibrator* calibrator,
                               const double* raw_scores, size_t n,
                               double* out_value, int* out_label,
                               double* out_uncertainty);
UQ_API const char* uq_calibrator_method(const uq_calibrator* calibrator);
UQ_API int uq_calibrator_save(const uq_calibrator* calibrator, const char* path);
UQ_API int uq_calibrator_load(const char* path, uq_calibrator** out);
UQ_API void uq_calibrator_free(uq_calibrator* calibrator);

/* ---- metrics ---------------------------------------------------------
 * UQ_ERR_UNDEFINED with *out untouched when the metric does not exist on
 * the input (missing class / no positives), matching the reports' empty
 * cells.
 */
UQ_API int uq_auroc(const double* scores, const int* labels, size_t n, double* out);
UQ_API int uq_auprc(const double* scores, const int* labels, size_t n, double* out);
UQ_API int uq_ace(const double* probs, const int* labels, size_t n, int ranges,
                  double* out);

/* ---- scalar rules ---------------------------------------------------- */
UQ_API int uq_decide_label(double p, int* out);
UQ_API int uq_uncertainty_score(double p, int predicted_label, double* out);
/* Equivalent dose in 2 Gy fractions for one voxel's total dose. */
UQ_API int uq_eqd2(double total_dose, int n_fractions, double alpha_beta, double* out);

/* ---- commands --------------------------------------------------------
 * File-level drivers mirroring the CLI; options_json is a JSON object
 * whose keys match the documented command options. Unknown keys are
 * rejected with UQ_ERR_INPUT.
 */
UQ_API int uq_cmd_synth(const char* options_json);
UQ_API int uq_cmd_features(const char* options_json);
UQ_API int uq_cmd_run(const char* options_json);
UQ_API int uq_cmd_report(const char* options_json);
UQ_API int uq_cmd_calibrate(const char* options_json);
UQ_API int uq_cmd_apply(const char* options_json);

#ifdef __cplusplus
}
#endif

#endif /* UQKIT_H */
