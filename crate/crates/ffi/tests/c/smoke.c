#include <math.h>
#include <stdio.h>
#include <string.h>
#include "hrvlab.h"

#define CHECK(expr)                                                        \
    do {                                                                   \
        if (!(expr)) {                                                     \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #expr, \
                    hrv_last_error() ? hrv_last_error() : "");             \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    HrvSampleBatch *batch = NULL;
    CHECK(hrv_generate_experiment("ex31-case1", 2000, 7, 2, &batch) == HRV_STATUS_OK);
    CHECK(hrv_batch_len(batch) == 2000);

    double z1, z2;
    CHECK(hrv_batch_get(batch, 0, &z1, &z2) == HRV_STATUS_OK);
    CHECK(hrv_batch_get(batch, 2000, &z1, &z2) == HRV_STATUS_USAGE);

    HrvReport *report = NULL;
    const char *cfg = "{\"thresholds\": [50], \"k_grid\": {\"k_min\": 10, \"k_max\": 150}}";
    CHECK(hrv_detect(batch, cfg, &report) == HRV_STATUS_OK);
    CHECK(isfinite(hrv_report_value(report, "min_hill", 100)));

    char *json = NULL;
    CHECK(hrv_report_json(report, &json) == HRV_STATUS_OK);
    CHECK(strstr(json, "\"series\"") != NULL);
    hrv_string_free(json);

    double r, t;
    int which;
    CHECK(hrv_gpolar_axes(3.0, 12.0, &r, &t, &which) == HRV_STATUS_OK);
    CHECK(r == 3.0 && t == 4.0 && which == 2);
    CHECK(hrv_gpolar_axes(-1.0, 2.0, &r, &t, &which) == HRV_STATUS_DOMAIN);

    hrv_report_free(report);
    hrv_batch_free(batch);
    puts("ok");
    return 0;
}
