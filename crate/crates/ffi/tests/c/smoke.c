#include <stdio.h>
#include <string.h>
#include <math.h>

#include "stanceforest.h"

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,      \
                    #cond, sf_last_error() ? sf_last_error() : "-");     \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    float rows[60 * 2];
    uint8_t labels[60];
    for (int i = 0; i < 60; i++) {
        int c = i % 3;
        rows[2 * i] = (float)(c * 10) + (float)(i % 7) * 0.1f;
        rows[2 * i + 1] = (float)(i % 5);
        labels[i] = (uint8_t)c;
    }

    SfForestParams params = sf_forest_params_default();
    params.n_trees = 15;
    params.seed = 7;
    SfModel *model = NULL;
    CHECK(sf_model_fit(rows, labels, 60, 2, &params, &model) == SF_STATUS_OK);
    CHECK(sf_model_dim(model) == 2);
    CHECK(sf_model_n_trees(model) == 15);

    uint8_t predicted[60];
    CHECK(sf_model_predict_batch(model, rows, 60, 2, predicted) == SF_STATUS_OK);
    CHECK(memcmp(predicted, labels, 60) == 0);

    double proba[3];
    CHECK(sf_model_predict_proba(model, rows + 2, 2, proba) == SF_STATUS_OK);
    CHECK(fabs(proba[0] + proba[1] + proba[2] - 1.0) < 1e-12);

    uint8_t label = 9;
    CHECK(sf_model_predict(model, rows, 3, &label) == SF_STATUS_DIM_MISMATCH);
    CHECK(strstr(sf_last_error(), "2 vs 3") != NULL);

    size_t needed = 0;
    CHECK(sf_model_to_json(model, NULL, 0, &needed) == SF_STATUS_BUFFER_TOO_SMALL);
    char *json = malloc(needed);
    CHECK(sf_model_to_json(model, json, needed, NULL) == SF_STATUS_OK);
    SfModel *copy = NULL;
    CHECK(sf_model_load_bytes((const uint8_t *)json, strlen(json), &copy) == SF_STATUS_OK);
    CHECK(sf_model_predict(copy, rows + 4, 2, &label) == SF_STATUS_OK && label == 2);
    free(json);
    sf_model_free(copy);
    sf_model_free(model);

    CHECK(sf_model_load_file("/nonexistent/model.json", &model) == SF_STATUS_IO);

    uint64_t cm[9];
    uint8_t t[4] = {0, 0, 1, 2}, p[4] = {0, 1, 1, 2};
    CHECK(sf_confusion(t, p, 4, cm) == SF_STATUS_OK);
    CHECK(cm[0] == 1 && cm[1] == 1 && cm[4] == 1 && cm[8] == 1);
    double mcc = 0;
    CHECK(sf_scores(cm, NULL, NULL, &mcc) == SF_STATUS_OK && mcc > 0.0);
    CHECK(fabs(sf_mcc_binary(6, 3, 1, 2) - 16.0 / sqrt(1120.0)) < 1e-15);

    printf("ok %s\n", sf_version());
    return 0;
}
