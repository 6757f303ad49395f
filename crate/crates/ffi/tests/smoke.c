#include <stdio.h>
#include <string.h>

#include "lattice_stretch.h"

#define CHECK(cond)                                               \
    do {                                                          \
        if (!(cond)) {                                            \
            fprintf(stderr, "check failed line %d: %s\n", __LINE__, #cond); \
            return 1;                                             \
        }                                                         \
    } while (0)

int main(void) {
    LsCurve *curve = NULL;
    CHECK(ls_curve_new_p_ellipse(0.5, &curve) == LS_STATUS_OK);

    uint64_t n = 0;
    CHECK(ls_count_interior(curve, 9.0, 1.0, 1e-9, &n) == LS_STATUS_OK);
    CHECK(n == 8);
    CHECK(ls_count_closed(curve, 9.0, 1.0, 1e-9, &n) == LS_STATUS_OK);
    CHECK(n == 27);

    double bound = 0.0;
    CHECK(ls_upper_bound(curve, 0.5, 1.0, &bound) == LS_STATUS_NOT_APPLICABLE);
    CHECK(ls_last_error_message() != NULL);

    LsOptimum *opt = NULL;
    CHECK(ls_optimum_new(curve, 5.0, LS_MODE_MAX_INTERIOR, 0.0, &opt) == LS_STATUS_OK);
    uint64_t best = 0;
    double dist = 0.0, witness = 0.0;
    size_t count = 0;
    CHECK(ls_optimum_summary(opt, &best, &dist, &witness, &count) == LS_STATUS_OK);
    CHECK(best == 1 && count == 1);
    LsInterval iv;
    CHECK(ls_optimum_interval(opt, 0, &iv) == LS_STATUS_OK);
    CHECK(iv.lo > 0.381966 && iv.lo < 0.381967 && iv.lo_closed);
    CHECK(ls_optimum_interval(opt, 1, &iv) == LS_STATUS_INVALID_ARGUMENT);
    ls_optimum_free(opt);

    double lambda = 0.0;
    CHECK(ls_rectangle_eigenvalue(1.0, 2, &lambda) == LS_STATUS_OK);
    CHECK(lambda == 5.0);
    CHECK(ls_curve_new_p_ellipse(-1.0, &curve) == LS_STATUS_INVALID_ARGUMENT);
    CHECK(curve == NULL);
    CHECK(ls_count_interior(NULL, 1.0, 1.0, 0.0, &n) == LS_STATUS_NULL_POINTER);

    printf("ok %s\n", ls_version());
    return 0;
}
