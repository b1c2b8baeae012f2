#include <math.h>
#include <stdio.h>

#include "isoext.h"

int main(void) {
    IsoAlgebra *alg = NULL;
    if (iso_algebra_function(3, &alg) != ISO_STATUS_OK) {
        fprintf(stderr, "%s\n", iso_last_error_message());
        return 1;
    }
    double coords[6] = {1.0, 0.0, 0.0, -2.0, 0.5, 0.5};
    double norm = 0.0;
    if (iso_element_norm(alg, coords, 6, &norm) != ISO_STATUS_OK || fabs(norm - 2.0) > 1e-12) {
        fprintf(stderr, "norm %g: %s\n", norm, iso_last_error_message());
        return 1;
    }
    size_t rad = 99;
    if (iso_radical_dim(alg, &rad) != ISO_STATUS_OK || rad != 0) {
        return 1;
    }
    iso_algebra_free(alg);
    puts("ok");
    return 0;
}
