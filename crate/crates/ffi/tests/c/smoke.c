#include <math.h>
#include <stdio.h>
#include "kummer.h"

int main(void) {
    KummerContext *ctx = kummer_context_new(4, 0.8);
    if (!ctx) return 10;
    KummerResult r;
    if (kummer_eval_u(ctx, 130.0, 25.1, 100.0, false, &r) != KUMMER_STATUS_OK) return 11;
    if (fabs(r.value / 3.8723892985558665e-293 - 1.0) > 1e-11) return 12;
    if (kummer_eval_m(ctx, -1.0, 2.0, 3.0, false, &r) != KUMMER_STATUS_DOMAIN) return 13;
    if (kummer_last_error_message() == NULL) return 14;
    KummerCoefficients *c = NULL;
    if (kummer_coefficients_new(KUMMER_WHICH_M, 99.0, 500.0, 500.0, 4, &c) != KUMMER_STATUS_OK) return 15;
    if (kummer_coefficients_len(c) != 5) return 16;
    double f0 = 0.0;
    kummer_coefficients_f_tilde(c, 0, &f0);
    if (f0 != 1.0) return 17;
    kummer_coefficients_free(c);
    double w = 1.0;
    if (kummer_wronskian_residual(101.0, 301.0, 500.0, 4, &w) != KUMMER_STATUS_OK || w > 1e-11) return 18;
    kummer_context_free(ctx);
    printf("ok\n");
    return 0;
}
