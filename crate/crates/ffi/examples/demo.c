#include <stdio.h>
#include "scatter_tex.h"

int main(void) {
    StFilterBank *bank = NULL;
    if (st_filter_bank_for_image(32, 32, 3, 4, &bank) != ST_STATUS_OK) {
        fprintf(stderr, "error: %s\n", st_last_error());
        return 1;
    }
    double plane[32 * 32];
    for (int i = 0; i < 32 * 32; i++) plane[i] = (i * 37) % 255;
    double out[256];
    size_t n = 0;
    if (st_scatter_plane(bank, plane, 32, 32, 2, 1, out, 256, &n) != ST_STATUS_OK) {
        fprintf(stderr, "error: %s\n", st_last_error());
        st_filter_bank_free(bank);
        return 1;
    }
    printf("%zu coefficients, S0 = %f\n", n, out[0]);
    st_filter_bank_free(bank);
    return 0;
}
