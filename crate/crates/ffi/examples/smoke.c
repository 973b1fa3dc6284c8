#include <stdio.h>
#include "pirpsi.h"

int main(void) {
    PirpsiCode *code = NULL;
    PirpsiStatus s = pirpsi_code_build(7, 7, 1, 2, &code);
    if (s != PIRPSI_STATUS_OK) {
        fprintf(stderr, "build: %s\n", pirpsi_status_str(s));
        return 1;
    }
    size_t n = 0;
    uint64_t num = 0, den = 0;
    pirpsi_code_codeword_count(code, 2, &n);
    pirpsi_rate(7, &num, &den);
    printf("%zu codewords per database, rate %llu/%llu\n", n, (unsigned long long)num, (unsigned long long)den);
    pirpsi_code_free(code);
    return 0;
}
