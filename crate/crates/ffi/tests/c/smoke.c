#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "obstruction_forge.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    fseek(f, 0, SEEK_SET);
    char *buf = malloc(n + 1);
    if (fread(buf, 1, n, f) != (size_t)n) { fclose(f); free(buf); return NULL; }
    buf[n] = 0;
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc < 2) return 10;
    char *text = slurp(argv[1]);
    if (!text) return 11;

    of_model *m = NULL;
    if (of_model_parse(text, &m) != OF_STATUS_OK) return 12;
    free(text);

    char *report = NULL;
    bool passed = false;
    if (of_certify(m, "1", &report, &passed) != OF_STATUS_OK || !passed) return 13;
    if (!strstr(report, "\"t_star\":\"21/11\"")) return 14;
    of_string_free(report);

    if (of_reduce(m, "g1,nope", 1e-9, &report, &passed) != OF_STATUS_INVALID_INPUT) return 15;
    if (!of_last_error() || !strstr(of_last_error(), "nope")) return 16;

    of_model *bad = NULL;
    if (of_model_parse("{", &bad) != OF_STATUS_PARSE || bad) return 17;

    of_model_free(m);
    printf("ok %s\n", of_version());
    return 0;
}
