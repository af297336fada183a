/* arithmetic helpers */
#include "calc.h"

static const char *kBanner = "calc // v1";

int add(int a, int b) {
    return a + b;
}

int clamp_positive(int v) {
    if (v < 0) {
        return 0;
    }
    return v;
}

/* multi-line
   block comment */
int classify(int v, int flag) {
    if (v > 10 && flag) {
        return 2;
    }
    for (int i = 0; i < v; i++) {
        if (i % 2 == 0) {
            v--;
        }
    }
    return flag ? v : -v;
}
