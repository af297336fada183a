#include "calc.h"

int sum_range(int lo, int hi) {
    int acc = 0;
    while (lo < hi) {
        acc = acc + lo;
        lo = lo + 1;
    }
    return acc;
}
