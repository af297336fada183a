#include "calc.h"

int test_add(void) {
    if (add(1, 2) != 3) {
        return 1;
    }
    return 0;
}
