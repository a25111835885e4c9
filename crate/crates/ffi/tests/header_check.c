#include <math.h>
#include <stdio.h>
#include "capillary_penrose.h"

int main(void) {
    CpCatenoidQuantities q;
    if (cp_catenoid_exact(1.0, 0.5, &q) != CP_STATUS_OK) return 1;
    CpSupport *s = NULL;
    if (cp_support_catenoid(1.0, 1.0, &s) != CP_STATUS_OK) return 2;
    double radii[3] = {20.0, 40.0, 80.0};
    double m = 0.0;
    CpStatus st = cp_exterior_mass(s, radii, 3, &m);
    cp_support_free(s);
    if (st != CP_STATUS_OK || fabs(m - 1.0) > 1e-4) return 3;
    if (cp_support_catenoid(-1.0, 1.0, &s) != CP_STATUS_INVALID_ARGUMENT || cp_last_error() == NULL) return 4;
    printf("%s %.6f\n", cp_version(), q.free_energy_mass);
    return 0;
}
