#pragma once

#include <cmath>

namespace fdmec {

// Perspective of the natural log, phi(x, w) = x * ln(w / x), extended so that
// phi(0, w) = 0 and gradients stay bounded on the boundary. The ratio w/x is
// evaluated against x floored at x_floor, and ln is continued linearly (C^1,
// still concave) below ratio_floor so the slope never exceeds 1/ratio_floor.
// Line-search methods need that bound: with the exact log the slope grows
// like 1/t near t = 0 and the sufficient-decrease test becomes unsatisfiable
// in double precision. Any stationary ratio of the utilities lies orders of
// magnitude above ratio_floor, so the extension never binds at solutions. On
// the interior (x >= x_floor, w/x >= ratio_floor) value and both partials are
// exact.
struct PhiEval {
    double value = 0.0;
    double dx = 0.0; // d/dx
    double dw = 0.0; // d/dw
};

inline PhiEval phi_perspective(double x, double w, double x_floor = 1e-9,
                               double ratio_floor = 1e-4) {
    PhiEval out;
    const double xe = (x > x_floor) ? x : x_floor;
    const double t = w / xe;
    double ln_t, dln_t;
    if (t >= ratio_floor) {
        ln_t = std::log(t);
        dln_t = 1.0 / t;
    } else {
        ln_t = std::log(ratio_floor) + (t - ratio_floor) / ratio_floor;
        dln_t = 1.0 / ratio_floor;
    }
    out.value = x * ln_t;
    out.dw = (x / xe) * dln_t;
    out.dx = (x > x_floor) ? (ln_t - t * dln_t) : ln_t;
    return out;
}

} // namespace fdmec
