#pragma once

#include <cstddef>
#include <random>

#include "nlwr/nlwr.hpp"

namespace testing_support {

/// Reference circular-road instance at a chosen resolution and horizon.
inline nlwr::ExperimentConfig reference_config(double dx = 0.005, double T = 0.5) {
    nlwr::ExperimentConfig c;
    c.dx = dx;
    c.T = T;
    return c;
}

inline nlwr::Problem reference_problem(double dx = 0.005, double T = 0.5) {
    return nlwr::make_problem(reference_config(dx, T));
}

/// Wide kernel and short horizon: every bound constant stays finite.
inline nlwr::ExperimentConfig finite_config(double T = 0.05) {
    nlwr::ExperimentConfig c;
    c.dx = 0.02;
    c.T = T;
    c.eta = 1.0;
    c.snapshot_stride = 1;
    return c;
}

inline nlwr::Problem with_datum(nlwr::Problem p, double (*f)(double)) {
    p.rho0 = nlwr::CellField::from_function(p.grid, f);
    return p;
}

}  // namespace testing_support
