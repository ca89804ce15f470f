#pragma once

#include <stdexcept>
#include <string>

namespace nlwr {

/// Raised when a model or experiment parameter is outside its admissible range.
class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two fields (or a field and a kernel) do not live on the same grid.
class grid_mismatch_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class cfl_violation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The discrete state left its admissible region (NaN/inf, or outside [0, 1]).
class non_finite_state_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nlwr
