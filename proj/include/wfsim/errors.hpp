#pragma once

#include <stdexcept>
#include <string>

namespace wfsim {

/// Bad parameter or precondition violation.
class invalid_argument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the range a tabulated waveform covers.
class out_of_domain : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Signal envelope has decayed so far that a phase estimate carries no information.
class decohered_signal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Accumulated phase left the single atan2 branch (|Φ| ≥ π).
class dynamic_range_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wfsim
