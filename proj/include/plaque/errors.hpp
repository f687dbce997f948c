#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace plaque {

// Base for runtime failures raised inside a time-stepping loop.  time_index
// is the step at which the failure occurred, or -1 when not applicable.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long time_index = -1)
        : std::runtime_error(time_index >= 0
                                 ? what + " (time step " + std::to_string(time_index) + ")"
                                 : what),
          time_index_(time_index) {}

    long time_index() const { return time_index_; }

private:
    long time_index_;
};

// A reaction or velocity denominator came too close to zero to trust.
class SingularDenominator : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// The moving interface left (0, 1); the annulus collapsed or inverted.
class DegenerateGeometry : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// A dense solve produced an unusable factorization or residual.
class NumericallySingular : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Outcome of parameter validation: hard violations make a run refuse to
// start, warnings are recorded and reported but do not block.
struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

} // namespace plaque
