#pragma once

#include <stdexcept>
#include <string>

namespace mlab {

// Exit-code categories used by the CLI: precondition = 2, numerical = 3,
// certificate = 4.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mlab
