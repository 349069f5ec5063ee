#pragma once

#include <stdexcept>
#include <string>

namespace lhydra {

// Exit-code categories used by the CLI: 2 usage, 3 algorithmic, 4 I/O.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AlgorithmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when A_L lacks d strictly negative trailing eigenvalues.
// Carries the largest embedding dimension that would have been admissible.
class NonNegativeTrailingEigenvalue : public AlgorithmError {
public:
    NonNegativeTrailingEigenvalue(int requested_d, int admissible_d)
        : AlgorithmError("only " + std::to_string(admissible_d) +
                         " strictly negative eigenvalues available; rerun with "
                         "embedding dimension d <= " + std::to_string(admissible_d) +
                         " (requested " + std::to_string(requested_d) + ")"),
          requested_dim(requested_d),
          admissible_dim(admissible_d) {}

    int requested_dim;
    int admissible_dim;
};

} // namespace lhydra
