#pragma once

#include <stdexcept>

namespace sbm {

// Bad arguments to a generator, formula, or solver.
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Instance too large for an exact solver or memo table.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or wrong-schema instance file.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A policy returned a full or non-adjacent server.
struct ContractViolationError : std::logic_error {
    using std::logic_error::logic_error;
};

// The primal-dual ledger identity failed beyond tolerance.
struct AccountingError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace sbm
