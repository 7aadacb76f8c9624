// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ibpcert {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mixing rational-backend and binary64-backend scalars in one operation.
struct BackendMismatch : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

/// Vector/box/network arity disagreement.
struct DimensionError : Error {
    using Error::Error;
};

/// A stated precondition of an operation does not hold for the given input.
struct PreconditionError : Error {
    using Error::Error;
};

/// A condition that is guaranteed by construction failed at runtime.
/// Seeing this exception means the library itself has a bug.
struct InternalCheckError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

} // namespace ibpcert
