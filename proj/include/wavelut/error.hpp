//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace wavelut {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor or lattice dimensions disagree.
class ShapeError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A frame sequence that had to contain frames was empty.
class EmptySequenceError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// NaN/inf where a finite value is required, or a zero norm.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents (bad magic, truncated payload, mixed frame sizes).
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised by the fitting loop when the loss diverges. Carries the step of the
/// last finite state so callers can report it.
class OptimizationError : public NumericError {
public:
    OptimizationError(const std::string& what, int last_finite_step)
        : NumericError(what), last_finite_step_(last_finite_step) {}

    int last_finite_step() const noexcept { return last_finite_step_; }

private:
    int last_finite_step_;
};

/// Wraps an error from one enhancement stage with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace wavelut
