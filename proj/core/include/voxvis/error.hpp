// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace voxvis {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Voxel index outside the grid.
class BoundsError : public Error {
public:
    using Error::Error;
};

// Grid/mask/image dimensions disagree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A caller-supplied parameter is outside its domain (stride < 1, bad density, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Malformed or truncated file content.
class FormatError : public Error {
public:
    using Error::Error;
};

// Input data violates a semantic precondition (e.g. label >= num_classes).
class DataError : public Error {
public:
    using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// Work refused by a size guard; retry with the explicit override.
class GuardError : public Error {
public:
    using Error::Error;
};

// An internal invariant failed. Indicates a bug, not bad input.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace voxvis
