#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stegduel {

/// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands; message names the offending axis.
struct DimensionError : Error {
  using Error::Error;
};

/// A precondition of an operation was violated.
struct ContractError : Error {
  using Error::Error;
};

/// A forward value or gradient became non-finite.
struct OverflowError : Error {
  using Error::Error;
};

/// Message does not fit into the carrier; carries the maximum bit count.
struct CapacityError : Error {
  CapacityError(const std::string& what, std::size_t max_bits)
      : Error(what), max_bits(max_bits) {}
  std::size_t max_bits;
};

/// Filesystem-level failure (open/read/write).
struct IoError : Error {
  using Error::Error;
};

struct PgmParseError : Error {
  using Error::Error;
};
struct PgmBadMagicError : PgmParseError {
  using PgmParseError::PgmParseError;
};
struct PgmUnsupportedFormatError : PgmParseError {
  using PgmParseError::PgmParseError;
};
struct PgmBadMaxvalError : PgmParseError {
  using PgmParseError::PgmParseError;
};
struct PgmTruncatedError : PgmParseError {
  using PgmParseError::PgmParseError;
};

struct CheckpointError : Error {
  using Error::Error;
};
struct CheckpointBadMagicError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct CheckpointVersionError : CheckpointError {
  using CheckpointError::CheckpointError;
};
struct CheckpointTruncatedError : CheckpointError {
  using CheckpointError::CheckpointError;
};

/// Requested operation exists but is intentionally not supported
/// (e.g. blind extraction for the adaptive embedding simulator).
struct UnsupportedOperationError : Error {
  using Error::Error;
};

}  // namespace stegduel
