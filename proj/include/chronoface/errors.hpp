#pragma once

#include <stdexcept>
#include <string>

namespace chronoface {

// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Normalization target carries no mass anywhere.
struct AllZeroMassError : Error { using Error::Error; };

// Portrait sum has (near-)zero norm, no usable mean direction.
struct DegeneratePrototypeError : Error { using Error::Error; };

// Concentration estimation needs at least one identity with >= 2 portraits.
struct InsufficientPortraitsError : Error { using Error::Error; };

// Embedding dimensionality differs from what the consumer expects.
struct DimensionMismatchError : Error { using Error::Error; };

struct EmptyGalleryError : Error { using Error::Error; };

// Every candidate tuple violates the uniqueness constraint.
struct NoValidAssignmentError : Error { using Error::Error; };

// Alive window does not intersect the year support.
struct EmptySupportError : Error { using Error::Error; };

// Malformed prior spec, world spec or config.
struct InvalidSpecError : Error { using Error::Error; };

struct EmptyInputError : Error { using Error::Error; };

// Persisted file violates the on-disk format contract.
struct FormatError : Error { using Error::Error; };

}  // namespace chronoface
