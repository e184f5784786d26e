#pragma once

#include <stdexcept>
#include <string>

namespace datekit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (corpus files, flags, filter inputs).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Transport or protocol failure talking to the embedding service.
class RemoteError : public Error {
 public:
  using Error::Error;
};

}  // namespace datekit
