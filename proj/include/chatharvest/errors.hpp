#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chatharvest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CHAT header content (strict mode, or unrecoverable input).
class HeaderError : public Error {
 public:
  using Error::Error;
};

/// Filter expression syntax or vocabulary error, with a 1-based position.
class ExprError : public Error {
 public:
  ExprError(const std::string& message, std::size_t line, std::size_t column)
      : Error(message + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Invalid argument to a URL builder or similar precondition failure.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// HTTP failure. status() is 0 for transport errors (connect, timeout).
class NetworkError : public Error {
 public:
  NetworkError(const std::string& message, int status)
      : Error(message), status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// The remote collection requires authentication; only public collections
/// are supported.
class ProtectedCollectionError : public NetworkError {
 public:
  explicit ProtectedCollectionError(const std::string& url)
      : NetworkError("protected collection (authentication required): " + url,
                     401) {}
};

/// Corrupt or unsafe zip archive.
class ArchiveError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration or rule file; maps to exit code 2 in the CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Label rule set failed validation or broke idempotence on some value.
class RuleError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure (unwritable output, disk full, ...).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chatharvest
