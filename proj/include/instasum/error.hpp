#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace instasum {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A required column is missing or the file layout is not recognised.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(std::string id)
      : Error("duplicate post id: " + id), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// Row-level content problem (e.g. an empty summary cell).
class ValidationError : public Error {
 public:
  ValidationError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input that is empty, or becomes empty after cleaning.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

enum class BackendErrorKind { kTimeout, kUnreachable, kProtocol, kEmpty };

inline const char* to_string(BackendErrorKind kind) {
  switch (kind) {
    case BackendErrorKind::kTimeout: return "backend-timeout";
    case BackendErrorKind::kUnreachable: return "backend-unreachable";
    case BackendErrorKind::kProtocol: return "backend-protocol";
    case BackendErrorKind::kEmpty: return "backend-empty";
  }
  return "backend-error";
}

class BackendError : public Error {
 public:
  BackendError(BackendErrorKind kind, std::string backend, const std::string& detail)
      : Error(std::string(to_string(kind)) + " [" + backend + "]: " + detail),
        kind_(kind),
        backend_(std::move(backend)) {}

  BackendErrorKind kind() const noexcept { return kind_; }
  const std::string& backend() const noexcept { return backend_; }
  bool retryable() const noexcept {
    return kind_ == BackendErrorKind::kTimeout || kind_ == BackendErrorKind::kUnreachable;
  }

 private:
  BackendErrorKind kind_;
  std::string backend_;
};

/// Gold and predicted label sets do not cover the same post ids.
class JoinError : public Error {
 public:
  explicit JoinError(std::vector<std::string> ids)
      : Error(make_message(ids)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  static std::string make_message(const std::vector<std::string>& ids) {
    std::string msg = "label join mismatch for ids:";
    for (const auto& id : ids) msg += " " + id;
    return msg;
  }
  std::vector<std::string> ids_;
};

class MissingReferenceError : public Error {
 public:
  explicit MissingReferenceError(const std::string& id)
      : Error("no reference summary for post " + id) {}
};

/// Both summarization branches failed for a post.
class PipelineError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or unusable inputs detected before a run starts.
class StartupError : public Error {
 public:
  using Error::Error;
};

}  // namespace instasum
