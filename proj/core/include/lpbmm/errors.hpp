#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpbmm {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values. When raised by the optimizer, `update_index()` is the
/// 1-based index of the update that produced them (0 when not applicable).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::size_t update_index = 0)
      : Error(what), update_index_(update_index) {}
  std::size_t update_index() const noexcept { return update_index_; }

 private:
  std::size_t update_index_;
};

class DegenerateTextError : public Error {
 public:
  using Error::Error;
};

class EmptyClassError : public Error {
 public:
  EmptyClassError(const std::string& what, std::size_t class_index)
      : Error(what), class_index_(class_index) {}
  std::size_t class_index() const noexcept { return class_index_; }

 private:
  std::size_t class_index_;
};

class DegenerateWeightError : public Error {
 public:
  using Error::Error;
};

class OracleScopeError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class NormError : public Error {
 public:
  NormError(const std::string& what, std::size_t row)
      : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A harness task failed; wraps the underlying message with the task id.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string task_id)
      : Error(what), task_id_(std::move(task_id)) {}
  const std::string& task_id() const noexcept { return task_id_; }

 private:
  std::string task_id_;
};

}  // namespace lpbmm
