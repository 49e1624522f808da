#pragma once

#include <stdexcept>
#include <string>

namespace siv {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition on an input value was violated.
class domain_error : public error {
 public:
  explicit domain_error(const std::string& what) : error(what) {}
};

/// The requested model has no implemented closed form.
class unsupported_model_error : public domain_error {
 public:
  explicit unsupported_model_error(const std::string& what) : domain_error(what) {}
};

/// The adaptive error controller could not satisfy the requested tolerance.
class tolerance_error : public error {
 public:
  explicit tolerance_error(const std::string& what) : error(what) {}
};

/// A trajectory reached the configured minimum separation.
class collision_error : public error {
 public:
  explicit collision_error(const std::string& what) : error(what) {}
};

/// A least-squares fit was requested on data that cannot constrain it.
class fit_error : public domain_error {
 public:
  explicit fit_error(const std::string& what) : domain_error(what) {}
};

}  // namespace siv
