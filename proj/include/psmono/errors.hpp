#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psmono {

/// Base of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the open interval (0, radius).
class domain_error : public error {
 public:
  using error::error;
};

/// The declared tail cannot bound the truncation error at the requested point.
class truncation_error : public error {
 public:
  using error::error;
};

/// Invalid kernel or tolerance parameter.
class parameter_error : public error {
 public:
  using error::error;
};

/// A hypothesis of the monotonicity rules fails (b_k <= 0, parity mismatch, ...).
class hypothesis_violation : public error {
 public:
  hypothesis_violation(const std::string& what, std::size_t index)
      : error(what), index_(index), has_index_(true) {}
  explicit hypothesis_violation(const std::string& what) : error(what) {}

  std::size_t index() const noexcept { return index_; }
  bool has_index() const noexcept { return has_index_; }

 private:
  std::size_t index_ = 0;
  bool has_index_ = false;
};

/// Not enough stored terms to pin down the ratio sequence.
class insufficient_data : public error {
 public:
  using error::error;
};

/// G'(x) vanishes (within rounding) where H_{F,G} is requested.
class singular_point : public error {
 public:
  using error::error;
};

/// An endpoint limit whose sign could not be read off its sample trace.
class undetermined_limit : public error {
 public:
  using error::error;
};

/// Endpoint signs are consistent with no row of the two-change table.
class ambiguous_classification : public error {
 public:
  using error::error;
};

/// The expected number of sign changes of H was not found.
class localization_failure : public error {
 public:
  using error::error;
};

}  // namespace psmono
