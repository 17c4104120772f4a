#pragma once

#include <stdexcept>
#include <string>

namespace slicedmi {

// Base class for everything thrown by this library. Catching slicedmi::error
// separates our failures from generic std exceptions at CLI boundaries.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: dimension mismatches, empty matrices, malformed ranges.
class input_error : public error {
 public:
  using error::error;
};

// Fewer samples than the estimator needs (n <= k and friends).
class insufficient_samples_error : public input_error {
 public:
  using input_error::input_error;
};

// A k-th neighbor distance of zero under the erroring degeneracy policy.
class degenerate_distance_error : public error {
 public:
  using error::error;
};

// Covariance blocks fail SPD/PSD validation, or ranges are inconsistent.
class invalid_spec_error : public input_error {
 public:
  using input_error::input_error;
};

// Canonical correlation within 1e-12 of 1: the closed forms blow up.
class near_singular_error : public error {
 public:
  using error::error;
};

// Non-finite values produced where finite math was expected.
class numerical_error : public error {
 public:
  using error::error;
};

// Training objective became non-finite.
class training_diverged_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

// Malformed text input; carries the 1-based line where parsing stopped.
class parse_error : public input_error {
 public:
  parse_error(const std::string& what, long line)
      : input_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Config file problems: schema violations, unknown keys, out-of-range values.
class config_error : public error {
 public:
  using error::error;
};

}  // namespace slicedmi
