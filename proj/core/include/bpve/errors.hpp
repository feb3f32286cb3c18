#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bpve {

// Bad inputs or model-wellformedness failures. The CLI maps these to exit 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested computation is outside the method's numerical domain
// (transform inapplicable, divergent recursion, ...). CLI exit 3.
class NumericDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A constructor precondition failed; carries the name of the failed check.
class PreconditionViolation : public ValidationError {
 public:
  PreconditionViolation(std::string check, const std::string& detail)
      : ValidationError("precondition '" + check + "' violated: " + detail),
        check_(std::move(check)) {}
  const std::string& check() const { return check_; }

 private:
  std::string check_;
};

// dtilde_k = d_k - a_k*theta_k/b_k <= 0: the triangular conjugation does not
// produce a nonnegative matrix at index k and the whole A-route is off.
class NonPositiveDtilde : public NumericDomainError {
 public:
  NonPositiveDtilde(std::int64_t k, double value)
      : NumericDomainError("dtilde_" + std::to_string(k) + " = " +
                           std::to_string(value) + " is not positive"),
        index_(k) {}
  std::int64_t index() const { return index_; }

 private:
  std::int64_t index_;
};

class ZeroDelta : public NumericDomainError {
 public:
  explicit ZeroDelta(std::int64_t k)
      : NumericDomainError("delta_" + std::to_string(k) +
                           " vanishes exactly; consecutive ratio undefined"),
        index_(k) {}
  std::int64_t index() const { return index_; }

 private:
  std::int64_t index_;
};

class NoConvergence : public NumericDomainError {
 public:
  using NumericDomainError::NumericDomainError;
};

class InsufficientRange : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PopulationOverflow : public NumericDomainError {
 public:
  PopulationOverflow(std::int64_t run, std::int64_t generation)
      : NumericDomainError("population cap exceeded in run " +
                           std::to_string(run) + " at generation " +
                           std::to_string(generation)),
        run_(run), generation_(generation) {}
  std::int64_t run() const { return run_; }
  std::int64_t generation() const { return generation_; }

 private:
  std::int64_t run_;
  std::int64_t generation_;
};

}  // namespace bpve
