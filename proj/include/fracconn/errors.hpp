#ifndef FRACCONN_ERRORS_HPP
#define FRACCONN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fracconn {

/// Malformed or inconsistent caller input (wrong sizes, bad ranges, bad files).
class invalid_input : public std::invalid_argument {
 public:
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

/// Parameter outside its admissible mathematical domain.
class out_of_range_error : public std::domain_error {
 public:
  explicit out_of_range_error(const std::string& what) : std::domain_error(what) {}
};

/// Not enough usable data left after exclusions to form an estimate.
class insufficient_data : public std::runtime_error {
 public:
  explicit insufficient_data(const std::string& what) : std::runtime_error(what) {}
};

/// Degenerate input (zero variance, non-positive diagonal, singular spec).
class degenerate_input : public std::runtime_error {
 public:
  explicit degenerate_input(const std::string& what) : std::runtime_error(what) {}
};

/// An estimator could not produce a result on this input.
class estimation_failure : public std::runtime_error {
 public:
  explicit estimation_failure(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical procedure failed to converge or left representable range.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracconn

#endif  // FRACCONN_ERRORS_HPP
