#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ctrans {

// Bad user input: malformed scenarios, violated preconditions. CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or solver breakdown during a computation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A particle that never reaches the control region. CLI exit code 2.
class GeometricConditionError : public std::runtime_error {
 public:
  GeometricConditionError(std::string what, std::vector<double> point, bool forward,
                          std::size_t index)
      : std::runtime_error(std::move(what)),
        point_(std::move(point)),
        forward_(forward),
        index_(index) {}

  const std::vector<double>& point() const { return point_; }
  bool forward() const { return forward_; }
  std::size_t index() const { return index_; }

 private:
  std::vector<double> point_;
  bool forward_;
  std::size_t index_;
};

}  // namespace ctrans
