#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hebbdual {

// Precondition violations: mismatched shapes or counts.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Classification labels must be exactly -1 or +1.
struct invalid_label_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An iteration hit its budget before reaching tolerance.
struct convergence_error : std::runtime_error {
  convergence_error(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
  double residual;
};

// NaN/Inf showed up, or a matrix was too singular to proceed.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A lateral matrix lost positive definiteness.
struct stability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A learning-rate/exponent combination would overflow.
struct step_size_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An error raised inside a training sweep, tagged with where it happened.
struct train_abort_error : std::runtime_error {
  train_abort_error(const std::string& msg, int epoch_, std::size_t sample_)
      : std::runtime_error(msg), epoch(epoch_), sample(sample_) {}
  int epoch;
  std::size_t sample;
};

}  // namespace hebbdual
