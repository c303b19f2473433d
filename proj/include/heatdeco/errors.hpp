#pragma once

#include <stdexcept>

namespace heatdeco {

// A k = 0 mode was passed where the quantity diverges (A_k, mu_k, nu_k).
class SingularModeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Branch histories or lattice fields that do not share a grid.
class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TooFewSamplesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TooShortHistoryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LagRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InsufficientWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonHermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace heatdeco
