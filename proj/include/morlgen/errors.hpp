#pragma once

#include <stdexcept>
#include <string>

namespace morlgen {

/// Vectors or fronts of different objective counts were combined.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A required input (front, weight list, score sample) was empty.
struct EmptyInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Normalization bounds with v_max_i <= v_min_i for some objective.
struct DegenerateRangeError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A generalization ratio whose reference value is zero.
struct UndefinedRatioError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Misuse of an environment: stepping a finished episode, bad action, bad context.
struct EnvironmentError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Rejection sampling or training ran out of budget without a result.
struct BudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed CSV/JSON input. Messages carry a line anchor where one exists.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace morlgen
