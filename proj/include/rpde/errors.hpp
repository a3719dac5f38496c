#ifndef RPDE_ERRORS_HPP_
#define RPDE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rpde {

// Kernel parameters outside the admissible range (e.g. nonpositive rate).
struct InvalidKernelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The retarded-inequality decay branch is unavailable for these constants.
struct InapplicableInequalityError : std::domain_error {
  using std::domain_error::domain_error;
};

// A structure condition (F0)/(F1)/(G1) failed at a sample point.
struct StructureViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSeriesError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Delayed lookup outside the stored trajectory support.
struct HistoryUnderflowError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Nonfinite or runaway state during time integration.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, double t, double l2)
      : std::runtime_error(what), time(t), l2_norm(l2) {}
  double time;
  double l2_norm;
};

// Requested q is at or below the critical exponent q*.
struct OutOfTheoryError : std::domain_error {
  using std::domain_error::domain_error;
};

// |Omega|-power embedding needs q > 2*alpha and q > 2*beta.
struct EmbeddingFailureError : std::domain_error {
  using std::domain_error::domain_error;
};

// H2 decay form requires separated delays.
struct FormUnavailableError : std::domain_error {
  using std::domain_error::domain_error;
};

// A required declared norm bound is missing from the problem definition.
struct IncompleteSpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rpde

#endif  // RPDE_ERRORS_HPP_
