#pragma once

#include <stdexcept>
#include <string>

namespace gamest {

enum class ErrorCode {
    invalid_argument,
    malformed_session,
    unsupported_shape,
    no_completely_mixed_equilibrium,
    non_convergence,
    indeterminate_equilibrium,
    no_interior_balance,
    uninformative_data,
    pole,
    insufficient_data,
    empty_task,
    undefined_metrics,
    parse_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace gamest
