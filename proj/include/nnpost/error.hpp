#ifndef NNPOST_ERROR_HPP
#define NNPOST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nnpost {

// Failure classes surfaced by the core. The C API maps each one onto a
// distinct nnpost_status value, and the CLI onto a distinct exit code.
enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  non_finite,
  empty_input,
  svd_failure,
  mode_search_failure,
  degenerate_grid,
  numerical_failure,
  sampler_failure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

}  // namespace nnpost

#endif  // NNPOST_ERROR_HPP
