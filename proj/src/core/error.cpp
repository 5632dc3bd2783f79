#include "nnpost/error.hpp"

namespace nnpost {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::empty_input: return "empty input";
    case ErrorCode::svd_failure: return "SVD failure";
    case ErrorCode::mode_search_failure: return "mode search failure";
    case ErrorCode::degenerate_grid: return "degenerate grid";
    case ErrorCode::numerical_failure: return "numerical failure";
    case ErrorCode::sampler_failure: return "sampler failure";
  }
  return "unknown error";
}

}  // namespace nnpost
