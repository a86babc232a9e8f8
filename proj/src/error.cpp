#include "lyapb/error.hpp"

namespace lyapb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::index_out_of_range: return "index out of range";
    case ErrorCode::not_spd: return "matrix not SPD";
    case ErrorCode::singular_pivot: return "singular pivot";
    case ErrorCode::degenerate_interval: return "degenerate spectral interval";
    case ErrorCode::consistency: return "consistency";
    case ErrorCode::quadrature_failure: return "quadrature failure";
    case ErrorCode::breakdown: return "breakdown";
    case ErrorCode::no_admissible_tau: return "no admissible tau";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace lyapb
