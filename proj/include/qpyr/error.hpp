#pragma once

#include <stdexcept>
#include <string>

namespace qpyr {

enum class Errc {
  bad_input,
  degenerate_edge,
  non_coplanar_base,
  flat_pyramid,
  non_integral_count,
  collinear_abd,
  no_real_apex,
  origin_input,
  apex_impossible,
  not_a_realization,
  not_flexible,
  ambiguous_kernel,
  discriminant_negative,
  height_imaginary,
  division_breakdown,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

// Errors that mean "the data violates an operation's precondition" rather than
// "the input could not be parsed/validated".  CLI maps these to a distinct exit code.
inline bool is_precondition_error(Errc c) noexcept {
  return c == Errc::not_a_realization || c == Errc::not_flexible ||
         c == Errc::ambiguous_kernel;
}

}  // namespace qpyr
