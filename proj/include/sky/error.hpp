// Typed error conditions shared by all sky components.
#pragma once

#include <stdexcept>
#include <string>

namespace sky {

enum class Errc {
  // catalog
  missing_column,
  type_mismatch,
  unit_mismatch,
  position_out_of_range,
  page_overflow,
  corrupt_header,
  // warehouse
  unknown_level,
  unknown_dimension,
  non_numeric_measure,
  empty_group,
  // htm
  level_too_deep,
  bad_radius,
  // trees / geometry
  dimension_mismatch,
  bad_window,
  empty_tree,
  empty_input,
  // bulk load
  empty_run,
  no_split_needed,
  rank_out_of_range,
  count_infeasible,
  // clustering
  too_few_subclusters,
  sample_too_large,
  bad_params,
  // svc
  infeasible_c,
  no_convergence,
  // plumbing
  bad_config,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sky
