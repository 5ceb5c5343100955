#ifndef CACS_ERROR_HPP
#define CACS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cacs {

// Error conditions surfaced by the library. The CLI maps these onto its
// stable exit codes (input/parse -> 2, geometry -> 3, degenerate stats -> 4).
enum class errc {
  // file parsing
  bad_magic,
  unsupported_datatype,
  dimension_mismatch,
  truncated_file,
  io_error,
  // file writing
  dimension_overflow,
  label_overflow,
  value_overflow,
  // ground-truth ingestion
  schema_error,
  out_of_bounds,
  duplicate_voxel,
  // geometry
  geometry_mismatch,
  // statistics
  empty_input,
  degenerate_input,
  zero_slope,
  // phantom construction
  spec_error,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

const char* to_string(errc code);

}  // namespace cacs

#endif  // CACS_ERROR_HPP
