#include "cacs/error.hpp"

namespace cacs {

const char* to_string(errc code) {
  switch (code) {
    case errc::bad_magic: return "BadMagic";
    case errc::unsupported_datatype: return "UnsupportedDatatype";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::truncated_file: return "TruncatedFile";
    case errc::io_error: return "IoError";
    case errc::dimension_overflow: return "DimensionOverflow";
    case errc::label_overflow: return "LabelOverflow";
    case errc::value_overflow: return "ValueOverflow";
    case errc::schema_error: return "SchemaError";
    case errc::out_of_bounds: return "OutOfBounds";
    case errc::duplicate_voxel: return "DuplicateVoxel";
    case errc::geometry_mismatch: return "GeometryMismatch";
    case errc::empty_input: return "EmptyInput";
    case errc::degenerate_input: return "DegenerateInput";
    case errc::zero_slope: return "ZeroSlope";
    case errc::spec_error: return "SpecError";
  }
  return "Error";
}

}  // namespace cacs
