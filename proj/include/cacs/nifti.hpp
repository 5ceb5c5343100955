#ifndef CACS_NIFTI_HPP
#define CACS_NIFTI_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cacs/volume.hpp"

namespace cacs::nifti {

// Supported on-disk sample types (NIfTI-1 datatype codes).
enum class DataType : std::int16_t {
  int16 = 4,
  int32 = 8,
  float32 = 16,
};

// Parse a NIfTI-1 single-file payload (.nii), optionally gzip-compressed.
// Accepts int16/int32/float32 data, 3D (or 4D with a trailing size-1 axis).
// Voxel values are scaled by scl_slope/scl_inter; a slope of 0 is treated
// as 1. Mask parsing rounds to the nearest integer label.
Volume parse_volume(std::span<const std::uint8_t> bytes);
LabelMask parse_mask(std::span<const std::uint8_t> bytes);

// Serialize as NIfTI-1 single-file bytes (header + data at offset 352,
// little-endian, slope 1 / intercept 0). Volumes default to float32, masks
// to int16. Writing to an integer type requires every value to be integral
// and in range.
std::vector<std::uint8_t> write_volume(const Volume& v,
                                       DataType dt = DataType::float32);
std::vector<std::uint8_t> write_mask(const LabelMask& m,
                                     DataType dt = DataType::int16);

bool is_gzip(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> gzip_decompress(std::span<const std::uint8_t> bytes);

// File helpers: load inflates transparently, save gzips when the path ends
// in ".gz". Errors are reported with the offending path in the message.
Volume load_volume(const std::filesystem::path& path);
LabelMask load_mask(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const Volume& v);
void save(const std::filesystem::path& path, const LabelMask& m);

}  // namespace cacs::nifti

#endif  // CACS_NIFTI_HPP
