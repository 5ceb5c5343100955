// NIfTI-1 single-file reader/writer, little-endian, int16/int32/float32.

#include "cacs/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace cacs::nifti {

namespace {

// On-disk layout of the 348-byte NIfTI-1 header. Every member is naturally
// aligned, so the struct is layout-identical to the file on any common ABI.
struct Nifti1Header {
  std::int32_t sizeof_hdr;    // 0: must be 348
  char data_type[10];         // 4
  char db_name[18];           // 14
  std::int32_t extents;       // 32
  std::int16_t session_error; // 36
  char regular;               // 38
  char dim_info;              // 39
  std::int16_t dim[8];        // 40
  float intent_p1;            // 56
  float intent_p2;            // 60
  float intent_p3;            // 64
  std::int16_t intent_code;   // 68
  std::int16_t datatype;      // 70
  std::int16_t bitpix;        // 72
  std::int16_t slice_start;   // 74
  float pixdim[8];            // 76
  float vox_offset;           // 108
  float scl_slope;            // 112
  float scl_inter;            // 116
  std::int16_t slice_end;     // 120
  char slice_code;            // 122
  char xyzt_units;            // 123
  float cal_max;              // 124
  float cal_min;              // 128
  float slice_duration;       // 132
  float toffset;              // 136
  std::int32_t glmax;         // 140
  std::int32_t glmin;         // 144
  char descrip[80];           // 148
  char aux_file[24];          // 228
  std::int16_t qform_code;    // 252
  std::int16_t sform_code;    // 254
  float quatern_b;            // 256
  float quatern_c;            // 260
  float quatern_d;            // 264
  float qoffset_x;            // 268
  float qoffset_y;            // 272
  float qoffset_z;            // 276
  float srow_x[4];            // 280
  float srow_y[4];            // 296
  float srow_z[4];            // 312
  char intent_name[16];       // 328
  char magic[4];              // 344
};
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must pack to 348 bytes");

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;  // header + 4-byte extension flag

int bytes_per_sample(DataType dt) {
  return dt == DataType::float32 || dt == DataType::int32 ? 4 : 2;
}

struct Decoded {
  Eigen::Vector3i dims;
  Eigen::Vector3d spacing;
  Eigen::Vector3d origin;
  Orientation orientation;
  DataType datatype;
  double slope;
  double inter;
  const std::uint8_t* payload;
  Eigen::Index nvox;
};

Decoded decode(std::span<const std::uint8_t> bytes,
               std::vector<std::uint8_t>& inflated) {
  if (is_gzip(bytes)) {
    inflated = gzip_decompress(bytes);
    bytes = inflated;
  }
  if (bytes.size() < kHeaderSize)
    throw Error(errc::truncated_file,
                "file shorter than the 348-byte NIfTI-1 header");

  Nifti1Header h;
  std::memcpy(&h, bytes.data(), kHeaderSize);

  if (std::memcmp(h.magic, "n+1\0", 4) != 0) {
    if (std::memcmp(h.magic, "ni1\0", 4) == 0)
      throw Error(errc::bad_magic,
                  "two-file NIfTI (magic \"ni1\") is not supported; expected "
                  "single-file magic \"n+1\"");
    throw Error(errc::bad_magic, "not a NIfTI-1 file (bad magic)");
  }
  if (h.sizeof_hdr != 348)
    throw Error(errc::bad_magic, "not a NIfTI-1 file (sizeof_hdr != 348)");

  if (h.datatype != static_cast<std::int16_t>(DataType::int16) &&
      h.datatype != static_cast<std::int16_t>(DataType::int32) &&
      h.datatype != static_cast<std::int16_t>(DataType::float32))
    throw Error(errc::unsupported_datatype,
                "unsupported datatype code " + std::to_string(h.datatype) +
                    " (supported: int16=4, int32=8, float32=16)");

  const int ndim = h.dim[0];
  if (ndim != 3 && !(ndim == 4 && h.dim[4] == 1))
    throw Error(errc::dimension_mismatch,
                "expected 3 dimensions (or 4 with a trailing size-1 axis), "
                "got dim[0]=" +
                    std::to_string(ndim));
  for (int a = 1; a <= 3; ++a)
    if (h.dim[a] < 1)
      throw Error(errc::dimension_mismatch,
                  "non-positive dim[" + std::to_string(a) + "]");

  Decoded d;
  d.dims = {h.dim[1], h.dim[2], h.dim[3]};
  d.spacing = {h.pixdim[1], h.pixdim[2], h.pixdim[3]};
  d.origin = {h.qoffset_x, h.qoffset_y, h.qoffset_z};
  for (int a = 0; a < 3; ++a)
    if (!(d.spacing[a] > 0.0))
      throw Error(errc::dimension_mismatch, "non-positive pixdim");

  d.orientation.qform_code = h.qform_code;
  d.orientation.sform_code = h.sform_code;
  d.orientation.qfac = h.pixdim[0];
  d.orientation.quatern_b = h.quatern_b;
  d.orientation.quatern_c = h.quatern_c;
  d.orientation.quatern_d = h.quatern_d;
  std::memcpy(d.orientation.srow_x, h.srow_x, sizeof h.srow_x);
  std::memcpy(d.orientation.srow_y, h.srow_y, sizeof h.srow_y);
  std::memcpy(d.orientation.srow_z, h.srow_z, sizeof h.srow_z);

  d.datatype = static_cast<DataType>(h.datatype);
  d.slope = h.scl_slope == 0.0f ? 1.0 : static_cast<double>(h.scl_slope);
  d.inter = h.scl_inter;

  if (!(h.vox_offset >= kHeaderSize))
    throw Error(errc::dimension_mismatch, "invalid vox_offset");
  const auto offset = static_cast<std::size_t>(h.vox_offset);

  d.nvox = static_cast<Eigen::Index>(d.dims.x()) * d.dims.y() * d.dims.z();
  const std::size_t needed =
      static_cast<std::size_t>(d.nvox) * bytes_per_sample(d.datatype);
  if (bytes.size() < offset + needed)
    throw Error(errc::dimension_mismatch,
                "header dims promise " + std::to_string(needed) +
                    " payload bytes but only " +
                    std::to_string(bytes.size() > offset ? bytes.size() - offset
                                                         : 0) +
                    " are present");
  d.payload = bytes.data() + offset;
  return d;
}

template <typename Scalar, typename Sample>
void copy_scaled(const Decoded& d, VoxelGrid<Scalar>& out) {
  const auto* src = reinterpret_cast<const Sample*>(d.payload);
  for (Eigen::Index i = 0; i < d.nvox; ++i) {
    const double v = static_cast<double>(src[i]) * d.slope + d.inter;
    if constexpr (std::is_integral_v<Scalar>)
      out.data[i] = static_cast<Scalar>(std::llround(v));
    else
      out.data[i] = static_cast<Scalar>(v);
  }
}

template <typename Scalar>
VoxelGrid<Scalar> parse(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> inflated;
  const Decoded d = decode(bytes, inflated);

  VoxelGrid<Scalar> out(d.dims, d.spacing, d.origin);
  out.orientation = d.orientation;
  switch (d.datatype) {
    case DataType::int16:
      copy_scaled<Scalar, std::int16_t>(d, out);
      break;
    case DataType::int32:
      copy_scaled<Scalar, std::int32_t>(d, out);
      break;
    case DataType::float32:
      copy_scaled<Scalar, float>(d, out);
      break;
  }
  return out;
}

template <typename Scalar, typename Sample>
void encode_samples(const VoxelGrid<Scalar>& g, std::uint8_t* dst,
                    errc overflow_code, const char* what) {
  auto* out = reinterpret_cast<Sample*>(dst);
  constexpr double lo = std::numeric_limits<Sample>::min();
  constexpr double hi = std::numeric_limits<Sample>::max();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double v = static_cast<double>(g.data[i]);
    if (v < lo || v > hi || v != std::floor(v))
      throw Error(overflow_code, std::string(what) + " value " +
                                     std::to_string(v) +
                                     " is not representable on disk");
    out[i] = static_cast<Sample>(v);
  }
}

template <typename Scalar>
std::vector<std::uint8_t> write(const VoxelGrid<Scalar>& g, DataType dt,
                                errc overflow_code, const char* what) {
  for (int a = 0; a < 3; ++a)
    if (g.dims[a] < 1 || g.dims[a] > std::numeric_limits<std::int16_t>::max())
      throw Error(errc::dimension_overflow,
                  "dim " + std::to_string(g.dims[a]) +
                      " does not fit the 16-bit header field");

  Nifti1Header h;
  std::memset(&h, 0, sizeof h);
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = static_cast<std::int16_t>(g.dims.x());
  h.dim[2] = static_cast<std::int16_t>(g.dims.y());
  h.dim[3] = static_cast<std::int16_t>(g.dims.z());
  for (int a = 4; a < 8; ++a) h.dim[a] = 1;
  h.datatype = static_cast<std::int16_t>(dt);
  h.bitpix = static_cast<std::int16_t>(8 * bytes_per_sample(dt));
  h.pixdim[0] = g.orientation.qfac;
  h.pixdim[1] = static_cast<float>(g.spacing.x());
  h.pixdim[2] = static_cast<float>(g.spacing.y());
  h.pixdim[3] = static_cast<float>(g.spacing.z());
  h.vox_offset = static_cast<float>(kVoxOffset);
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.qform_code = g.orientation.qform_code;
  h.sform_code = g.orientation.sform_code;
  h.quatern_b = g.orientation.quatern_b;
  h.quatern_c = g.orientation.quatern_c;
  h.quatern_d = g.orientation.quatern_d;
  h.qoffset_x = static_cast<float>(g.origin.x());
  h.qoffset_y = static_cast<float>(g.origin.y());
  h.qoffset_z = static_cast<float>(g.origin.z());
  std::memcpy(h.srow_x, g.orientation.srow_x, sizeof h.srow_x);
  std::memcpy(h.srow_y, g.orientation.srow_y, sizeof h.srow_y);
  std::memcpy(h.srow_z, g.orientation.srow_z, sizeof h.srow_z);
  std::memcpy(h.magic, "n+1\0", 4);

  const std::size_t payload =
      static_cast<std::size_t>(g.size()) * bytes_per_sample(dt);
  std::vector<std::uint8_t> bytes(kVoxOffset + payload, 0);
  std::memcpy(bytes.data(), &h, kHeaderSize);

  switch (dt) {
    case DataType::int16:
      encode_samples<Scalar, std::int16_t>(g, bytes.data() + kVoxOffset,
                                           overflow_code, what);
      break;
    case DataType::int32:
      encode_samples<Scalar, std::int32_t>(g, bytes.data() + kVoxOffset,
                                           overflow_code, what);
      break;
    case DataType::float32: {
      auto* out = reinterpret_cast<float*>(bytes.data() + kVoxOffset);
      for (Eigen::Index i = 0; i < g.size(); ++i)
        out[i] = static_cast<float>(g.data[i]);
      break;
    }
  }
  return bytes;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(errc::io_error, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad())
    throw Error(errc::io_error, "read failure on " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(errc::io_error, "cannot open " + path.string() +
                                    " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw Error(errc::io_error, "write failure on " + path.string());
}

bool wants_gzip(const std::filesystem::path& path) {
  return path.extension() == ".gz";
}

template <typename Grid>
Grid load(const std::filesystem::path& path, Grid (*parse_fn)(
                                                 std::span<const std::uint8_t>)) {
  const auto bytes = read_file(path);
  try {
    return parse_fn(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace

Volume parse_volume(std::span<const std::uint8_t> bytes) {
  return parse<float>(bytes);
}

LabelMask parse_mask(std::span<const std::uint8_t> bytes) {
  return parse<std::int32_t>(bytes);
}

std::vector<std::uint8_t> write_volume(const Volume& v, DataType dt) {
  return write(v, dt, errc::value_overflow, "volume");
}

std::vector<std::uint8_t> write_mask(const LabelMask& m, DataType dt) {
  return write(m, dt, errc::label_overflow, "label");
}

bool is_gzip(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes) {
  z_stream zs{};
  // windowBits 15+16 selects the gzip wrapper.
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(errc::io_error, "deflateInit2 failed");

  std::vector<std::uint8_t> out(deflateBound(&zs, bytes.size()));
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END)
    throw Error(errc::io_error, "gzip compression failed");
  out.resize(zs.total_out);
  return out;
}

std::vector<std::uint8_t> gzip_decompress(std::span<const std::uint8_t> bytes) {
  z_stream zs{};
  // windowBits 15+32 auto-detects gzip/zlib wrappers.
  if (inflateInit2(&zs, 15 + 32) != Z_OK)
    throw Error(errc::io_error, "inflateInit2 failed");

  std::vector<std::uint8_t> out;
  out.resize(std::max<std::size_t>(bytes.size() * 4, 1024));
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  std::size_t written = 0;
  while (true) {
    zs.next_out = out.data() + written;
    zs.avail_out = static_cast<uInt>(out.size() - written);
    const int rc = inflate(&zs, Z_NO_FLUSH);
    written = zs.total_out;
    if (rc == Z_STREAM_END) break;
    if ((rc == Z_OK || rc == Z_BUF_ERROR) && zs.avail_out == 0) {
      out.resize(out.size() * 2);
      continue;
    }
    inflateEnd(&zs);
    throw Error(errc::truncated_file, "corrupt or truncated gzip stream");
  }
  inflateEnd(&zs);
  out.resize(written);
  return out;
}

Volume load_volume(const std::filesystem::path& path) {
  return load<Volume>(path, &parse_volume);
}

LabelMask load_mask(const std::filesystem::path& path) {
  return load<LabelMask>(path, &parse_mask);
}

void save(const std::filesystem::path& path, const Volume& v) {
  auto bytes = write_volume(v);
  write_file(path, wants_gzip(path) ? gzip_compress(bytes) : bytes);
}

void save(const std::filesystem::path& path, const LabelMask& m) {
  auto bytes = write_mask(m);
  write_file(path, wants_gzip(path) ? gzip_compress(bytes) : bytes);
}

}  // namespace cacs::nifti
