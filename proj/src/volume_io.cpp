#include "cacs/volume_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace cacs {

Volume resample_axial(const Volume& v, double target_thickness_mm) {
  if (!(target_thickness_mm > 0.0))
    throw Error(errc::degenerate_input, "target thickness must be positive");

  const double dz_in = v.spacing.z();
  if (target_thickness_mm == dz_in) return v;  // voxel-exact identity

  const int nz_in = v.dims.z();
  const int nz_out = std::max<int>(
      1, static_cast<int>(std::lround(nz_in * dz_in / target_thickness_mm)));

  Volume out(Eigen::Vector3i(v.dims.x(), v.dims.y(), nz_out), v.spacing,
             v.origin);
  out.orientation = v.orientation;
  out.spacing.z() = target_thickness_mm;
  // Slice centers sit at (k + 0.5) * dz from the volume start, so the first
  // output center moves by half the thickness difference.
  out.origin.z() = v.origin.z() + (target_thickness_mm - dz_in) / 2.0;

  const Eigen::Index plane = v.plane();
  for (int k = 0; k < nz_out; ++k) {
    double t = ((k + 0.5) * target_thickness_mm) / dz_in - 0.5;
    t = std::clamp(t, 0.0, static_cast<double>(nz_in - 1));
    const int k0 = static_cast<int>(t);
    const int k1 = std::min(k0 + 1, nz_in - 1);
    const double f = t - k0;
    out.data.segment(plane * k, plane) =
        ((1.0 - f) * v.slice(k0).cast<double>() +
         f * v.slice(k1).cast<double>())
            .cast<float>();
  }
  return out;
}

namespace {

// Minimal reader for the fixed plaque-coordinate schema. Anything outside
// that schema is a SchemaError.
class XmlCursor {
 public:
  explicit XmlCursor(std::string_view text) : s_(text) {}

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool eof() {
    skip_space();
    return pos_ >= s_.size();
  }

  // At '<': true if the next construct is the named opening tag.
  bool peek_open(std::string_view name) {
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != '<') return false;
    const std::size_t p = pos_ + 1;
    return s_.compare(p, name.size(), name) == 0 &&
           p + name.size() < s_.size() &&
           (std::isspace(static_cast<unsigned char>(s_[p + name.size()])) ||
            s_[p + name.size()] == '>' || s_[p + name.size()] == '/');
  }

  bool peek_close(std::string_view name) {
    skip_space();
    return pos_ + 1 < s_.size() && s_[pos_] == '<' && s_[pos_ + 1] == '/' &&
           s_.compare(pos_ + 2, name.size(), name) == 0;
  }

  // Consumes "<name attr=...>" or "<name .../>"; returns the attributes and
  // whether the element was self-closing.
  std::map<std::string, std::string> open(std::string_view name,
                                          bool& self_closed) {
    skip_space();
    expect('<');
    expect_name(name);
    std::map<std::string, std::string> attrs;
    while (true) {
      skip_space();
      if (pos_ >= s_.size()) fail("unterminated tag");
      if (s_[pos_] == '>') {
        ++pos_;
        self_closed = false;
        return attrs;
      }
      if (s_[pos_] == '/') {
        ++pos_;
        expect('>');
        self_closed = true;
        return attrs;
      }
      std::string key = read_name();
      skip_space();
      expect('=');
      skip_space();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\''))
        fail("attribute value must be quoted");
      const char quote = s_[pos_++];
      const std::size_t end = s_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      if (!attrs.emplace(std::move(key), std::string(s_.substr(pos_, end - pos_)))
               .second)
        fail("duplicate attribute");
      pos_ = end + 1;
    }
  }

  void close(std::string_view name) {
    skip_space();
    expect('<');
    expect('/');
    expect_name(name);
    skip_space();
    expect('>');
  }

  void skip_prolog() {
    skip_space();
    while (pos_ + 1 < s_.size() && s_[pos_] == '<' &&
           (s_[pos_ + 1] == '?' || s_[pos_ + 1] == '!')) {
      const std::size_t end = s_.find('>', pos_);
      if (end == std::string_view::npos) fail("unterminated prolog");
      pos_ = end + 1;
      skip_space();
    }
  }

  [[noreturn]] void fail(const std::string& why) {
    throw Error(errc::schema_error,
                "malformed ground-truth XML near offset " +
                    std::to_string(pos_) + ": " + why);
  }

 private:
  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void expect_name(std::string_view name) {
    if (s_.compare(pos_, name.size(), name) != 0)
      fail("expected element <" + std::string(name) + ">");
    pos_ += name.size();
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_' || s_[pos_] == '-'))
      ++pos_;
    if (pos_ == start) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

int parse_int_attr(XmlCursor& cur, const std::map<std::string, std::string>& attrs,
                   const char* key) {
  const auto it = attrs.find(key);
  if (it == attrs.end())
    cur.fail(std::string("missing attribute '") + key + "'");
  const std::string& text = it->second;
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    cur.fail(std::string("attribute '") + key + "' is not an integer");
  }
  if (used != text.size())
    cur.fail(std::string("attribute '") + key + "' is not an integer");
  return value;
}

}  // namespace

LabelMask ingest_xml_ground_truth(std::string_view xml,
                                  const Volume& geometry) {
  XmlCursor cur(xml);
  cur.skip_prolog();

  bool root_closed = false;
  auto root_attrs = cur.open("plaques", root_closed);
  if (!root_attrs.empty()) cur.fail("<plaques> takes no attributes");

  LabelMask mask = make_like<std::int32_t>(geometry);

  int label = 0;
  if (!root_closed) {
    while (cur.peek_open("lesion")) {
      ++label;
      bool lesion_closed = false;
      auto attrs = cur.open("lesion", lesion_closed);
      parse_int_attr(cur, attrs, "id");  // required by the schema
      if (attrs.size() != 1) cur.fail("<lesion> takes only the id attribute");

      while (!lesion_closed && cur.peek_open("voxel")) {
        bool voxel_closed = false;
        auto vattrs = cur.open("voxel", voxel_closed);
        const int x = parse_int_attr(cur, vattrs, "x");
        const int y = parse_int_attr(cur, vattrs, "y");
        const int z = parse_int_attr(cur, vattrs, "z");
        if (vattrs.size() != 3)
          cur.fail("<voxel> takes only x, y, z attributes");
        if (!voxel_closed) cur.close("voxel");

        if (!mask.in_bounds(x, y, z))
          throw Error(errc::out_of_bounds,
                      "voxel (" + std::to_string(x) + "," + std::to_string(y) +
                          "," + std::to_string(z) + ") outside volume dims");
        auto& cell = mask.at(x, y, z);
        if (cell != 0)
          throw Error(errc::duplicate_voxel,
                      "voxel (" + std::to_string(x) + "," + std::to_string(y) +
                          "," + std::to_string(z) +
                          ") claimed by lesions " + std::to_string(cell) +
                          " and " + std::to_string(label));
        cell = label;
      }
      if (!lesion_closed) cur.close("lesion");
    }
    cur.close("plaques");
  }
  if (!cur.eof()) cur.fail("trailing content after </plaques>");
  return mask;
}

}  // namespace cacs
