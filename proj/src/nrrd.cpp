#include "ooclab/nrrd.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "ooclab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "raw payload I/O assumes a little-endian host");

namespace ooclab {
namespace {

constexpr std::string_view kMagic = "NRRD0004";

std::string format_spacing(double s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", s);
  return buf;
}

template <typename Scalar>
std::string write_impl(const Volume<Scalar>& v, const char* type_name) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "type: " << type_name << "\n";
  out << "dimension: 3\n";
  out << "sizes: " << v.dims().x() << " " << v.dims().y() << " "
      << v.dims().z() << "\n";
  out << "spacings: " << format_spacing(v.spacing().x()) << " "
      << format_spacing(v.spacing().y()) << " "
      << format_spacing(v.spacing().z()) << "\n";
  out << "endian: little\n";
  out << "encoding: raw\n";
  out << "\n";
  out.write(reinterpret_cast<const char*>(v.data().data()),
            static_cast<std::streamsize>(v.size() * sizeof(Scalar)));
  return std::move(out).str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) parts.push_back(s.substr(start, i - start));
  }
  return parts;
}

long parse_long(std::string_view s) {
  long value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw FormatError("nrrd: bad integer '" + std::string(s) + "'");
  return value;
}

double parse_double(std::string_view s) {
  double value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw FormatError("nrrd: bad number '" + std::string(s) + "'");
  return value;
}

struct Header {
  std::string type;
  Eigen::Vector3i sizes;
  Eigen::Vector3d spacings;
  std::size_t payload_offset = 0;
};

Header parse_header(std::string_view bytes) {
  std::size_t pos = 0;
  const auto next_line = [&]() -> std::string_view {
    if (pos >= bytes.size()) throw FormatError("nrrd: truncated header");
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos)
      throw FormatError("nrrd: truncated header");
    std::string_view line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  if (next_line() != kMagic) throw FormatError("nrrd: bad magic");

  std::map<std::string, std::string, std::less<>> fields;
  for (;;) {
    std::string_view line = next_line();
    if (trim(line).empty()) break;  // blank line ends the header
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos)
      throw FormatError("nrrd: malformed field line");
    std::string key(trim(line.substr(0, colon)));
    std::string value(trim(line.substr(colon + 1)));
    if (!fields.emplace(std::move(key), std::move(value)).second)
      throw FormatError("nrrd: duplicate field");
  }

  static const char* kRequired[] = {"type",     "dimension", "sizes",
                                    "spacings", "endian",    "encoding"};
  for (const char* key : kRequired)
    if (!fields.count(key))
      throw FormatError(std::string("nrrd: missing field '") + key + "'");
  for (const auto& [key, value] : fields) {
    bool known = false;
    for (const char* k : kRequired) known |= key == k;
    if (!known) throw FormatError("nrrd: unsupported field '" + key + "'");
  }

  Header h;
  h.type = fields["type"];
  if (h.type != "float" && h.type != "uint8")
    throw FormatError("nrrd: unsupported type '" + h.type + "'");
  if (parse_long(fields["dimension"]) != 3)
    throw FormatError("nrrd: only dimension 3 is supported");
  if (fields["endian"] != "little")
    throw FormatError("nrrd: only little endian is supported");
  if (fields["encoding"] != "raw")
    throw FormatError("nrrd: only raw encoding is supported");

  const auto sizes = split_ws(fields["sizes"]);
  if (sizes.size() != 3) throw FormatError("nrrd: sizes needs 3 entries");
  for (int k = 0; k < 3; ++k) {
    long s = parse_long(sizes[k]);
    if (s < 1 || s > (1 << 20)) throw FormatError("nrrd: bad size value");
    h.sizes[k] = static_cast<int>(s);
  }

  const auto spacings = split_ws(fields["spacings"]);
  if (spacings.size() != 3)
    throw FormatError("nrrd: spacings needs 3 entries");
  for (int k = 0; k < 3; ++k) {
    double s = parse_double(spacings[k]);
    if (!(s > 0.0)) throw FormatError("nrrd: spacings must be positive");
    h.spacings[k] = s;
  }

  h.payload_offset = pos;
  return h;
}

template <typename Scalar>
Volume<Scalar> read_payload(std::string_view bytes, const Header& h) {
  Volume<Scalar> v(h.sizes, h.spacings);
  const std::size_t expected =
      static_cast<std::size_t>(v.size()) * sizeof(Scalar);
  const std::size_t actual = bytes.size() - h.payload_offset;
  if (actual != expected)
    throw FormatError("nrrd: payload holds " + std::to_string(actual) +
                      " bytes, header expects " + std::to_string(expected));
  std::memcpy(v.data().data(), bytes.data() + h.payload_offset, expected);
  return v;
}

}  // namespace

std::string write_volume(const VoxelVolume& volume) {
  return write_impl(volume, "float");
}

std::string write_volume(const LabelVolume& volume) {
  return write_impl(volume, "uint8");
}

AnyVolume read_volume(std::string_view bytes) {
  const Header h = parse_header(bytes);
  if (h.type == "float") return read_payload<float>(bytes, h);
  return read_payload<std::uint8_t>(bytes, h);
}

VoxelVolume read_voxel_volume(std::string_view bytes) {
  AnyVolume v = read_volume(bytes);
  if (!std::holds_alternative<VoxelVolume>(v))
    throw FormatError("nrrd: expected a float intensity volume");
  return std::get<VoxelVolume>(std::move(v));
}

LabelVolume read_label_volume(std::string_view bytes) {
  AnyVolume v = read_volume(bytes);
  if (!std::holds_alternative<LabelVolume>(v))
    throw FormatError("nrrd: expected a uint8 label volume");
  return std::get<LabelVolume>(std::move(v));
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path.string());
  return std::move(buf).str();
}

void write_file_bytes(const std::filesystem::path& path,
                      std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

AnyVolume read_volume_file(const std::filesystem::path& path) {
  return read_volume(read_file_bytes(path));
}

VoxelVolume read_voxel_volume_file(const std::filesystem::path& path) {
  return read_voxel_volume(read_file_bytes(path));
}

LabelVolume read_label_volume_file(const std::filesystem::path& path) {
  return read_label_volume(read_file_bytes(path));
}

void write_volume_file(const std::filesystem::path& path,
                       const VoxelVolume& volume) {
  write_file_bytes(path, write_volume(volume));
}

void write_volume_file(const std::filesystem::path& path,
                       const LabelVolume& volume) {
  write_file_bytes(path, write_volume(volume));
}

}  // namespace ooclab
