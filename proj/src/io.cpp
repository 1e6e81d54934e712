#include "sas/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

namespace sas {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

namespace fs = std::filesystem;

namespace {

constexpr std::int32_t kNiftiHeaderSize = 348;
constexpr std::int64_t kNiftiDataOffset = 352;

enum DatatypeCode : std::int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kFloat32 = 16,
  kUint16 = 512,
};

// Byte offsets of the NIfTI-1 header fields we read or write.
namespace off {
constexpr std::size_t sizeof_hdr = 0;
constexpr std::size_t regular = 38;
constexpr std::size_t dim = 40;
constexpr std::size_t datatype = 70;
constexpr std::size_t bitpix = 72;
constexpr std::size_t pixdim = 76;
constexpr std::size_t vox_offset = 108;
constexpr std::size_t scl_slope = 112;
constexpr std::size_t scl_inter = 116;
constexpr std::size_t xyzt_units = 123;
constexpr std::size_t descrip = 148;
constexpr std::size_t qform_code = 252;
constexpr std::size_t sform_code = 254;
constexpr std::size_t magic = 344;
}  // namespace off

std::string errno_text() { return std::strerror(errno); }

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <class T>
T load(const std::vector<unsigned char>& buf, std::size_t pos, bool swap) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  if (swap) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
  }
  return v;
}

template <class T>
void store(std::vector<unsigned char>& buf, std::size_t pos, T v) {
  std::memcpy(buf.data() + pos, &v, sizeof(T));
}

std::vector<unsigned char> slurp_gz(const fs::path& path) {
  // gzread passes uncompressed files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open " + path.string() + ": " + errno_text());
  std::vector<unsigned char> out;
  std::array<unsigned char, 1 << 16> chunk{};
  for (;;) {
    const int n = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int code = 0;
      const std::string msg = gzerror(f, &code);
      gzclose(f);
      throw IoError("read error in " + path.string() + ": " + msg);
    }
    if (n == 0) break;
    out.insert(out.end(), chunk.begin(), chunk.begin() + n);
  }
  gzclose(f);
  return out;
}

std::vector<unsigned char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + errno_text());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t bytes_per_voxel(std::int16_t code) {
  switch (code) {
    case kUint8: return 1;
    case kInt16:
    case kUint16: return 2;
    case kFloat32: return 4;
    default: throw UnsupportedDatatypeError(code);
  }
}

std::int16_t datatype_from_name(const std::string& name) {
  if (name == "uint8") return kUint8;
  if (name == "int16") return kInt16;
  if (name == "uint16") return kUint16;
  if (name == "float32") return kFloat32;
  throw FormatError("unsupported datatype '" + name + "'");
}

std::string datatype_name(std::int16_t code) {
  switch (code) {
    case kUint8: return "uint8";
    case kInt16: return "int16";
    case kUint16: return "uint16";
    case kFloat32: return "float32";
    default: throw UnsupportedDatatypeError(code);
  }
}

// Decodes a payload into a label volume when every value is a non-negative
// integer and no scaling applies, else into a scalar volume.
AnyVolume decode_payload(const Dims& dims, const Spacing& spacing, std::int16_t code,
                         const unsigned char* payload, bool swap, double slope, double inter) {
  const auto n = static_cast<std::size_t>(dims.size());
  std::vector<double> values(n);
  const bool scaled = slope != 0.0 && !(slope == 1.0 && inter == 0.0);

  auto decode = [&]<class T>(T) {
    for (std::size_t i = 0; i < n; ++i) {
      T v;
      std::memcpy(&v, payload + i * sizeof(T), sizeof(T));
      if (swap) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        v = std::bit_cast<T>(bytes);
      }
      values[i] = static_cast<double>(v);
    }
  };
  switch (code) {
    case kUint8: decode(std::uint8_t{}); break;
    case kInt16: decode(std::int16_t{}); break;
    case kUint16: decode(std::uint16_t{}); break;
    case kFloat32: decode(float{}); break;
    default: throw UnsupportedDatatypeError(code);
  }

  if (scaled) {
    for (double& v : values) v = v * slope + inter;
  }
  const bool integral_type = code != kFloat32;
  const bool non_negative = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
  if (integral_type && !scaled && non_negative) {
    std::vector<Label> labels(n);
    std::transform(values.begin(), values.end(), labels.begin(),
                   [](double v) { return static_cast<Label>(v); });
    return LabelVolume(dims, spacing, std::move(labels));
  }
  return ScalarVolume(dims, spacing, std::move(values));
}

LoadedVolume read_nifti(const fs::path& path) {
  const std::vector<unsigned char> buf = slurp_gz(path);
  if (buf.size() < static_cast<std::size_t>(kNiftiHeaderSize)) {
    throw FormatError(path.string() + ": file shorter than a NIfTI-1 header");
  }
  bool swap = false;
  const auto hdr_size = load<std::int32_t>(buf, off::sizeof_hdr, false);
  if (hdr_size != kNiftiHeaderSize) {
    if (load<std::int32_t>(buf, off::sizeof_hdr, true) != kNiftiHeaderSize) {
      throw FormatError(path.string() + ": sizeof_hdr is not 348");
    }
    swap = true;
  }
  if (std::memcmp(buf.data() + off::magic, "n+1\0", 4) != 0) {
    throw FormatError(path.string() + ": magic is not \"n+1\" (split header/image pairs are not supported)");
  }

  const auto ndim = load<std::int16_t>(buf, off::dim, swap);
  if (ndim != 3) {
    throw FormatError(path.string() + ": expected 3 dimensions, header declares " + std::to_string(ndim));
  }
  Dims dims{load<std::int16_t>(buf, off::dim + 2, swap), load<std::int16_t>(buf, off::dim + 4, swap),
            load<std::int16_t>(buf, off::dim + 6, swap)};
  Spacing spacing{std::abs(load<float>(buf, off::pixdim + 4, swap)),
                  std::abs(load<float>(buf, off::pixdim + 8, swap)),
                  std::abs(load<float>(buf, off::pixdim + 12, swap))};
  validate_geometry(dims, spacing);

  const auto code = load<std::int16_t>(buf, off::datatype, swap);
  const std::size_t bpv = bytes_per_voxel(code);

  const auto vox_offset = static_cast<std::int64_t>(load<float>(buf, off::vox_offset, swap));
  if (vox_offset < kNiftiHeaderSize) throw FormatError(path.string() + ": invalid vox_offset");
  const std::size_t expected = static_cast<std::size_t>(dims.size()) * bpv;
  const std::size_t available =
      buf.size() > static_cast<std::size_t>(vox_offset) ? buf.size() - static_cast<std::size_t>(vox_offset) : 0;
  if (available < expected) {
    throw FormatError(path.string() + ": truncated payload, expected " + std::to_string(expected) +
                      " bytes, found " + std::to_string(available));
  }

  LoadedVolume out{decode_payload(dims, spacing, code, buf.data() + vox_offset, swap,
                                  load<float>(buf, off::scl_slope, swap),
                                  load<float>(buf, off::scl_inter, swap)),
                   {}};
  if (load<std::int16_t>(buf, off::qform_code, swap) > 0 || load<std::int16_t>(buf, off::sform_code, swap) > 0) {
    out.warnings.push_back("qform/sform orientation present but ignored; only pixdim spacing is used");
  }
  return out;
}

fs::path raw_payload_path(const fs::path& path) {
  fs::path p = path;
  return p.replace_extension(".bin");
}

fs::path raw_sidecar_path(const fs::path& path) {
  fs::path p = path;
  return p.replace_extension(".json");
}

LoadedVolume read_raw(const fs::path& path) {
  const fs::path sidecar = raw_sidecar_path(path);
  std::ifstream in(sidecar);
  if (!in) throw IoError("cannot open raw sidecar " + sidecar.string() + ": " + errno_text());
  nlohmann::json desc;
  try {
    desc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(sidecar.string() + ": " + e.what());
  }
  if (!desc.contains("dims") || desc["dims"].size() != 3) {
    throw FormatError(sidecar.string() + ": expected 3 dims");
  }
  if (desc.value("order", std::string("x-fastest")) != "x-fastest") {
    throw FormatError(sidecar.string() + ": only order \"x-fastest\" is supported");
  }
  const Dims dims{desc["dims"][0].get<std::int64_t>(), desc["dims"][1].get<std::int64_t>(),
                  desc["dims"][2].get<std::int64_t>()};
  Spacing spacing{};
  if (desc.contains("spacing")) {
    spacing = {desc["spacing"][0].get<double>(), desc["spacing"][1].get<double>(),
               desc["spacing"][2].get<double>()};
  }
  validate_geometry(dims, spacing);
  const std::int16_t code = datatype_from_name(desc.value("dtype", std::string("uint8")));

  const std::vector<unsigned char> payload = slurp(raw_payload_path(path));
  const std::size_t expected = static_cast<std::size_t>(dims.size()) * bytes_per_voxel(code);
  if (payload.size() < expected) {
    throw FormatError(raw_payload_path(path).string() + ": truncated payload, expected " +
                      std::to_string(expected) + " bytes, found " + std::to_string(payload.size()));
  }
  return {decode_payload(dims, spacing, code, payload.data(), false, 0.0, 0.0), {}};
}

struct Encoded {
  std::int16_t code;
  std::vector<unsigned char> bytes;
};

template <class T, class Src>
std::vector<unsigned char> pack(std::span<const Src> src) {
  std::vector<unsigned char> out(src.size() * sizeof(T));
  for (std::size_t i = 0; i < src.size(); ++i) {
    const T v = static_cast<T>(src[i]);
    std::memcpy(out.data() + i * sizeof(T), &v, sizeof(T));
  }
  return out;
}

Encoded encode(const AnyVolume& vol) {
  return std::visit(
      [](const auto& v) -> Encoded {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, LabelVolume>) {
          const Label top = v.data().empty() ? 0 : *std::max_element(v.data().begin(), v.data().end());
          if (top <= std::numeric_limits<std::uint8_t>::max()) return {kUint8, pack<std::uint8_t>(v.data())};
          if (top <= std::numeric_limits<std::uint16_t>::max()) return {kUint16, pack<std::uint16_t>(v.data())};
          throw FormatError("label " + std::to_string(top) + " does not fit the uint16 on-disk type");
        } else if constexpr (std::is_same_v<V, BinaryMask>) {
          return {kUint8, pack<std::uint8_t>(v.data())};
        } else {
          return {kFloat32, pack<float>(v.data())};
        }
      },
      vol);
}

std::pair<Dims, Spacing> geometry_of(const AnyVolume& vol) {
  return std::visit([](const auto& v) { return std::make_pair(v.dims(), v.spacing()); }, vol);
}

std::vector<unsigned char> nifti_header(const Dims& dims, const Spacing& spacing, std::int16_t code) {
  std::vector<unsigned char> h(static_cast<std::size_t>(kNiftiDataOffset), 0);
  store<std::int32_t>(h, off::sizeof_hdr, kNiftiHeaderSize);
  h[off::regular] = 'r';
  const std::array<std::int16_t, 8> dim{3, static_cast<std::int16_t>(dims.nx), static_cast<std::int16_t>(dims.ny),
                                        static_cast<std::int16_t>(dims.nz), 1, 1, 1, 1};
  for (std::size_t i = 0; i < dim.size(); ++i) store<std::int16_t>(h, off::dim + 2 * i, dim[i]);
  store<std::int16_t>(h, off::datatype, code);
  store<std::int16_t>(h, off::bitpix, static_cast<std::int16_t>(8 * bytes_per_voxel(code)));
  const std::array<float, 8> pixdim{1.0f, static_cast<float>(spacing.x), static_cast<float>(spacing.y),
                                    static_cast<float>(spacing.z), 1.0f, 1.0f, 1.0f, 1.0f};
  for (std::size_t i = 0; i < pixdim.size(); ++i) store<float>(h, off::pixdim + 4 * i, pixdim[i]);
  store<float>(h, off::vox_offset, static_cast<float>(kNiftiDataOffset));
  store<float>(h, off::scl_slope, 1.0f);
  store<float>(h, off::scl_inter, 0.0f);
  h[off::xyzt_units] = 2;  // mm
  const char descrip[] = "sas";
  std::memcpy(h.data() + off::descrip, descrip, sizeof(descrip));
  std::memcpy(h.data() + off::magic, "n+1\0", 4);
  return h;
}

fs::path temp_sibling(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".partial";
  return tmp;
}

void write_plain(const fs::path& path, std::span<const std::vector<unsigned char>> chunks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string() + ": " + errno_text());
  for (const auto& c : chunks) out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size()));
  out.close();
  if (!out) throw IoError("write failed for " + path.string() + ": " + errno_text());
}

void write_gz(const fs::path& path, std::span<const std::vector<unsigned char>> chunks) {
  gzFile f = gzopen(path.c_str(), "wb6");
  if (f == nullptr) throw IoError("cannot create " + path.string() + ": " + errno_text());
  for (const auto& c : chunks) {
    if (c.empty()) continue;
    if (gzwrite(f, c.data(), static_cast<unsigned>(c.size())) == 0) {
      int code = 0;
      const std::string msg = gzerror(f, &code);
      gzclose(f);
      throw IoError("write failed for " + path.string() + ": " + msg);
    }
  }
  if (gzclose(f) != Z_OK) throw IoError("write failed for " + path.string());
}

// Writes `chunks` to a temporary sibling, then renames over `path`.
void commit(const fs::path& path, std::span<const std::vector<unsigned char>> chunks, bool gz) {
  const fs::path tmp = temp_sibling(path);
  try {
    if (gz) {
      write_gz(tmp, chunks);
    } else {
      write_plain(tmp, chunks);
    }
    fs::rename(tmp, path);
  } catch (const fs::filesystem_error& e) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError(e.what());
  } catch (...) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw;
  }
}

}  // namespace

VolumeFormat format_from_path(const fs::path& path) {
  const std::string name = path.filename().string();
  if (ends_with(name, ".nii.gz")) return VolumeFormat::nifti_gz;
  if (ends_with(name, ".nii")) return VolumeFormat::nifti;
  if (ends_with(name, ".json") || ends_with(name, ".bin")) return VolumeFormat::raw;
  throw FormatError("cannot infer volume format from '" + name + "'");
}

LoadedVolume read_volume(const fs::path& path, std::optional<VolumeFormat> format_hint) {
  const VolumeFormat format = format_hint.value_or(format_from_path(path));
  if (format == VolumeFormat::raw) return read_raw(path);
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  return read_nifti(path);
}

LabelVolume read_label_volume(const fs::path& path, std::optional<VolumeFormat> format_hint) {
  LoadedVolume loaded = read_volume(path, format_hint);
  if (auto* labels = std::get_if<LabelVolume>(&loaded.volume)) return std::move(*labels);
  if (auto* mask = std::get_if<BinaryMask>(&loaded.volume)) {
    return LabelVolume(mask->dims(), mask->spacing(), std::vector<Label>(mask->data().begin(), mask->data().end()));
  }
  const auto& scalars = std::get<ScalarVolume>(loaded.volume);
  std::vector<Label> labels(scalars.data().size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = scalars.data()[i];
    if (v < 0.0 || v != std::floor(v) || v > std::numeric_limits<Label>::max()) {
      throw FormatError(path.string() + ": not a label volume (value " + std::to_string(v) + ")");
    }
    labels[i] = static_cast<Label>(v);
  }
  return LabelVolume(scalars.dims(), scalars.spacing(), std::move(labels));
}

void write_volume(const AnyVolume& vol, const fs::path& path, std::optional<VolumeFormat> format) {
  const VolumeFormat fmt = format.value_or(format_from_path(path));
  const auto [dims, spacing] = geometry_of(vol);
  const Encoded enc = encode(vol);

  if (fmt == VolumeFormat::raw) {
    nlohmann::json desc = {{"dims", {dims.nx, dims.ny, dims.nz}},
                           {"spacing", {spacing.x, spacing.y, spacing.z}},
                           {"dtype", datatype_name(enc.code)},
                           {"order", "x-fastest"}};
    const std::string text = desc.dump(2) + "\n";
    const std::vector<std::vector<unsigned char>> payload{enc.bytes};
    const std::vector<std::vector<unsigned char>> sidecar{std::vector<unsigned char>(text.begin(), text.end())};
    commit(raw_payload_path(path), payload, false);
    commit(raw_sidecar_path(path), sidecar, false);
    return;
  }
  if (dims.nx > std::numeric_limits<std::int16_t>::max() || dims.ny > std::numeric_limits<std::int16_t>::max() ||
      dims.nz > std::numeric_limits<std::int16_t>::max()) {
    throw FormatError("dims exceed the NIfTI-1 limit of 32767");
  }
  const std::vector<std::vector<unsigned char>> chunks{nifti_header(dims, spacing, enc.code), enc.bytes};
  commit(path, chunks, fmt == VolumeFormat::nifti_gz);
}

}  // namespace sas
