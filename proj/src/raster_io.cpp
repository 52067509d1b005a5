#include "litterscan/raster_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "litterscan/error.hpp"

namespace litterscan {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kExtentTolerance = 1e-6;

bool is_supported_gsd(double gsd) { return gsd == 10.0 || gsd == 20.0 || gsd == 60.0; }

void check_geometry(const std::string& id, std::size_t rows, std::size_t cols, double gsd, double extent)
{
  if (rows == 0 || cols == 0) throw Error("band " + id + ": empty raster");
  if (std::abs(static_cast<double>(rows) * gsd - extent) > kExtentTolerance ||
      std::abs(static_cast<double>(cols) * gsd - extent) > kExtentTolerance) {
    std::ostringstream os;
    os << "band " << id << ": dimension/extent mismatch (" << rows << "x" << cols << " at " << gsd
       << " m vs extent " << extent << " m)";
    throw Error(os.str());
  }
}

void check_spec(const BandSpec& spec)
{
  if (!canonical_index(spec.id)) throw Error("unknown band id '" + spec.id + "'");
  if (!(spec.wavelength_nm > 0.0) || !std::isfinite(spec.wavelength_nm))
    throw Error("band " + spec.id + ": wavelength must be positive");
  if (!is_supported_gsd(spec.native_gsd_m))
    throw Error("band " + spec.id + ": native_gsd_m must be 10, 20 or 60");
}

bool canonical_less(const std::string& a, const std::string& b)
{
  return *canonical_index(a) < *canonical_index(b);
}

// Netpbm header token reader: skips whitespace and '#' comments.
class PgmHeader {
 public:
  explicit PgmHeader(const std::vector<std::uint8_t>& data) : data_(data) {}

  std::string token()
  {
    skip_space();
    std::string out;
    while (pos_ < data_.size() && !std::isspace(data_[pos_]) && data_[pos_] != '#') {
      out.push_back(static_cast<char>(data_[pos_++]));
    }
    if (out.empty()) throw Error("truncated PGM header");
    return out;
  }

  std::size_t number()
  {
    const std::string tok = token();
    if (!std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error("malformed PGM header field '" + tok + "'");
    return std::stoul(tok);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t payload_offset()
  {
    if (pos_ >= data_.size() || !std::isspace(data_[pos_])) throw Error("truncated PGM header");
    return pos_ + 1;
  }

 private:
  void skip_space()
  {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(data_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& data_;
  std::size_t pos_ = 0;
};

struct PgmImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t maxval = 0;
  std::vector<std::uint16_t> samples;
};

PgmImage read_pgm(const fs::path& path)
{
  const auto data = read_file_bytes(path);
  PgmHeader header(data);
  const std::string magic = header.token();
  if (magic != "P5") {
    if (magic.size() == 2 && magic[0] == 'P') throw Error(path.string() + ": unsupported PGM variant " + magic);
    throw Error(path.string() + ": not a PGM file");
  }
  PgmImage img;
  img.cols = header.number();
  img.rows = header.number();
  img.maxval = header.number();
  if (img.maxval != 255 && img.maxval != 65535)
    throw Error(path.string() + ": unsupported PGM maxval " + std::to_string(img.maxval));
  if (img.rows == 0 || img.cols == 0) throw Error(path.string() + ": empty PGM");

  const std::size_t offset = header.payload_offset();
  const std::size_t count = img.rows * img.cols;
  const std::size_t bytes_per_sample = img.maxval == 255 ? 1 : 2;
  if (data.size() < offset + count * bytes_per_sample) throw Error(path.string() + ": truncated PGM payload");

  img.samples.resize(count);
  const std::uint8_t* p = data.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    // 16-bit PGM samples are big-endian.
    img.samples[i] = bytes_per_sample == 1 ? p[i]
                                           : static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
  }
  return img;
}

std::string pgm_header(std::size_t rows, std::size_t cols, int maxval)
{
  std::ostringstream os;
  os << "P5\n" << cols << " " << rows << "\n" << maxval << "\n";
  return os.str();
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where)
{
  if (!obj.is_object() || !obj.contains(key)) throw Error("malformed manifest: " + where + " lacks '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error("malformed manifest: " + where + " has invalid '" + key + "'");
  }
}

}  // namespace

BandStack::BandStack(std::vector<Band> bands, double extent_m) : bands_(std::move(bands)), extent_m_(extent_m)
{
  if (bands_.empty()) throw Error("band stack is empty");
  if (!(extent_m_ > 0.0) || !std::isfinite(extent_m_)) throw Error("band stack extent must be positive");

  std::set<std::string> seen;
  for (const auto& band : bands_) {
    check_spec(band.spec);
    if (!seen.insert(band.spec.id).second) throw Error("duplicate band id " + band.spec.id);
    if (band.pixels.size() != band.rows * band.cols)
      throw Error("band " + band.spec.id + ": pixel count does not match rows*cols");
    check_geometry(band.spec.id, band.rows, band.cols, band.spec.native_gsd_m, extent_m_);
  }
  std::sort(bands_.begin(), bands_.end(),
            [](const Band& a, const Band& b) { return canonical_less(a.spec.id, b.spec.id); });
}

const Band* BandStack::find(std::string_view id) const
{
  for (const auto& band : bands_) {
    if (band.spec.id == id) return &band;
  }
  return nullptr;
}

LabelMask::LabelMask(std::size_t rows_, std::size_t cols_, std::vector<std::uint8_t> labels_)
    : rows(rows_), cols(cols_), labels(std::move(labels_))
{
  if (labels.size() != rows * cols) throw Error("mask label count does not match rows*cols");
  for (auto v : labels) {
    if (v > 1) throw Error("mask labels must be 0 or 1");
  }
}

Manifest read_manifest(const fs::path& manifest_path)
{
  if (!fs::exists(manifest_path)) throw Error("missing manifest " + manifest_path.string());
  json doc;
  {
    std::ifstream in(manifest_path);
    if (!in) throw Error("cannot open manifest " + manifest_path.string());
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw Error("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
  }

  Manifest manifest;
  manifest.extent_m = required<double>(doc, "extent_m", "manifest");
  if (!(manifest.extent_m > 0.0)) throw Error("malformed manifest: extent_m must be positive");
  if (!doc.contains("bands") || !doc["bands"].is_array() || doc["bands"].empty())
    throw Error("malformed manifest: 'bands' must be a nonempty array");

  const fs::path base = manifest_path.parent_path();
  std::set<std::string> seen;
  for (const auto& entry : doc["bands"]) {
    ManifestEntry band;
    band.spec.id = required<std::string>(entry, "id", "band entry");
    const std::string where = "band " + band.spec.id;
    band.spec.wavelength_nm = required<double>(entry, "wavelength_nm", where);
    band.spec.native_gsd_m = required<double>(entry, "native_gsd_m", where);
    band.rows = required<std::size_t>(entry, "rows", where);
    band.cols = required<std::size_t>(entry, "cols", where);
    band.file = base / required<std::string>(entry, "file", where);
    if (entry.contains("dtype") && entry["dtype"] != "u16le")
      throw Error("malformed manifest: " + where + " dtype must be u16le");

    check_spec(band.spec);
    if (!seen.insert(band.spec.id).second) throw Error("duplicate band id " + band.spec.id);
    check_geometry(band.spec.id, band.rows, band.cols, band.spec.native_gsd_m, manifest.extent_m);

    if (!fs::exists(band.file)) throw Error("missing band file " + band.file.string());
    if (fs::file_size(band.file) != band.rows * band.cols * 2)
      throw Error(where + ": payload size does not equal rows*cols*2 bytes");
    manifest.bands.push_back(std::move(band));
  }
  std::sort(manifest.bands.begin(), manifest.bands.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return canonical_less(a.spec.id, b.spec.id); });
  return manifest;
}

BandStack load_stack(const fs::path& manifest_path)
{
  const Manifest manifest = read_manifest(manifest_path);
  std::vector<Band> bands;
  bands.reserve(manifest.bands.size());
  for (const auto& entry : manifest.bands) {
    const auto bytes = read_file_bytes(entry.file);
    Band band{entry.spec, entry.rows, entry.cols, {}};
    band.pixels.resize(entry.rows * entry.cols);
    if (bytes.size() != band.pixels.size() * 2) throw Error("band " + entry.spec.id + ": truncated payload");
    for (std::size_t i = 0; i < band.pixels.size(); ++i) {
      band.pixels[i] = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    }
    bands.push_back(std::move(band));
  }
  return BandStack(std::move(bands), manifest.extent_m);
}

void save_stack(const BandStack& stack, const fs::path& manifest_path)
{
  const fs::path base = manifest_path.parent_path();
  if (!base.empty()) fs::create_directories(base);

  json doc;
  doc["extent_m"] = stack.extent_m();
  doc["bands"] = json::array();
  for (const auto& band : stack.bands()) {
    const std::string file = band.spec.id + ".u16";
    std::vector<std::uint8_t> bytes(band.pixels.size() * 2);
    for (std::size_t i = 0; i < band.pixels.size(); ++i) {
      bytes[2 * i] = static_cast<std::uint8_t>(band.pixels[i] & 0xFF);
      bytes[2 * i + 1] = static_cast<std::uint8_t>(band.pixels[i] >> 8);
    }
    write_file_atomic(base / file, bytes);
    doc["bands"].push_back({{"id", band.spec.id},
                            {"wavelength_nm", band.spec.wavelength_nm},
                            {"native_gsd_m", band.spec.native_gsd_m},
                            {"rows", band.rows},
                            {"cols", band.cols},
                            {"file", file},
                            {"dtype", "u16le"}});
  }
  write_file_atomic(manifest_path, doc.dump(2) + "\n");
}

Band import_pgm_band(const fs::path& path, const BandSpec& spec)
{
  PgmImage img = read_pgm(path);
  return Band{spec, img.rows, img.cols, std::move(img.samples)};
}

void write_mask(const LabelMask& mask, const fs::path& path)
{
  const std::string header = pgm_header(mask.rows, mask.cols, 255);
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(header.size() + mask.labels.size());
  for (auto v : mask.labels) bytes.push_back(v ? 255 : 0);
  write_file_atomic(path, bytes);
}

LabelMask read_mask(const fs::path& path)
{
  const PgmImage img = read_pgm(path);
  if (img.maxval != 255) throw Error(path.string() + ": mask must be an 8-bit PGM");
  std::vector<std::uint8_t> labels(img.samples.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto v = img.samples[i];
    if (v != 0 && v != 1 && v != 255) throw Error(path.string() + ": mask samples must be 0 or 255");
    labels[i] = v ? 1 : 0;
  }
  return LabelMask(img.rows, img.cols, std::move(labels));
}

fs::path sidecar_path(const fs::path& path)
{
  fs::path out = path;
  out += ".json";
  return out;
}

void write_float_raster(const FloatGrid& grid, const fs::path& path)
{
  if (grid.values.size() != grid.rows * grid.cols) throw Error("float raster size does not match rows*cols");
  std::vector<std::uint8_t> bytes(grid.values.size() * 4);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (!std::isfinite(grid.values[i])) throw Error("float raster contains a non-finite value");
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(grid.values[i]));
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  const json meta = {{"rows", grid.rows}, {"cols", grid.cols}};
  write_file_atomic(path, bytes);
  write_file_atomic(sidecar_path(path), meta.dump() + "\n");
}

FloatGrid read_float_raster(const fs::path& path)
{
  json meta;
  {
    std::ifstream in(sidecar_path(path));
    if (!in) throw Error("missing float raster sidecar " + sidecar_path(path).string());
    try {
      in >> meta;
    } catch (const json::exception& e) {
      throw Error("malformed float raster sidecar: " + std::string(e.what()));
    }
  }
  FloatGrid grid;
  grid.rows = required<std::size_t>(meta, "rows", "float raster sidecar");
  grid.cols = required<std::size_t>(meta, "cols", "float raster sidecar");
  const auto bytes = read_file_bytes(path);
  if (bytes.size() != grid.rows * grid.cols * 4) throw Error(path.string() + ": payload size does not match sidecar");
  grid.values.resize(grid.rows * grid.cols);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    grid.values[i] = std::bit_cast<float>(bits);
  }
  return grid;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes)
{
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot write " + path.string() + ": " + ec.message());
  }
}

void write_file_atomic(const fs::path& path, const std::string& text)
{
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace litterscan
