#include "gpm/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "image codecs assume a little-endian host");

namespace gpm {

namespace {

// TIFF tag ids / types used below.
enum : std::uint16_t {
  kTagWidth = 256,
  kTagLength = 257,
  kTagBitsPerSample = 258,
  kTagCompression = 259,
  kTagPhotometric = 262,
  kTagDescription = 270,
  kTagStripOffsets = 273,
  kTagSamplesPerPixel = 277,
  kTagRowsPerStrip = 278,
  kTagStripByteCounts = 279,
  kTagXResolution = 282,
  kTagYResolution = 283,
  kTagResolutionUnit = 296,
  kTagSampleFormat = 339,
};
enum : std::uint16_t { kTypeAscii = 2, kTypeShort = 3, kTypeLong = 4, kTypeRational = 5 };

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(char(v & 0xff));
  b.push_back(char(v >> 8));
}
void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(char((v >> (8 * i)) & 0xff));
}

struct Entry {
  std::uint16_t tag, type;
  std::uint32_t count, value;
};

void append_entry(std::string& b, const Entry& e) {
  put_u16(b, e.tag);
  put_u16(b, e.type);
  put_u32(b, e.count);
  put_u32(b, e.value);
}

std::pair<std::uint32_t, std::uint32_t> rational_of(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return {0, 1};
  if (v >= 4.0e3) return {std::uint32_t(std::llround(std::min(v, 4.0e9))), 1u};
  return {std::uint32_t(std::llround(v * 1e6)), 1000000u};
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char c) { return std::tolower(c); });
  return tail == suffix;
}

void write_tiff_f32(const std::string& path, const RealImage& image) {
  image.validate("tiff image");
  const std::uint32_t w = image.width, h = image.height;
  const std::uint32_t data_bytes = w * h * 4;

  std::string desc = "pixel_m=" + format_double(image.pixel_m);
  desc.push_back('\0');
  if (desc.size() & 1) desc.push_back('\0');

  const auto res = rational_of(1.0 / (image.pixel_m * 100.0));  // samples per cm

  const std::uint16_t ntags = 14;
  const std::uint32_t ifd_off = 8;
  const std::uint32_t ifd_bytes = 2 + ntags * 12 + 4;
  const std::uint32_t desc_off = ifd_off + ifd_bytes;
  const std::uint32_t xres_off = desc_off + std::uint32_t(desc.size());
  const std::uint32_t yres_off = xres_off + 8;
  std::uint32_t data_off = yres_off + 8;
  if (data_off & 3) data_off += 4 - (data_off & 3);

  std::string out;
  out.reserve(data_off + data_bytes);
  out += "II";
  put_u16(out, 42);
  put_u32(out, ifd_off);

  put_u16(out, ntags);
  append_entry(out, {kTagWidth, kTypeLong, 1, w});
  append_entry(out, {kTagLength, kTypeLong, 1, h});
  append_entry(out, {kTagBitsPerSample, kTypeShort, 1, 32});
  append_entry(out, {kTagCompression, kTypeShort, 1, 1});
  append_entry(out, {kTagPhotometric, kTypeShort, 1, 1});
  append_entry(out, {kTagDescription, kTypeAscii, std::uint32_t(desc.size()), desc_off});
  append_entry(out, {kTagStripOffsets, kTypeLong, 1, data_off});
  append_entry(out, {kTagSamplesPerPixel, kTypeShort, 1, 1});
  append_entry(out, {kTagRowsPerStrip, kTypeLong, 1, h});
  append_entry(out, {kTagStripByteCounts, kTypeLong, 1, data_bytes});
  append_entry(out, {kTagXResolution, kTypeRational, 1, xres_off});
  append_entry(out, {kTagYResolution, kTypeRational, 1, yres_off});
  append_entry(out, {kTagResolutionUnit, kTypeShort, 1, 3});
  append_entry(out, {kTagSampleFormat, kTypeShort, 1, 3});
  put_u32(out, 0);  // no further IFD

  out += desc;
  put_u32(out, res.first);
  put_u32(out, res.second);
  put_u32(out, res.first);
  put_u32(out, res.second);
  while (out.size() < data_off) out.push_back('\0');

  std::vector<float> pixels(image.samples.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = float(image.samples[i]);
  out.append(reinterpret_cast<const char*>(pixels.data()), data_bytes);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw IoError("short write: " + path);
}

namespace {

struct TiffReader {
  std::string bytes;
  std::uint32_t u16(std::size_t off) const {
    if (off + 2 > bytes.size()) throw IoError("tiff: truncated file");
    return std::uint8_t(bytes[off]) | (std::uint8_t(bytes[off + 1]) << 8);
  }
  std::uint32_t u32(std::size_t off) const {
    if (off + 4 > bytes.size()) throw IoError("tiff: truncated file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | std::uint8_t(bytes[off + i]);
    return v;
  }
};

}  // namespace

RealImage read_tiff_f32(const std::string& path, double pixel_m_override) {
  TiffReader r;
  {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    r.bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  }
  if (r.bytes.size() < 8) throw IoError("tiff: truncated file: " + path);
  if (r.bytes[0] == 'M' && r.bytes[1] == 'M')
    throw IoError("tiff: big-endian files are not supported: " + path);
  if (!(r.bytes[0] == 'I' && r.bytes[1] == 'I' && r.u16(2) == 42))
    throw IoError("tiff: bad magic: " + path);

  const std::uint32_t ifd = r.u32(4);
  const std::uint32_t ntags = r.u16(ifd);

  std::uint32_t width = 0, height = 0, bits = 0, compression = 1, spp = 1, fmt = 0;
  std::uint32_t rows_per_strip = 0xffffffffu;
  std::vector<std::uint32_t> strip_offsets, strip_counts;
  std::string description;
  double res_x = 0.0;
  std::uint32_t res_unit = 2;

  auto read_array = [&](std::uint16_t type, std::uint32_t count, std::size_t entry_off,
                        std::vector<std::uint32_t>& out) {
    const std::size_t elem = (type == kTypeShort) ? 2 : 4;
    const std::size_t total = elem * count;
    std::size_t src = (total <= 4) ? entry_off + 8 : r.u32(entry_off + 8);
    for (std::uint32_t i = 0; i < count; ++i)
      out.push_back(type == kTypeShort ? r.u16(src + 2 * i) : r.u32(src + 4 * i));
  };

  for (std::uint32_t t = 0; t < ntags; ++t) {
    const std::size_t off = ifd + 2 + t * 12;
    const std::uint16_t tag = std::uint16_t(r.u16(off));
    const std::uint16_t type = std::uint16_t(r.u16(off + 2));
    const std::uint32_t count = r.u32(off + 4);
    auto scalar = [&]() -> std::uint32_t {
      return type == kTypeShort ? r.u16(off + 8) : r.u32(off + 8);
    };
    switch (tag) {
      case kTagWidth: width = scalar(); break;
      case kTagLength: height = scalar(); break;
      case kTagBitsPerSample: bits = scalar(); break;
      case kTagCompression: compression = scalar(); break;
      case kTagSamplesPerPixel: spp = scalar(); break;
      case kTagRowsPerStrip: rows_per_strip = scalar(); break;
      case kTagSampleFormat: fmt = scalar(); break;
      case kTagStripOffsets: read_array(type, count, off, strip_offsets); break;
      case kTagStripByteCounts: read_array(type, count, off, strip_counts); break;
      case kTagDescription: {
        const std::size_t src = (count <= 4) ? off + 8 : r.u32(off + 8);
        if (src + count > r.bytes.size()) throw IoError("tiff: truncated description");
        description.assign(r.bytes, src, count);
        break;
      }
      case kTagXResolution: {
        if (type == kTypeRational) {
          const std::size_t src = r.u32(off + 8);
          const std::uint32_t num = r.u32(src), den = r.u32(src + 4);
          if (den) res_x = double(num) / double(den);
        }
        break;
      }
      case kTagResolutionUnit: res_unit = scalar(); break;
      default: break;  // ignore unknown tags
    }
  }

  if (compression != 1) throw IoError("tiff: only uncompressed data is supported: " + path);
  if (bits != 32 || fmt != 3 || spp != 1)
    throw IoError("tiff: expected single-channel 32-bit float samples: " + path);
  if (width < 2 || height < 2 || std::uint64_t(width) * height > (1ull << 28))
    throw IoError("tiff: unreasonable dims: " + path);
  if (strip_offsets.empty() || strip_offsets.size() != strip_counts.size())
    throw IoError("tiff: missing strip layout: " + path);

  std::vector<float> pixels(std::size_t(width) * height);
  std::size_t filled = 0;
  for (std::size_t s = 0; s < strip_offsets.size(); ++s) {
    const std::size_t n = strip_counts[s];
    if (n % 4) throw IoError("tiff: strip byte count not a multiple of 4: " + path);
    if (strip_offsets[s] + n > r.bytes.size()) throw IoError("tiff: truncated strip: " + path);
    if (filled * 4 + n > pixels.size() * 4) throw IoError("tiff: strips exceed image: " + path);
    std::memcpy(pixels.data() + filled, r.bytes.data() + strip_offsets[s], n);
    filled += n / 4;
  }
  if (filled != pixels.size()) throw IoError("tiff: strips do not cover image: " + path);
  (void)rows_per_strip;

  double pixel_m = 0.0;
  const auto pos = description.find("pixel_m=");
  if (pos != std::string::npos) pixel_m = std::strtod(description.c_str() + pos + 8, nullptr);
  if (!(pixel_m > 0.0) && res_x > 0.0 && res_unit == 3) pixel_m = 0.01 / res_x;  // per cm
  if (!(pixel_m > 0.0) && res_x > 0.0 && res_unit == 2) pixel_m = 0.0254 / res_x;
  if (pixel_m_override > 0.0) pixel_m = pixel_m_override;
  if (!(pixel_m > 0.0))
    throw IoError("tiff: no pixel size in file; pass it explicitly: " + path);

  RealImage img = RealImage::zeros(int(width), int(height), pixel_m);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (!std::isfinite(pixels[i])) throw IoError("tiff: non-finite sample: " + path);
    img.samples[i] = double(pixels[i]);
  }
  return img;
}

void write_raw_f32(const std::string& path, const RealImage& image) {
  image.validate("raw image");
  std::vector<float> pixels(image.samples.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = float(image.samples[i]);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(pixels.data()), std::streamsize(pixels.size() * 4));
  if (!f) throw IoError("short write: " + path);
}

RealImage read_raw_f32(const std::string& path, int width, int height, double pixel_m) {
  if (width < 2 || height < 2) throw ParameterError("raw read: dims must be >= 2");
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw IoError("cannot open: " + path);
  const std::streamoff size = f.tellg();
  const std::streamoff expect = std::streamoff(width) * height * 4;
  if (size != expect)
    throw IoError("raw size mismatch: " + path + " holds " + std::to_string(size) +
                  " bytes, dims need " + std::to_string(expect));
  f.seekg(0);
  std::vector<float> pixels(std::size_t(width) * height);
  f.read(reinterpret_cast<char*>(pixels.data()), expect);
  if (!f) throw IoError("short read: " + path);
  RealImage img = RealImage::zeros(width, height, pixel_m);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (!std::isfinite(pixels[i])) throw IoError("raw: non-finite sample: " + path);
    img.samples[i] = double(pixels[i]);
  }
  return img;
}

void write_image(const std::string& path, const RealImage& image) {
  if (has_suffix(path, ".tif") || has_suffix(path, ".tiff")) return write_tiff_f32(path, image);
  if (has_suffix(path, ".raw")) return write_raw_f32(path, image);
  throw IoError("unknown image extension (use .tif/.tiff/.raw): " + path);
}

RealImage read_image(const std::string& path, int raw_width, int raw_height, double pixel_m) {
  if (has_suffix(path, ".tif") || has_suffix(path, ".tiff")) return read_tiff_f32(path, pixel_m);
  if (has_suffix(path, ".raw")) {
    if (raw_width < 2 || raw_height < 2)
      throw ParameterError("raw input needs explicit --width/--height");
    if (!(pixel_m > 0.0)) throw ParameterError("raw input needs an explicit pixel size");
    return read_raw_f32(path, raw_width, raw_height, pixel_m);
  }
  throw IoError("unknown image extension (use .tif/.tiff/.raw): " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    f << (i ? "," : "") << header[i];
  f << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ParameterError("csv row width != header width");
    for (std::size_t i = 0; i < row.size(); ++i)
      f << (i ? "," : "") << format_double(row[i]);
    f << "\n";
  }
  if (!f) throw IoError("short write: " + path);
}

}  // namespace gpm
