#pragma once

// Raster containers and the file formats the pipeline accepts:
//   mask        8-bit grayscale PNG or PGM (nonzero = object)
//   rgb         8-bit color PNG or PPM
//   depth/conf  PFM (Pf, little-endian) or raw float32 + JSON sidecar
// plus PGM/PPM/PFM writers used by the synthetic-scene generator.

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegrasp/errors.hpp"

namespace shapegrasp {

template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  bool empty() const { return data.empty(); }
  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::size_t size() const { return data.size(); }
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

using MaskImage = Image<std::uint8_t>;
using RgbImage = Image<Rgb>;
using FloatImage = Image<float>;

namespace io {

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileFormatError("cannot open file: " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::string& path, const void* data, std::size_t n) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FileFormatError("cannot open file for writing: " + path);
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!f) throw FileFormatError("short write: " + path);
}

inline std::string read_file_text(const std::string& path) {
  auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

inline void write_file_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, text.data(), text.size());
}

inline std::string lower_ext(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// ---- PNM (PGM/PPM) ----

namespace detail {

inline int pnm_next_int(const std::vector<std::uint8_t>& b, std::size_t& pos, const std::string& path) {
  while (pos < b.size()) {
    if (std::isspace(b[pos])) {
      ++pos;
    } else if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size() || !std::isdigit(b[pos])) throw FileFormatError("bad PNM header: " + path);
  int v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) v = v * 10 + (b[pos++] - '0');
  return v;
}

}  // namespace detail

// P2/P5 grayscale. Values are clamped to 8 bits; maxval must be <= 255.
inline MaskImage read_pgm(const std::string& path) {
  auto b = read_file_bytes(path);
  if (b.size() < 2 || b[0] != 'P' || (b[1] != '5' && b[1] != '2'))
    throw FileFormatError("not a PGM file: " + path);
  bool binary = b[1] == '5';
  std::size_t pos = 2;
  int w = detail::pnm_next_int(b, pos, path);
  int h = detail::pnm_next_int(b, pos, path);
  int maxval = detail::pnm_next_int(b, pos, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw FileFormatError("unsupported PGM header: " + path);
  MaskImage img(w, h);
  if (binary) {
    ++pos;  // single whitespace after maxval
    if (b.size() - pos < img.size()) throw FileFormatError("truncated PGM: " + path);
    std::memcpy(img.data.data(), b.data() + pos, img.size());
  } else {
    for (auto& px : img.data) px = static_cast<std::uint8_t>(detail::pnm_next_int(b, pos, path));
  }
  return img;
}

// P3/P6 color.
inline RgbImage read_ppm(const std::string& path) {
  auto b = read_file_bytes(path);
  if (b.size() < 2 || b[0] != 'P' || (b[1] != '6' && b[1] != '3'))
    throw FileFormatError("not a PPM file: " + path);
  bool binary = b[1] == '6';
  std::size_t pos = 2;
  int w = detail::pnm_next_int(b, pos, path);
  int h = detail::pnm_next_int(b, pos, path);
  int maxval = detail::pnm_next_int(b, pos, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw FileFormatError("unsupported PPM header: " + path);
  RgbImage img(w, h);
  if (binary) {
    ++pos;
    if (b.size() - pos < img.size() * 3) throw FileFormatError("truncated PPM: " + path);
    for (std::size_t i = 0; i < img.size(); ++i)
      img.data[i] = {b[pos + 3 * i], b[pos + 3 * i + 1], b[pos + 3 * i + 2]};
  } else {
    for (auto& px : img.data) {
      px.r = static_cast<std::uint8_t>(detail::pnm_next_int(b, pos, path));
      px.g = static_cast<std::uint8_t>(detail::pnm_next_int(b, pos, path));
      px.b = static_cast<std::uint8_t>(detail::pnm_next_int(b, pos, path));
    }
  }
  return img;
}

inline void write_pgm(const std::string& path, const MaskImage& img) {
  std::ostringstream head;
  head << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::string h = head.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  write_file_bytes(path, out.data(), out.size());
}

inline void write_ppm(const std::string& path, const RgbImage& img) {
  std::ostringstream head;
  head << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::string h = head.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.reserve(out.size() + img.size() * 3);
  for (const Rgb& px : img.data) {
    out.push_back(px.r);
    out.push_back(px.g);
    out.push_back(px.b);
  }
  write_file_bytes(path, out.data(), out.size());
}

// ---- PNG (reader only; 8-bit gray / RGB / RGBA, non-interlaced) ----

namespace detail {

struct PngRaster {
  int width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> pixels;  // channels interleaved, row-major
};

inline std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

inline std::vector<std::uint8_t> zlib_inflate(const std::vector<std::uint8_t>& in, const std::string& path) {
  std::vector<std::uint8_t> out;
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw FileFormatError("zlib init failed: " + path);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::uint8_t buf[1 << 15];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buf;
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw FileFormatError("corrupt PNG (zlib): " + path);
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
  }
  inflateEnd(&zs);
  return out;
}

inline std::uint8_t paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

inline PngRaster read_png_raster(const std::string& path) {
  auto b = read_file_bytes(path);
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (b.size() < 8 || std::memcmp(b.data(), sig, 8) != 0)
    throw FileFormatError("not a PNG file: " + path);

  PngRaster out;
  int bit_depth = 0, color_type = -1, interlace = -1;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  while (pos + 8 <= b.size()) {
    std::uint32_t len = be32(&b[pos]);
    if (pos + 12 + len > b.size()) throw FileFormatError("truncated PNG: " + path);
    std::string type(reinterpret_cast<const char*>(&b[pos + 4]), 4);
    const std::uint8_t* payload = &b[pos + 8];
    if (type == "IHDR") {
      if (len != 13) throw FileFormatError("bad IHDR: " + path);
      out.width = static_cast<int>(be32(payload));
      out.height = static_cast<int>(be32(payload + 4));
      bit_depth = payload[8];
      color_type = payload[9];
      interlace = payload[12];
    } else if (type == "IDAT") {
      idat.insert(idat.end(), payload, payload + len);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + len;
  }
  if (out.width <= 0 || out.height <= 0) throw FileFormatError("bad PNG dimensions: " + path);
  if (bit_depth != 8) throw FileFormatError("unsupported PNG bit depth (need 8): " + path);
  if (interlace != 0) throw FileFormatError("interlaced PNG unsupported: " + path);
  switch (color_type) {
    case 0: out.channels = 1; break;
    case 2: out.channels = 3; break;
    case 4: out.channels = 2; break;
    case 6: out.channels = 4; break;
    default: throw FileFormatError("unsupported PNG color type: " + path);
  }

  auto raw = zlib_inflate(idat, path);
  const std::size_t stride = static_cast<std::size_t>(out.width) * out.channels;
  if (raw.size() < (stride + 1) * out.height) throw FileFormatError("truncated PNG data: " + path);

  out.pixels.resize(stride * out.height);
  const int bpp = out.channels;
  for (int y = 0; y < out.height; ++y) {
    const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
    std::uint8_t filter = src[0];
    ++src;
    std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(y) * stride;
    const std::uint8_t* up = y > 0 ? dst - stride : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      int a = i >= static_cast<std::size_t>(bpp) ? dst[i - bpp] : 0;
      int u = up ? up[i] : 0;
      int c = (up && i >= static_cast<std::size_t>(bpp)) ? up[i - bpp] : 0;
      int x = src[i];
      switch (filter) {
        case 0: dst[i] = static_cast<std::uint8_t>(x); break;
        case 1: dst[i] = static_cast<std::uint8_t>(x + a); break;
        case 2: dst[i] = static_cast<std::uint8_t>(x + u); break;
        case 3: dst[i] = static_cast<std::uint8_t>(x + ((a + u) >> 1)); break;
        case 4: dst[i] = static_cast<std::uint8_t>(x + paeth(a, u, c)); break;
        default: throw FileFormatError("bad PNG filter byte: " + path);
      }
    }
  }
  return out;
}

}  // namespace detail

// Grayscale image from PNG (color type 0) or PGM, chosen by content.
inline MaskImage read_gray(const std::string& path) {
  auto bytes = read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2')) return read_pgm(path);
  auto png = detail::read_png_raster(path);
  if (png.channels != 1 && png.channels != 2)
    throw FileFormatError("mask must be grayscale (got color PNG): " + path);
  MaskImage img(png.width, png.height);
  for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = png.pixels[i * png.channels];
  return img;
}

// Color image from PNG (color types 2/6) or PPM. Grayscale input is rejected;
// the color attribute requires real RGB.
inline RgbImage read_rgb(const std::string& path) {
  auto bytes = read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '3')) return read_ppm(path);
  auto png = detail::read_png_raster(path);
  if (png.channels < 3)
    throw FileFormatError("rgb input must be color, not grayscale: " + path);
  RgbImage img(png.width, png.height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint8_t* px = &png.pixels[i * png.channels];
    img.data[i] = {px[0], px[1], px[2]};
  }
  return img;
}

// ---- PFM and raw float rasters ----

inline FloatImage read_pfm(const std::string& path) {
  auto b = read_file_bytes(path);
  if (b.size() < 2 || b[0] != 'P' || b[1] != 'f')
    throw FileFormatError("not a grayscale PFM file: " + path);
  std::size_t pos = 2;
  auto next_token = [&]() {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    std::string t;
    while (pos < b.size() && !std::isspace(b[pos])) t.push_back(static_cast<char>(b[pos++]));
    if (t.empty()) throw FileFormatError("bad PFM header: " + path);
    return t;
  };
  int w = std::stoi(next_token());
  int h = std::stoi(next_token());
  double scale = std::stod(next_token());
  ++pos;  // single whitespace byte after scale
  if (w <= 0 || h <= 0) throw FileFormatError("bad PFM dimensions: " + path);
  std::size_t need = static_cast<std::size_t>(w) * h * 4;
  if (b.size() - pos < need) throw FileFormatError("truncated PFM: " + path);

  bool little_endian = scale < 0;
  FloatImage img(w, h);
  // PFM stores rows bottom-to-top.
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = b.data() + pos + static_cast<std::size_t>(h - 1 - y) * w * 4;
    for (int x = 0; x < w; ++x) {
      std::uint8_t px[4];
      std::memcpy(px, row + x * 4, 4);
      if (!little_endian) std::swap(px[0], px[3]), std::swap(px[1], px[2]);
      float v;
      std::memcpy(&v, px, 4);
      img.at(x, y) = v;
    }
  }
  return img;
}

inline void write_pfm(const std::string& path, const FloatImage& img) {
  std::ostringstream head;
  head << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
  std::string h = head.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.resize(out.size() + img.size() * 4);
  std::uint8_t* dst = out.data() + h.size();
  for (int y = img.height - 1; y >= 0; --y) {
    std::memcpy(dst, img.data.data() + static_cast<std::size_t>(y) * img.width,
                static_cast<std::size_t>(img.width) * 4);
    dst += static_cast<std::size_t>(img.width) * 4;
  }
  write_file_bytes(path, out.data(), out.size());
}

// Float raster dispatch: .pfm by content/extension, otherwise a headerless
// little-endian float32 file with a sidecar "<path>.json" holding
// {"width": w, "height": h} (row-major, top-down).
inline FloatImage read_float_raster(const std::string& path) {
  auto bytes = read_file_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == 'f') return read_pfm(path);

  std::string sidecar = path + ".json";
  if (!std::filesystem::exists(sidecar)) {
    std::filesystem::path alt(path);
    alt.replace_extension(".json");
    if (std::filesystem::exists(alt)) {
      sidecar = alt.string();
    } else {
      throw FileFormatError("raw float raster needs a sidecar JSON ({width, height}): " + path);
    }
  }
  nlohmann::json meta = nlohmann::json::parse(read_file_text(sidecar));
  int w = meta.at("width").get<int>();
  int h = meta.at("height").get<int>();
  if (w <= 0 || h <= 0) throw FileFormatError("bad sidecar dimensions: " + sidecar);
  if (bytes.size() != static_cast<std::size_t>(w) * h * 4)
    throw FileFormatError("raw float raster size does not match sidecar: " + path);
  FloatImage img(w, h);
  std::memcpy(img.data.data(), bytes.data(), bytes.size());
  return img;
}

}  // namespace io
}  // namespace shapegrasp
