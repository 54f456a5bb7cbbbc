// Copyright (c) 2026, The grayanchor Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "grayanchor/imageio.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "grayanchor/error.hpp"

namespace grayanchor {

namespace {

struct RawImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> rgb;  // interleaved
};

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

// libpng reports errors by longjmp back to the setjmp below. Every C++
// object in this frame is constructed before it.
RawImage decode_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw DecodeError("cannot open " + path.string() + ": " + std::strerror(errno));

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("libpng initialisation failed");
  }
  RawImage raw;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("corrupt PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
    depth = 8;
  }
  if ((color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    depth = 8;
  }
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.bit_depth = depth;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * raw.height);
  rows.resize(raw.height);
  for (int y = 0; y < raw.height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (depth != 8 && depth != 16) throw DecodeError("unsupported PNG bit depth");
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height * 3;
  if (rowbytes < static_cast<std::size_t>(raw.width) * 3 * (depth / 8))
    throw DecodeError("unexpected PNG row layout");
  raw.rgb.resize(n);
  for (int y = 0; y < raw.height; ++y) {
    const png_byte* row = rows[y];
    for (int i = 0; i < raw.width * 3; ++i) {
      raw.rgb[static_cast<std::size_t>(y) * raw.width * 3 + i] =
          depth == 16 ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1]) : row[i];
    }
  }
  return raw;
}

struct TiffCloser {
  void operator()(TIFF* t) const noexcept {
    if (t) TIFFClose(t);
  }
};

RawImage decode_tiff(const std::filesystem::path& path) {
  TIFFSetErrorHandler(nullptr);
  TIFFSetWarningHandler(nullptr);
  std::unique_ptr<TIFF, TiffCloser> tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) throw DecodeError("cannot read " + path.string() + " as PNG or TIFF");
  std::uint32_t w = 0, h = 0;
  std::uint16_t bps = 0, spp = 0, compression = 0, planar = PLANARCONFIG_CONTIG;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_COMPRESSION, &compression);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  if (compression != COMPRESSION_NONE) throw DecodeError("compressed TIFF is not supported");
  if (bps != 8 && bps != 16) throw DecodeError("TIFF must be 8 or 16 bits per sample");
  if (spp < 3) throw DecodeError("TIFF must have at least three samples per pixel");
  if (planar != PLANARCONFIG_CONTIG) throw DecodeError("planar TIFF layout is not supported");

  RawImage raw;
  raw.width = static_cast<int>(w);
  raw.height = static_cast<int>(h);
  raw.bit_depth = bps;
  raw.rgb.resize(static_cast<std::size_t>(w) * h * 3);
  std::vector<unsigned char> line(TIFFScanlineSize(tif.get()));
  for (std::uint32_t y = 0; y < h; ++y) {
    if (TIFFReadScanline(tif.get(), line.data(), y, 0) < 0)
      throw DecodeError("truncated TIFF " + path.string());
    for (std::uint32_t x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const std::size_t s = static_cast<std::size_t>(x) * spp + c;
        std::uint16_t v;
        if (bps == 16)
          std::memcpy(&v, line.data() + 2 * s, 2);  // libtiff returns host order
        else
          v = line[s];
        raw.rgb[(static_cast<std::size_t>(y) * w + x) * 3 + c] = v;
      }
  }
  return raw;
}

std::uint16_t quantize(double v, double max_code) {
  return static_cast<std::uint16_t>(std::clamp(std::nearbyint(v), 0.0, max_code));
}

void check_bit_depth(int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw InputError("bit depth must be 8 or 16");
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

double parse_number(const std::string& text, const char* what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ManifestError(std::string("bad ") + what + " value '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::filesystem::path Dataset::resolve(std::size_t i) const {
  const std::filesystem::path p(entries.at(i).image_path);
  return p.is_absolute() ? p : root / p;
}

LinearImage load_image(const std::filesystem::path& path, double black_level) {
  if (!(black_level >= 0.0)) throw InputError("black level must be non-negative");
  if (!std::filesystem::exists(path)) throw DecodeError("no such file " + path.string());
  const RawImage raw = has_png_signature(path) ? decode_png(path) : decode_tiff(path);
  if (raw.width < kMinImageSide || raw.height < kMinImageSide)
    throw DimensionError(path.string() + " is " + std::to_string(raw.width) + "x" +
                         std::to_string(raw.height) + ", minimum is 16x16");
  const double white = std::ldexp(1.0, raw.bit_depth) - 1.0 - black_level;
  if (!(white > 0.0)) throw InputError("black level exceeds the sample range");

  std::array<Plane, 3> planes{Plane(raw.width, raw.height), Plane(raw.width, raw.height),
                              Plane(raw.width, raw.height)};
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c)
      planes[c][i] = std::max(static_cast<double>(raw.rgb[3 * i + c]) - black_level, 0.0);
  return LinearImage(std::move(planes), white);
}

void save_png(const std::filesystem::path& path, const LinearImage& img, int bit_depth) {
  check_bit_depth(bit_depth);
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
  const int w = img.width(), h = img.height();
  const double max_code = std::ldexp(1.0, bit_depth) - 1.0;
  const std::size_t bpp = 3 * (bit_depth / 8);
  std::vector<png_byte> buffer(static_cast<std::size_t>(w) * h * bpp);
  for (std::size_t i = 0; i < img.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) {
      const std::uint16_t v = quantize(img.channel(c)[i], max_code);
      if (bit_depth == 16) {
        buffer[i * bpp + 2 * c] = static_cast<png_byte>(v >> 8);
        buffer[i * bpp + 2 * c + 1] = static_cast<png_byte>(v & 0xff);
      } else {
        buffer[i * bpp + c] = static_cast<png_byte>(v);
      }
    }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * w * bpp;

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_gray_png16(const std::filesystem::path& path, const Plane& values) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
  const int w = values.width(), h = values.height();
  std::vector<png_byte> buffer(static_cast<std::size_t>(w) * h * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint16_t v = quantize(values[i], 65535.0);
    buffer[2 * i] = static_cast<png_byte>(v >> 8);
    buffer[2 * i + 1] = static_cast<png_byte>(v & 0xff);
  }
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * w * 2;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_tiff(const std::filesystem::path& path, const LinearImage& img, int bit_depth) {
  check_bit_depth(bit_depth);
  std::unique_ptr<TIFF, TiffCloser> tif(TIFFOpen(path.c_str(), "w"));
  if (!tif) throw IoError("cannot write " + path.string());
  const int w = img.width(), h = img.height();
  TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(w));
  TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(h));
  TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, 3);
  TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, bit_depth);
  TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
  TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_RGB);
  TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, 1);
  const double max_code = std::ldexp(1.0, bit_depth) - 1.0;
  std::vector<unsigned char> line(static_cast<std::size_t>(w) * 3 * (bit_depth / 8));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const std::uint16_t v = quantize(img.channel(c)(x, y), max_code);
        const std::size_t s = static_cast<std::size_t>(x) * 3 + c;
        if (bit_depth == 16)
          std::memcpy(line.data() + 2 * s, &v, 2);
        else
          line[s] = static_cast<unsigned char>(v);
      }
    if (TIFFWriteScanline(tif.get(), line.data(), y, 0) < 0)
      throw IoError("failed writing " + path.string());
  }
}

bool polygon_contains(const Polygon& poly, double x, double y) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x)
      inside = !inside;
  }
  return inside;
}

Mask valid_mask(const LinearImage& img, const std::vector<Polygon>& polygons,
                double dark_frac, double sat_frac) {
  if (!(dark_frac >= 0.0 && dark_frac < sat_frac && sat_frac <= 1.0))
    throw InputError("thresholds must satisfy 0 <= dark_frac < sat_frac <= 1");
  for (const auto& poly : polygons)
    if (poly.size() < 3) throw InputError("exclusion polygon needs at least 3 vertices");

  const int w = img.width(), h = img.height();
  const double lo = dark_frac * img.white_level();
  const double hi = sat_frac * img.white_level();
  Mask mask(w, h, false);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto p = img.pixel(x, y);
      const double m = std::max({p[0], p[1], p[2]});
      bool ok = m > lo && m < hi;
      for (std::size_t k = 0; ok && k < polygons.size(); ++k)
        if (polygon_contains(polygons[k], x, y)) ok = false;
      mask.set(x, y, ok);
    }
  return mask;
}

std::vector<Polygon> parse_polygons(const std::string& field) {
  std::vector<Polygon> out;
  const std::string f = trim(field);
  if (f.empty()) return out;
  for (const auto& poly_text : split(f, '|')) {
    Polygon poly;
    for (const auto& vtx : split(poly_text, ';')) {
      const auto xy = split(vtx, ':');
      if (xy.size() != 2) throw ManifestError("bad polygon vertex '" + vtx + "'");
      poly.push_back({parse_number(xy[0], "vertex"), parse_number(xy[1], "vertex")});
    }
    out.push_back(std::move(poly));
  }
  return out;
}

std::string format_polygons(const std::vector<Polygon>& polygons) {
  std::string out;
  for (std::size_t k = 0; k < polygons.size(); ++k) {
    if (k) out += '|';
    for (std::size_t i = 0; i < polygons[k].size(); ++i) {
      if (i) out += ';';
      out += format_double(polygons[k][i].x) + ':' + format_double(polygons[k][i].y);
    }
  }
  return out;
}

Dataset load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open " + path.string());
  Dataset data;
  data.name = path.stem().string();
  data.root = path.parent_path();

  std::string line;
  if (!std::getline(in, line)) throw ManifestError(path.string() + " has no header");
  if (trim(line).rfind("image,er,eg,eb", 0) != 0)
    throw ManifestError("unexpected header '" + trim(line) + "'");

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() < 4 || fields.size() > 5)
      throw ManifestError("line " + std::to_string(lineno) + ": expected 4 or 5 fields");
    const double r = parse_number(fields[1], "er");
    const double g = parse_number(fields[2], "eg");
    const double b = parse_number(fields[3], "eb");
    if (!(r > 0.0 && g > 0.0 && b > 0.0))
      throw ManifestError("line " + std::to_string(lineno) +
                          ": illuminant components must be positive");
    data.entries.push_back(DatasetEntry{
        trim(fields[0]), Illuminant(r, g, b),
        fields.size() == 5 ? parse_polygons(fields[4]) : std::vector<Polygon>{}});
  }
  return data;
}

void save_manifest(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream out;
  out << "image,er,eg,eb,polygons\n";
  for (const auto& e : data.entries) {
    if (e.image_path.find_first_of(",\n") != std::string::npos)
      throw ManifestError("image path may not contain ',' or newlines: " + e.image_path);
    out << e.image_path << ',' << format_double(e.gt[0]) << ',' << format_double(e.gt[1]) << ','
        << format_double(e.gt[2]) << ',' << format_polygons(e.exclusion_polygons) << '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << out.str();
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace grayanchor
