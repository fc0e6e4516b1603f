// Copyright 2026 The vcrop Authors.
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

#include "vcrop/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "vcrop/errors.hpp"

namespace vcrop {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

enum class Format { kPng, kJpeg };

Format sniff(std::FILE* f, const std::filesystem::path& path) {
  std::array<unsigned char, 8> sig{};
  const auto n = std::fread(sig.data(), 1, sig.size(), f);
  std::rewind(f);
  if (n >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return Format::kPng;
  if (n >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) {
    return Format::kJpeg;
  }
  throw FormatError(path.string() + " is neither PNG nor JPEG");
}

ImageTensor from_rgb8(int w, int h, const std::vector<unsigned char>& rgb) {
  std::array<std::vector<float>, 3> planes;
  const auto n = static_cast<std::size_t>(w) * h;
  for (auto& p : planes) p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) planes[c][i] = rgb[i * 3 + c] / 255.f;
  }
  return ImageTensor(w, h, std::move(planes));
}

std::vector<unsigned char> to_rgb8(const ImageTensor& img) {
  const auto n = static_cast<std::size_t>(img.width()) * img.height();
  std::vector<unsigned char> rgb(n * 3);
  for (int c = 0; c < 3; ++c) {
    const auto p = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      rgb[i * 3 + c] = static_cast<unsigned char>(
          std::lround(std::clamp(p[i], 0.f, 1.f) * 255.f));
    }
  }
  return rgb;
}

// ---------------------------------------------------------------- PNG

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

ImageTensor read_png(std::FILE* f, const std::filesystem::path& path,
                     bool header_only, ImageSize* size) {
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_fn, png_warning_fn);
  if (!png) throw FormatError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<unsigned char> rgb;
  std::vector<png_bytep> rows;
  png_uint_32 w = 0, h = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("PNG decode failed for " + path.string() + ": " + err);
  }
  png_init_io(png, f);
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);
  if (header_only) {
    size->width = static_cast<int>(w);
    size->height = static_cast<int>(h);
    png_destroy_read_struct(&png, &info, nullptr);
    return {};
  }
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if ((color & PNG_COLOR_MASK_COLOR) == 0) {
    if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  rgb.resize(static_cast<std::size_t>(w) * h * 3);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = rgb.data() + y * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_rgb8(static_cast<int>(w), static_cast<int>(h), rgb);
}

void write_png(const ImageTensor& img, std::FILE* f,
               const std::filesystem::path& path) {
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            png_error_fn, png_warning_fn);
  if (!png) throw FormatError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  const auto rgb = to_rgb8(img);
  std::vector<png_bytep> rows(img.height());
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode failed for " + path.string() + ": " + err);
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height(); ++y) {
    rows[y] = const_cast<png_bytep>(rgb.data()) +
              static_cast<std::size_t>(y) * img.width() * 3;
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// --------------------------------------------------------------- JPEG

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

ImageTensor read_jpeg(std::FILE* f, const std::filesystem::path& path,
                      bool header_only, ImageSize* size) {
  jpeg_decompress_struct cinfo{};
  JpegError jerr{};
  cinfo.err = jpeg_std_error(&jerr.mgr);
  jerr.mgr.error_exit = jpeg_error_exit;
  std::vector<unsigned char> rgb;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw FormatError("JPEG decode failed for " + path.string() + ": " +
                      jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  if (header_only) {
    size->width = static_cast<int>(cinfo.image_width);
    size->height = static_cast<int>(cinfo.image_height);
    jpeg_destroy_decompress(&cinfo);
    return {};
  }
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const auto w = cinfo.output_width, h = cinfo.output_height;
  rgb.resize(static_cast<std::size_t>(w) * h * 3);
  while (cinfo.output_scanline < h) {
    JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_rgb8(static_cast<int>(w), static_cast<int>(h), rgb);
}

void write_jpeg(const ImageTensor& img, std::FILE* f,
                const std::filesystem::path& path, int quality) {
  jpeg_compress_struct cinfo{};
  JpegError jerr{};
  cinfo.err = jpeg_std_error(&jerr.mgr);
  jerr.mgr.error_exit = jpeg_error_exit;
  const auto rgb = to_rgb8(img);
  if (setjmp(jerr.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw IoError("JPEG encode failed for " + path.string() + ": " +
                  jerr.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(rgb.data()) +
                   static_cast<std::size_t>(cinfo.next_scanline) * img.width() * 3;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

bool is_jpeg_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

ImageTensor read_image(const std::filesystem::path& path) {
  auto f = open_file(path, "rb");
  switch (sniff(f.get(), path)) {
    case Format::kPng:
      return read_png(f.get(), path, false, nullptr);
    case Format::kJpeg:
      return read_jpeg(f.get(), path, false, nullptr);
  }
  throw FormatError("unreachable");
}

ImageSize probe_image_size(const std::filesystem::path& path) {
  auto f = open_file(path, "rb");
  ImageSize size;
  switch (sniff(f.get(), path)) {
    case Format::kPng:
      read_png(f.get(), path, true, &size);
      break;
    case Format::kJpeg:
      read_jpeg(f.get(), path, true, &size);
      break;
  }
  return size;
}

void write_image(const ImageTensor& img, const std::filesystem::path& path,
                 int jpeg_quality) {
  auto f = open_file(path, "wb");
  if (is_jpeg_extension(path)) {
    write_jpeg(img, f.get(), path, jpeg_quality);
  } else {
    write_png(img, f.get(), path);
  }
  if (std::fflush(f.get()) != 0) throw IoError("short write to " + path.string());
}

}  // namespace vcrop
