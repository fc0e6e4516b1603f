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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vcrop {

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * height();
  }

  /// Non-degenerate and inside a width x height image.
  bool valid_within(int img_w, int img_h) const {
    return 0 <= x0 && x0 < x1 && x1 <= img_w && 0 <= y0 && y0 < y1 &&
           y1 <= img_h;
  }
  bool contains(const BBox& o) const {
    return x0 <= o.x0 && y0 <= o.y0 && o.x1 <= x1 && o.y1 <= y1;
  }

  static BBox full(int img_w, int img_h) { return {0, 0, img_w, img_h}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

std::string to_string(const BBox& box);

/// Row-major 2-D array with fixed dimensions. Base for the strong plane
/// types below; not used directly in public signatures.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{});
  Grid(int width, int height, std::vector<T> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  T& at(int x, int y) { return values_[index(x, y)]; }
  const T& at(int x, int y) const { return values_[index(x, y)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool same_shape(const Grid& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

extern template class Grid<float>;
extern template class Grid<std::uint8_t>;

/// Single-channel float plane, e.g. luminance.
struct GrayPlane : Grid<float> {
  using Grid<float>::Grid;
};

/// Non-negative per-pixel relevance score.
struct SaliencyMap : Grid<float> {
  using Grid<float>::Grid;
};

/// Per-pixel {0,1} mask.
struct BinaryMask : Grid<std::uint8_t> {
  using Grid<std::uint8_t>::Grid;
};

/// RGB image with each plane row-major and values in [0,1].
class ImageTensor {
 public:
  ImageTensor() = default;
  /// Black image.
  ImageTensor(int width, int height);
  /// Throws InvalidArgument if a plane has the wrong size or any value
  /// falls outside [0,1].
  ImageTensor(int width, int height, std::array<std::vector<float>, 3> planes);

  int width() const { return width_; }
  int height() const { return height_; }

  std::span<const float> plane(int c) const { return planes_[c]; }
  float at(int c, int x, int y) const {
    return planes_[c][static_cast<std::size_t>(y) * width_ + x];
  }
  void set(int c, int x, int y, float v) {
    planes_[c][static_cast<std::size_t>(y) * width_ + x] = v;
  }

  BBox full_box() const { return BBox::full(width_, height_); }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::array<std::vector<float>, 3> planes_;
};

/// 0.3 * ((k - 1) * 0.5 - 1) + 0.8, the usual sigma for a k-tap kernel.
double default_sigma(int kernel_size);

/// Normalized Gaussian taps at integer offsets -k/2 .. k/2.
std::vector<double> gaussian_kernel(int kernel_size, double sigma);

/// Separable Gaussian blur with edge replication. Throws InvalidArgument
/// for an even or non-positive kernel size or sigma <= 0.
ImageTensor gaussian_blur(const ImageTensor& img, int kernel_size,
                          double sigma);
GrayPlane gaussian_blur(const GrayPlane& plane, int kernel_size, double sigma);

/// 0.299 R + 0.587 G + 0.114 B.
GrayPlane to_luminance(const ImageTensor& img);

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value, with
/// p = 0 giving the minimum. Throws InvalidArgument on empty input or p
/// outside [0, 100].
float percentile_value(std::span<const float> values, double p);

ImageTensor crop_image(const ImageTensor& img, const BBox& box);

/// (v - min) / (max - min); all zeros when the map is constant.
SaliencyMap minmax_normalize(const SaliencyMap& map);

}  // namespace vcrop
