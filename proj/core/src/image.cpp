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

#include "vcrop/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vcrop/errors.hpp"

namespace vcrop {

std::string to_string(const BBox& box) {
  std::ostringstream os;
  os << '[' << box.x0 << ',' << box.y0 << ',' << box.x1 << ',' << box.y1
     << ']';
  return os.str();
}

template <typename T>
Grid<T>::Grid(int width, int height, T fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw InvalidArgument("grid dimensions must be non-negative");
  }
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

template <typename T>
Grid<T>::Grid(int width, int height, std::vector<T> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 0 || height < 0 ||
      values_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("grid value count does not match " +
                          std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

template class Grid<float>;
template class Grid<std::uint8_t>;

ImageTensor::ImageTensor(int width, int height)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be >= 1");
  }
  for (auto& p : planes_) p.assign(static_cast<std::size_t>(width) * height, 0.f);
}

ImageTensor::ImageTensor(int width, int height,
                         std::array<std::vector<float>, 3> planes)
    : width_(width), height_(height), planes_(std::move(planes)) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be >= 1");
  }
  const auto n = static_cast<std::size_t>(width) * height;
  for (const auto& p : planes_) {
    if (p.size() != n) throw InvalidArgument("image plane has wrong size");
    for (float v : p) {
      if (!(v >= 0.f && v <= 1.f)) {
        throw InvalidArgument("image values must lie in [0,1]");
      }
    }
  }
}

double default_sigma(int kernel_size) {
  return 0.3 * ((kernel_size - 1) * 0.5 - 1) + 0.8;
}

std::vector<double> gaussian_kernel(int kernel_size, double sigma) {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw InvalidArgument("kernel size must be a positive odd integer, got " +
                          std::to_string(kernel_size));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("sigma must be positive");
  }
  const int radius = kernel_size / 2;
  std::vector<double> taps(kernel_size);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double t = std::exp(-(i * i) / (2.0 * sigma * sigma));
    taps[i + radius] = t;
    sum += t;
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

namespace {

// Horizontal then vertical pass, edge replication, double accumulators.
std::vector<float> blur_plane(std::span<const float> src, int w, int h,
                              const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size()) / 2;
  std::vector<double> tmp(src.size());
  for (int y = 0; y < h; ++y) {
    const float* row = src.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int sx = std::clamp(x + k, 0, w - 1);
        acc += taps[k + radius] * row[sx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  std::vector<float> out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int sy = std::clamp(y + k, 0, h - 1);
        acc += taps[k + radius] * tmp[static_cast<std::size_t>(sy) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace

ImageTensor gaussian_blur(const ImageTensor& img, int kernel_size,
                          double sigma) {
  const auto taps = gaussian_kernel(kernel_size, sigma);
  std::array<std::vector<float>, 3> planes;
  for (int c = 0; c < 3; ++c) {
    planes[c] = blur_plane(img.plane(c), img.width(), img.height(), taps);
    // Unit-sum kernel keeps values in range up to float rounding.
    for (auto& v : planes[c]) v = std::clamp(v, 0.f, 1.f);
  }
  return ImageTensor(img.width(), img.height(), std::move(planes));
}

GrayPlane gaussian_blur(const GrayPlane& plane, int kernel_size,
                        double sigma) {
  const auto taps = gaussian_kernel(kernel_size, sigma);
  return GrayPlane(plane.width(), plane.height(),
                   blur_plane(plane.values(), plane.width(), plane.height(),
                              taps));
}

GrayPlane to_luminance(const ImageTensor& img) {
  GrayPlane gray(img.width(), img.height());
  auto out = gray.values();
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  }
  return gray;
}

float percentile_value(std::span<const float> values, double p) {
  if (values.empty()) throw InvalidArgument("percentile of an empty list");
  if (!(p >= 0.0 && p <= 100.0)) {
    throw InvalidArgument("percentile must lie in [0,100]");
  }
  const auto n = values.size();
  // p * n is exact for the integral percents used in practice.
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::vector<float> work(values.begin(), values.end());
  auto nth = work.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(work.begin(), nth, work.end());
  return *nth;
}

ImageTensor crop_image(const ImageTensor& img, const BBox& box) {
  if (!box.valid_within(img.width(), img.height())) {
    throw InvalidArgument("crop box " + to_string(box) +
                          " is outside the image");
  }
  const int w = box.width(), h = box.height();
  std::array<std::vector<float>, 3> planes;
  for (int c = 0; c < 3; ++c) {
    planes[c].resize(static_cast<std::size_t>(w) * h);
    const auto src = img.plane(c);
    for (int y = 0; y < h; ++y) {
      const auto* row =
          src.data() + static_cast<std::size_t>(box.y0 + y) * img.width() + box.x0;
      std::copy(row, row + w, planes[c].begin() + static_cast<std::ptrdiff_t>(y) * w);
    }
  }
  return ImageTensor(w, h, std::move(planes));
}

SaliencyMap minmax_normalize(const SaliencyMap& map) {
  SaliencyMap out(map.width(), map.height());
  const auto in = map.values();
  if (in.empty()) return out;
  const auto [lo, hi] = std::minmax_element(in.begin(), in.end());
  const float mn = *lo, mx = *hi;
  if (!(mx > mn)) return out;
  const double range = static_cast<double>(mx) - mn;
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    dst[i] = static_cast<float>((in[i] - static_cast<double>(mn)) / range);
  }
  return out;
}

}  // namespace vcrop
