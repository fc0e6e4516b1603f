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

#include "vcrop/gradcrop.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "vcrop/errors.hpp"

namespace vcrop::grad {
namespace {

double mean_of(std::span<const float> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (float v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

void GradConfig::validate() const {
  if (!(k_discard >= 0.0 && k_discard < 50.0)) {
    throw InvalidArgument("k_discard must lie in [0,50)");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw InvalidArgument("kernel_size must be a positive odd integer");
  }
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (patch_size < 1) throw InvalidArgument("patch_size must be >= 1");
  if (!(n_pool > 0.0 && n_pool <= 100.0)) {
    throw InvalidArgument("n_pool must lie in (0,100]");
  }
  if (!(expansion >= 1.0)) throw InvalidArgument("expansion must be >= 1");
  if (connectivity != Connectivity::kFour &&
      connectivity != Connectivity::kEight) {
    throw InvalidArgument("connectivity must be 4 or 8");
  }
  if (max_highlight_iters < 1) {
    throw InvalidArgument("max_highlight_iters must be >= 1");
  }
}

SaliencyMap combine_gradients(const GradientBundle& bundle) {
  bundle.validate();
  SaliencyMap out(bundle.width, bundle.height);
  auto dst = out.values();
  const auto relu = [](float v) { return v > 0.f ? v : 0.f; };
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = relu(bundle.grad_r[i]) + relu(bundle.grad_g[i]) +
             relu(bundle.grad_b[i]);
  }
  return out;
}

SaliencyMap discard_and_normalize(const SaliencyMap& map, double k_discard) {
  if (!(k_discard >= 0.0 && k_discard < 50.0)) {
    throw InvalidArgument("k_discard must lie in [0,50)");
  }
  SaliencyMap out(map.width(), map.height());
  const auto in = map.values();
  if (in.empty()) return out;

  const float lo = percentile_value(in, k_discard);
  const float hi = percentile_value(in, 100.0 - k_discard);

  float mn = hi, mx = lo;
  for (float v : in) {
    if (v >= lo && v <= hi) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  }
  if (!(mx > mn)) return out;

  const double range = static_cast<double>(mx) - mn;
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const float v = in[i];
    if (v >= lo && v <= hi) {
      dst[i] = static_cast<float>((v - static_cast<double>(mn)) / range);
    }
  }
  return out;
}

SaliencyMap highlight(const SaliencyMap& map, int max_iters) {
  SaliencyMap cur = map;
  for (int iter = 0; iter < max_iters; ++iter) {
    auto vals = cur.values();
    const double mean = mean_of(vals);
    const bool any_above = std::any_of(vals.begin(), vals.end(),
                                       [&](float v) { return v > mean; });
    if (!any_above) break;
    bool changed = false;
    for (auto& v : vals) {
      if (v != 0.f && v <= mean) {
        v = 0.f;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return cur;
}

BinaryMask high_pass_mask(const ImageTensor& img, int kernel_size,
                          double sigma) {
  const GrayPlane gray = to_luminance(img);
  const GrayPlane blurred = gaussian_blur(gray, kernel_size, sigma);
  const auto g = gray.values(), b = blurred.values();
  std::vector<double> detail(g.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    detail[i] = static_cast<double>(g[i]) - b[i];
    sum += detail[i];
  }
  const double mean = sum / static_cast<double>(detail.size());
  BinaryMask mask(img.width(), img.height());
  auto m = mask.values();
  for (std::size_t i = 0; i < detail.size(); ++i) {
    m[i] = detail[i] > mean ? 1 : 0;
  }
  return mask;
}

SaliencyMap apply_mask(const SaliencyMap& map, const BinaryMask& mask) {
  if (map.width() != mask.width() || map.height() != mask.height()) {
    throw InvalidArgument("mask dimensions do not match the saliency map");
  }
  SaliencyMap out = map;
  auto dst = out.values();
  const auto m = mask.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (!m[i]) dst[i] = 0.f;
  }
  return out;
}

BinaryPatchGrid token_pool_binarize(const SaliencyMap& map, int patch_size,
                                    double n_pool) {
  if (patch_size < 1) throw InvalidArgument("patch_size must be >= 1");
  if (!(n_pool > 0.0 && n_pool <= 100.0)) {
    throw InvalidArgument("n_pool must lie in (0,100]");
  }
  const int cols = ceil_div(map.width(), patch_size);
  const int rows = ceil_div(map.height(), patch_size);
  std::vector<float> reps(static_cast<std::size_t>(cols) * rows);
  std::vector<float> patch;
  patch.reserve(static_cast<std::size_t>(patch_size) * patch_size);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      patch.clear();
      const int x1 = std::min((c + 1) * patch_size, map.width());
      const int y1 = std::min((r + 1) * patch_size, map.height());
      for (int y = r * patch_size; y < y1; ++y) {
        for (int x = c * patch_size; x < x1; ++x) patch.push_back(map.at(x, y));
      }
      reps[static_cast<std::size_t>(r) * cols + c] =
          percentile_value(patch, 100.0 - n_pool);
    }
  }
  const double mean = mean_of(reps);
  BinaryPatchGrid grid(cols, rows);
  auto cells = grid.values();
  for (std::size_t i = 0; i < reps.size(); ++i) cells[i] = reps[i] > mean;
  return grid;
}

std::vector<Cell> largest_component(const BinaryPatchGrid& grid,
                                    Connectivity connectivity) {
  const int w = grid.width(), h = grid.height();
  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::vector<Cell> best, current;
  std::deque<Cell> queue;
  const bool eight = connectivity == Connectivity::kEight;

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto idx = static_cast<std::size_t>(r) * w + c;
      if (!grid.at(c, r) || seen[idx]) continue;
      current.clear();
      seen[idx] = 1;
      queue.push_back({r, c});
      while (!queue.empty()) {
        const Cell cell = queue.front();
        queue.pop_front();
        current.push_back(cell);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (!eight && dr != 0 && dc != 0) continue;
            const int nr = cell.row + dr, nc = cell.col + dc;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const auto nidx = static_cast<std::size_t>(nr) * w + nc;
            if (!grid.at(nc, nr) || seen[nidx]) continue;
            seen[nidx] = 1;
            queue.push_back({nr, nc});
          }
        }
      }
      // Raster scan finds components by their first cell, so a strict
      // comparison keeps the earliest among equal sizes.
      if (current.size() > best.size()) best.swap(current);
    }
  }
  std::sort(best.begin(), best.end());
  return best;
}

BBox expand_box(const BBox& box, double factor, int img_w, int img_h) {
  if (!(factor >= 1.0)) throw InvalidArgument("expansion must be >= 1");
  const double cx = 0.5 * (box.x0 + box.x1);
  const double cy = 0.5 * (box.y0 + box.y1);
  const double half_w = 0.5 * box.width() * factor;
  const double half_h = 0.5 * box.height() * factor;
  BBox out{static_cast<int>(std::floor(cx - half_w)),
           static_cast<int>(std::floor(cy - half_h)),
           static_cast<int>(std::ceil(cx + half_w)),
           static_cast<int>(std::ceil(cy + half_h))};
  out.x0 = std::clamp(std::min(out.x0, box.x0), 0, img_w);
  out.y0 = std::clamp(std::min(out.y0, box.y0), 0, img_h);
  out.x1 = std::clamp(std::max(out.x1, box.x1), 0, img_w);
  out.y1 = std::clamp(std::max(out.y1, box.y1), 0, img_h);
  return out;
}

BBox component_bbox_expand(const std::vector<Cell>& cells, int patch_size,
                           double expansion, int img_w, int img_h) {
  if (cells.empty()) throw NoRegionError("no salient component");
  if (patch_size < 1) throw InvalidArgument("patch_size must be >= 1");
  int r0 = cells.front().row, r1 = r0, c0 = cells.front().col, c1 = c0;
  for (const auto& cell : cells) {
    r0 = std::min(r0, cell.row);
    r1 = std::max(r1, cell.row);
    c0 = std::min(c0, cell.col);
    c1 = std::max(c1, cell.col);
  }
  const BBox tight{c0 * patch_size, r0 * patch_size,
                   std::min((c1 + 1) * patch_size, img_w),
                   std::min((r1 + 1) * patch_size, img_h)};
  if (!tight.valid_within(img_w, img_h)) {
    throw InvalidArgument("component lies outside the image");
  }
  return expand_box(tight, expansion, img_w, img_h);
}

GradTrace grad_crop_traced(const ImageTensor& img,
                           const GradientBundle& bundle,
                           const GradConfig& cfg) {
  cfg.validate();
  if (img.width() != bundle.width || img.height() != bundle.height) {
    throw InvalidArgument("image is " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()) + " but bundle is " +
                          std::to_string(bundle.width) + "x" +
                          std::to_string(bundle.height));
  }
  GradTrace t;
  t.combined = combine_gradients(bundle);
  t.normalized = discard_and_normalize(t.combined, cfg.k_discard);
  t.highlighted = cfg.enable_highlighting
                      ? highlight(t.normalized, cfg.max_highlight_iters)
                      : t.normalized;
  t.masked = cfg.enable_highpass
                 ? apply_mask(t.highlighted,
                              high_pass_mask(img, cfg.kernel_size, cfg.sigma))
                 : t.highlighted;
  t.grid = token_pool_binarize(t.masked, cfg.patch_size, cfg.n_pool);
  t.component = largest_component(t.grid, cfg.connectivity);
  if (t.component.empty()) {
    t.box = img.full_box();
    t.fell_back = true;
  } else {
    t.box = component_bbox_expand(t.component, cfg.patch_size, cfg.expansion,
                                  img.width(), img.height());
  }
  return t;
}

BBox grad_crop(const ImageTensor& img, const GradientBundle& bundle,
               const GradConfig& cfg) {
  return grad_crop_traced(img, bundle, cfg).box;
}

}  // namespace vcrop::grad
