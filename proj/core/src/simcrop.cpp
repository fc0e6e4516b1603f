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

#include "vcrop/simcrop.hpp"

#include <algorithm>
#include <cmath>

#include "vcrop/errors.hpp"

namespace vcrop::sim {
namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

void WindowConfig::validate() const {
  if (patch_size < 1) throw InvalidArgument("patch_size must be >= 1");
  if (window_patches < 1) throw InvalidArgument("window_patches must be >= 1");
  if (stride < 1) throw InvalidArgument("stride must be >= 1");
  if (stride > window_patches) {
    throw InvalidArgument("stride larger than the window leaves patches uncovered");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("threshold must lie in [0,1]");
  }
  if (max_highlight_iters < 1) {
    throw InvalidArgument("max_highlight_iters must be >= 1");
  }
}

void RecursiveConfig::validate() const {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("ratio must lie in (0,1)");
  }
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (min_side < 1) throw InvalidArgument("min_side must be >= 1");
}

PatchGrid::PatchGrid(int cols, int rows)
    : cols_(cols),
      rows_(rows),
      sum_(static_cast<std::size_t>(cols) * rows, 0.0),
      coverage_(static_cast<std::size_t>(cols) * rows, 0u) {
  if (cols < 1 || rows < 1) throw InvalidArgument("empty patch grid");
}

double PatchGrid::mean(int col, int row) const {
  const auto i = index(col, row);
  return coverage_[i] ? sum_[i] / coverage_[i] : 0.0;
}

void PatchGrid::add(int col, int row, double score) {
  const auto i = index(col, row);
  sum_[i] += score;
  ++coverage_[i];
}

std::vector<int> window_positions(int patches, int window_patches,
                                  int stride) {
  if (patches < window_patches) return {0};
  const int last = patches - window_patches;
  std::vector<int> out;
  for (int i = 0; i <= last; i += stride) out.push_back(i);
  if (out.back() != last) out.push_back(last);
  return out;
}

std::vector<BBox> enumerate_windows(int img_w, int img_h,
                                    const WindowConfig& cfg) {
  cfg.validate();
  if (img_w < 1 || img_h < 1) throw InvalidArgument("empty image");
  const int n = cfg.patch_size, w = cfg.window_patches;
  const int cols = ceil_div(img_w, n), rows = ceil_div(img_h, n);
  const auto xs = window_positions(cols, w, cfg.stride);
  const auto ys = window_positions(rows, w, cfg.stride);
  std::vector<BBox> out;
  out.reserve(xs.size() * ys.size());
  for (int j : ys) {
    for (int i : xs) {
      BBox b;
      b.x0 = cols < w ? 0 : i * n;
      b.x1 = cols < w ? img_w : std::min((i + w) * n, img_w);
      b.y0 = rows < w ? 0 : j * n;
      b.y1 = rows < w ? img_h : std::min((j + w) * n, img_h);
      out.push_back(b);
    }
  }
  return out;
}

PatchGrid accumulate_patch_scores(std::span<const BBox> windows,
                                  std::span<const double> scores,
                                  const WindowConfig& cfg, int img_w,
                                  int img_h) {
  cfg.validate();
  if (windows.size() != scores.size()) {
    throw InvalidArgument("got " + std::to_string(scores.size()) +
                          " scores for " + std::to_string(windows.size()) +
                          " windows");
  }
  const int n = cfg.patch_size;
  PatchGrid grid(ceil_div(img_w, n), ceil_div(img_h, n));
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const BBox& win = windows[k];
    if (!win.valid_within(img_w, img_h)) {
      throw InvalidArgument("window " + to_string(win) + " is outside the image");
    }
    // Patch c spans [c*n, min((c+1)*n, W)); it counts when fully inside.
    for (int r = ceil_div(win.y0, n); r < grid.rows(); ++r) {
      if (std::min((r + 1) * n, img_h) > win.y1) break;
      for (int c = ceil_div(win.x0, n); c < grid.cols(); ++c) {
        if (std::min((c + 1) * n, img_w) > win.x1) break;
        grid.add(c, r, scores[k]);
      }
    }
  }
  return grid;
}

grad::BinaryPatchGrid select_patches(const PatchGrid& grid, double threshold,
                                     int max_highlight_iters) {
  SaliencyMap means(grid.cols(), grid.rows());
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      means.at(c, r) = static_cast<float>(grid.mean(c, r));
    }
  }
  const SaliencyMap kept =
      grad::highlight(minmax_normalize(means), max_highlight_iters);
  grad::BinaryPatchGrid selected(grid.cols(), grid.rows());
  const auto src = kept.values();
  auto dst = selected.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] > threshold ? 1 : 0;
  }
  return selected;
}

std::optional<BBox> selection_bbox(const grad::BinaryPatchGrid& selected,
                                   int patch_size, int img_w, int img_h) {
  std::optional<BBox> out;
  for (int r = 0; r < selected.height(); ++r) {
    for (int c = 0; c < selected.width(); ++c) {
      if (!selected.at(c, r)) continue;
      const BBox cell{c * patch_size, r * patch_size,
                      std::min((c + 1) * patch_size, img_w),
                      std::min((r + 1) * patch_size, img_h)};
      if (!out) {
        out = cell;
      } else {
        out->x0 = std::min(out->x0, cell.x0);
        out->y0 = std::min(out->y0, cell.y0);
        out->x1 = std::max(out->x1, cell.x1);
        out->y1 = std::max(out->y1, cell.y1);
      }
    }
  }
  return out;
}

BBox clip_w_crop(const ImageRef& image, const std::string& prompt,
                 Scorer& scorer, const WindowConfig& cfg) {
  const auto windows = enumerate_windows(image.width, image.height, cfg);
  const auto scores = scorer.score(image, windows, prompt);
  const auto grid = accumulate_patch_scores(windows, scores, cfg, image.width,
                                            image.height);
  const auto selected =
      select_patches(grid, cfg.threshold, cfg.max_highlight_iters);
  return selection_bbox(selected, cfg.patch_size, image.width, image.height)
      .value_or(image.full_box());
}

DirectionalCrops directional_crops(const BBox& box, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidArgument("ratio must lie in (0,1)");
  }
  const int h = round_half_up(ratio * box.height());
  const int w = round_half_up(ratio * box.width());
  if (h < 1 || w < 1) {
    throw InvalidArgument("crop of " + to_string(box) + " by " +
                          std::to_string(ratio) + " is degenerate");
  }
  return {
      {box.x0, box.y0, box.x1, box.y0 + h},
      {box.x0, box.y1 - h, box.x1, box.y1},
      {box.x0, box.y0, box.x0 + w, box.y1},
      {box.x1 - w, box.y0, box.x1, box.y1},
  };
}

RecursiveResult clip_r_crop_traced(const ImageRef& image,
                                   const std::string& prompt, Scorer& scorer,
                                   const RecursiveConfig& cfg) {
  cfg.validate();
  RecursiveResult result{image.full_box(), {image.full_box()}};
  for (int t = 0; t < cfg.iterations; ++t) {
    const BBox& cur = result.box;
    const int h = round_half_up(cfg.ratio * cur.height());
    const int w = round_half_up(cfg.ratio * cur.width());
    if (h < cfg.min_side || w < cfg.min_side || h >= cur.height() ||
        w >= cur.width()) {
      break;
    }
    const auto candidates = directional_crops(cur, cfg.ratio).as_array();
    const auto scores = scorer.score(image, candidates, prompt);
    if (scores.size() != candidates.size()) {
      throw TransportError("scorer returned the wrong number of scores");
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
      if (scores[k] > scores[best]) best = k;
    }
    result.box = candidates[best];
    result.trace.push_back(result.box);
  }
  return result;
}

BBox clip_r_crop(const ImageRef& image, const std::string& prompt,
                 Scorer& scorer, const RecursiveConfig& cfg) {
  return clip_r_crop_traced(image, prompt, scorer, cfg).box;
}

}  // namespace vcrop::sim
