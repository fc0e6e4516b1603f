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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcrop/gradcrop.hpp"
#include "vcrop/image.hpp"
#include "vcrop/scorer.hpp"

namespace vcrop::sim {

struct WindowConfig {
  int patch_size = 16;
  int window_patches = 6;
  int stride = 1;  // in patches
  double threshold = 0.5;
  int max_highlight_iters = 50;

  void validate() const;
};

struct RecursiveConfig {
  double ratio = 0.9;
  int iterations = 20;
  int min_side = 16;

  void validate() const;
};

/// Per-patch accumulated window scores and how many windows covered each
/// patch.
class PatchGrid {
 public:
  PatchGrid(int cols, int rows);

  int cols() const { return cols_; }
  int rows() const { return rows_; }

  double sum(int col, int row) const { return sum_[index(col, row)]; }
  unsigned coverage(int col, int row) const { return coverage_[index(col, row)]; }
  /// Sum divided by coverage.
  double mean(int col, int row) const;

  void add(int col, int row, double score);

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * cols_ + col;
  }

  int cols_;
  int rows_;
  std::vector<double> sum_;
  std::vector<unsigned> coverage_;
};

/// Top-left window positions along one axis with `patches` patches.
/// Always includes the last full position; a single 0 when the axis is
/// shorter than one window.
std::vector<int> window_positions(int patches, int window_patches, int stride);

/// Windows in row-major order of their top-left patch, clamped to the
/// image.
std::vector<BBox> enumerate_windows(int img_w, int img_h,
                                    const WindowConfig& cfg = {});

/// Averages each window's score onto the patches it fully contains.
/// Throws InvalidArgument when sizes disagree.
PatchGrid accumulate_patch_scores(std::span<const BBox> windows,
                                  std::span<const double> scores,
                                  const WindowConfig& cfg, int img_w,
                                  int img_h);

/// Min-max normalizes the patch means, applies the mean-highlight
/// recursion and keeps cells strictly above `threshold`.
grad::BinaryPatchGrid select_patches(const PatchGrid& grid, double threshold,
                                     int max_highlight_iters = 50);

/// Tight pixel box around the selected patches; nullopt if none.
std::optional<BBox> selection_bbox(const grad::BinaryPatchGrid& selected,
                                   int patch_size, int img_w, int img_h);

/// Sliding-window crop. Falls back to the full image when nothing is
/// selected.
BBox clip_w_crop(const ImageRef& image, const std::string& prompt,
                 Scorer& scorer, const WindowConfig& cfg = {});

/// top, bottom, left, right.
struct DirectionalCrops {
  BBox top;
  BBox bottom;
  BBox left;
  BBox right;

  std::array<BBox, 4> as_array() const { return {top, bottom, left, right}; }
};

/// Shrinks one side to round(r * side) (half up), anchored at the
/// retained edge. Throws InvalidArgument if a resulting side is < 1.
DirectionalCrops directional_crops(const BBox& box, double ratio);

struct RecursiveResult {
  BBox box;
  /// Full-image box followed by every accepted crop.
  std::vector<BBox> trace;
};

/// Recursive four-direction crop. Ties go to top, bottom, left, right in
/// that order. Stops early when a candidate side would drop below
/// min_side or fail to shrink.
RecursiveResult clip_r_crop_traced(const ImageRef& image,
                                   const std::string& prompt, Scorer& scorer,
                                   const RecursiveConfig& cfg = {});
BBox clip_r_crop(const ImageRef& image, const std::string& prompt,
                 Scorer& scorer, const RecursiveConfig& cfg = {});

}  // namespace vcrop::sim
