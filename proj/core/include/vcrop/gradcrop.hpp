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

#include <utility>
#include <vector>

#include "vcrop/gradient_bundle.hpp"
#include "vcrop/image.hpp"

namespace vcrop::grad {

enum class Connectivity { kFour = 4, kEight = 8 };

struct GradConfig {
  double k_discard = 1.0;  // percent trimmed from each tail
  int kernel_size = 5;
  double sigma = 1.1;
  int patch_size = 16;
  double n_pool = 5.0;  // top percent kept by token pooling
  double expansion = 1.5;
  Connectivity connectivity = Connectivity::kFour;
  bool enable_highlighting = true;
  bool enable_highpass = true;
  int max_highlight_iters = 50;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

/// Patch-level {0,1} grid, ceil(W/N) columns by ceil(H/N) rows.
struct BinaryPatchGrid : Grid<std::uint8_t> {
  using Grid<std::uint8_t>::Grid;
};

/// (row, col) of a patch cell.
struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// relu(dR) + relu(dG) + relu(dB) per pixel.
SaliencyMap combine_gradients(const GradientBundle& bundle);

/// Zeroes values strictly outside [P_k, P_(100-k)] and min-max normalizes
/// the survivors (discarded pixels stay 0). Requires 0 <= k < 50.
SaliencyMap discard_and_normalize(const SaliencyMap& map, double k_discard);

/// Repeatedly zeroes every value <= the mean of the whole map (zeros
/// included). Stops at a fixpoint, when nothing exceeds the mean, or after
/// max_iters rounds.
SaliencyMap highlight(const SaliencyMap& map, int max_iters);

/// 1 where (gray - blur(gray)) is strictly above its mean.
BinaryMask high_pass_mask(const ImageTensor& img, int kernel_size,
                          double sigma);

SaliencyMap apply_mask(const SaliencyMap& map, const BinaryMask& mask);

/// Each N x N patch (edge patches may be partial) is represented by its
/// nearest-rank (100 - n_pool) percentile; cells whose representative is
/// strictly above the mean representative become 1.
BinaryPatchGrid token_pool_binarize(const SaliencyMap& map, int patch_size,
                                    double n_pool);

/// Largest connected set of 1-cells, sorted in raster order. Equal sizes
/// resolve to the component whose first raster cell comes first. Empty
/// for an all-zero grid.
std::vector<Cell> largest_component(const BinaryPatchGrid& grid,
                                    Connectivity connectivity);

/// Pixel box of the cells' patches (clipped to the image), scaled by
/// `expansion` about its center and clamped. Throws NoRegionError when
/// `cells` is empty.
BBox component_bbox_expand(const std::vector<Cell>& cells, int patch_size,
                           double expansion, int img_w, int img_h);

/// Scales a box about its center: floor on the low edge, ceil on the high
/// edge, then clamps to the image. Never shrinks the input.
BBox expand_box(const BBox& box, double factor, int img_w, int img_h);

/// Intermediate products of one grad_crop run, for debugging overlays and
/// tests.
struct GradTrace {
  SaliencyMap combined;
  SaliencyMap normalized;
  SaliencyMap highlighted;
  SaliencyMap masked;
  BinaryPatchGrid grid;
  std::vector<Cell> component;
  BBox box;
  bool fell_back = false;
};

/// The full pipeline. Falls back to the full-image box when pooling leaves
/// no region. Throws InvalidArgument if image and bundle sizes differ.
BBox grad_crop(const ImageTensor& img, const GradientBundle& bundle,
               const GradConfig& cfg = {});
GradTrace grad_crop_traced(const ImageTensor& img,
                           const GradientBundle& bundle,
                           const GradConfig& cfg = {});

}  // namespace vcrop::grad
