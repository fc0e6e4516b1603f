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
#include <string>
#include <string_view>
#include <vector>

#include "vcrop/image.hpp"

namespace vcrop::harness {

struct LabeledBox {
  BBox box;
  std::string label;
};

/// RGB in [0,1], derived from an FNV-1a hash of the label (full saturation
/// and value, hue from the hash).
std::array<float, 3> label_color(std::string_view label);

/// Copy of `img` with each box outlined 2 px wide along the inside of its
/// edges, label text in a 3x5 pixel font just inside the top-left corner.
/// Boxes are drawn in list order, so later boxes cover earlier ones.
/// Throws InvalidArgument if a box is outside the image.
ImageTensor render_overlay(const ImageTensor& img,
                           const std::vector<LabeledBox>& boxes);

}  // namespace vcrop::harness
