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

#include <filesystem>

#include "vcrop/image.hpp"

namespace vcrop {

/// Decodes an 8-bit PNG or JPEG (chosen by file signature, not extension).
/// Grayscale is promoted to three equal planes; alpha is dropped.
ImageTensor read_image(const std::filesystem::path& path);

struct ImageSize {
  int width = 0;
  int height = 0;
};

/// Dimensions only; reads the header and nothing else where the format
/// allows it.
ImageSize probe_image_size(const std::filesystem::path& path);

/// Encoding follows the extension: .jpg/.jpeg writes JPEG, anything else PNG.
void write_image(const ImageTensor& img, const std::filesystem::path& path,
                 int jpeg_quality = 95);

}  // namespace vcrop
