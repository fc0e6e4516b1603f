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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vcrop/image.hpp"
#include "vcrop/image_io.hpp"

namespace vcrop::harness {

struct OcrBox {
  std::string text;
  BBox box;
  friend bool operator==(const OcrBox&, const OcrBox&) = default;
};

/// One question of a dataset manifest (one JSON object per line):
///
///   {"question_id": "17", "image_path": "img/17.jpg", "question": "...",
///    "human_answers": [10 strings], "ocr_boxes": [{"text": .., "bbox": [..]}],
///    "human_box": [x0,y0,x1,y1], "width": 640, "height": 480}
///
/// ocr_boxes, human_box, image_id, width and height are optional. Boxes are
/// always [x0, y0, x1, y1] integer arrays, half-open.
struct ManifestEntry {
  std::string question_id;
  std::string image_id;
  std::filesystem::path image_path;
  std::string question;
  std::vector<std::string> human_answers;
  std::vector<OcrBox> ocr_boxes;
  std::optional<BBox> human_box;
  std::optional<int> width;
  std::optional<int> height;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

using Manifest = std::vector<ManifestEntry>;

struct ManifestOptions {
  /// Fail when an image path does not exist.
  bool check_images = true;
};

/// Relative image paths resolve against `base_dir` and come back absolute.
/// Throws FormatError on malformed lines or duplicate ids.
Manifest parse_manifest(std::istream& in,
                        const std::filesystem::path& base_dir,
                        const ManifestOptions& options = {});
Manifest load_manifest(const std::filesystem::path& path,
                       const ManifestOptions& options = {});

/// Image paths are written relative to the output file's directory.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Entry dimensions from the manifest, or the image header if absent.
ImageSize entry_size(const ManifestEntry& entry);

enum class Method { kNone, kHuman, kGrad, kClipW, kClipR };

std::string_view to_string(Method m);
/// Accepts none, human, grad, clip-w, clip-r.
Method parse_method(std::string_view s);

struct PredictionRecord {
  std::string question_id;
  Method method = Method::kNone;
  std::optional<BBox> box;
  std::optional<std::string> answer;
  std::optional<std::string> error;
  /// clip-r box chain, full image first.
  std::vector<BBox> trace;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

std::vector<PredictionRecord> parse_predictions(std::istream& in);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::vector<PredictionRecord>& records,
                      const std::filesystem::path& path);

nlohmann::json to_json(const BBox& box);
/// Throws FormatError unless `v` is four integers with x0 < x1, y0 < y1.
BBox bbox_from_json(const nlohmann::json& v);

nlohmann::json to_json(const PredictionRecord& rec);
PredictionRecord prediction_from_json(const nlohmann::json& v);

/// Question ids order numerically when both are digit strings and
/// lexicographically otherwise (numeric ids first).
bool id_less(std::string_view a, std::string_view b);

/// Writes to a sibling temporary and renames over `path`.
void write_file_atomically(const std::filesystem::path& path,
                           const std::string& contents);

}  // namespace vcrop::harness
