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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vcrop {

/// Per-channel loss gradients with respect to the input pixels, plus the
/// question/answer pair they were computed for.
///
/// On disk ("VCGB", version 1, all integers and floats little-endian):
///
///   char[4]  magic "VCGB"
///   u32      version
///   u32      width
///   u32      height
///   f32[w*h] dL/dR, row-major
///   f32[w*h] dL/dG
///   f32[w*h] dL/dB
///   u32      json_len
///   u8[json_len] UTF-8 JSON object {"question", "answer", "loss", ...}
///
/// Extra metadata keys (model id and so on) are carried through unchanged.
struct GradientBundle {
  int width = 0;
  int height = 0;
  std::vector<float> grad_r;
  std::vector<float> grad_g;
  std::vector<float> grad_b;
  std::string question;
  std::string answer;
  double loss = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  /// Throws InvalidArgument when planes are missized or hold non-finite
  /// values.
  void validate() const;

  friend bool operator==(const GradientBundle&, const GradientBundle&) = default;
};

inline constexpr char kBundleMagic[4] = {'V', 'C', 'G', 'B'};
inline constexpr std::uint32_t kBundleVersion = 1;

void write_bundle(const GradientBundle& bundle, std::ostream& out);
void write_bundle(const GradientBundle& bundle,
                  const std::filesystem::path& path);

/// Throws FormatError on bad magic, unknown version, truncation, trailing
/// bytes, malformed metadata or non-finite gradients.
GradientBundle read_bundle(std::istream& in);
GradientBundle read_bundle(const std::filesystem::path& path);

}  // namespace vcrop
