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

#include <nlohmann/json.hpp>

#include "vcrop/gradcrop.hpp"
#include "vcrop/simcrop.hpp"

namespace vcrop::harness {

/// Settings for every cropping strategy. The config file is a JSON object
/// with optional sections named after the strategy, each keyed by the
/// field names of the matching struct:
///
///   {"grad":   {"k_discard": 1, "kernel_size": 5, "connectivity": 8, ...},
///    "clip_w": {"window_patches": 6, "threshold": 0.5, ...},
///    "clip_r": {"ratio": 0.9, "iterations": 20, "min_side": 16}}
///
/// Unknown sections or keys are rejected. Setting grad.kernel_size without
/// grad.sigma derives sigma from the kernel size.
struct CropConfig {
  grad::GradConfig grad;
  sim::WindowConfig window;
  sim::RecursiveConfig recursive;
};

CropConfig parse_crop_config(const nlohmann::json& doc);
CropConfig load_crop_config(const std::filesystem::path& path);

}  // namespace vcrop::harness
