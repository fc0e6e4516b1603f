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
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "vcrop/errors.hpp"
#include "vcrop/harness/config.hpp"
#include "vcrop/harness/records.hpp"
#include "vcrop/scorer.hpp"

namespace vcrop::harness {

using ScorerFactory = std::function<std::unique_ptr<sim::Scorer>()>;

struct BatchOptions {
  Method method = Method::kNone;
  CropConfig config;
  /// grad: bundles are read from <bundles_dir>/<question_id>.vcgb.
  std::optional<std::filesystem::path> bundles_dir;
  /// clip-w / clip-r: called once per worker.
  ScorerFactory scorer_factory;
  std::size_t workers = 1;
  /// When set, each crop is written as <crops_dir>/<question_id>.png.
  std::optional<std::filesystem::path> crops_dir;
  /// Completed records are rewritten here atomically after every entry;
  /// entries already present without an error are skipped on restart.
  std::optional<std::filesystem::path> progress_file;
};

struct BatchResult {
  /// One record per manifest entry, ordered by question id.
  std::vector<PredictionRecord> records;
  std::size_t errors = 0;
};

/// Raised when the scorer transport fails; progress up to that point has
/// been saved if a progress file was configured.
class BatchAborted : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Crops every manifest entry with `options.method`. Per-entry failures
/// (missing bundle, bad image, ...) are recorded on the record; a scorer
/// transport failure aborts the whole batch with BatchAborted.
BatchResult run_crop_batch(const Manifest& manifest, const BatchOptions& options);

}  // namespace vcrop::harness
