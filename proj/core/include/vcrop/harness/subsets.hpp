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
#include <random>
#include <string>
#include <vector>

#include "vcrop/harness/records.hpp"

namespace vcrop::harness {

/// Keeps entries where exactly one distinct OCR box reads (after answer
/// normalization) as one of the entry's human answers, and attaches that
/// box scaled by `expansion` about its center as the human box.
Manifest build_text_subset(const Manifest& manifest, double expansion = 1.5);

/// Uniform draw in [0, bound) from a 64-bit Mersenne Twister, rejecting the
/// biased tail so results match on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Samples n entries without replacement. The input is first ordered by
/// question id, then an mt19937_64 seeded with `seed` drives a partial
/// Fisher-Yates shuffle: for i in [0, n) swap slot i with slot
/// i + uniform_below(size - i). The first n slots, reordered by question
/// id, are returned. Throws InvalidArgument if n exceeds the manifest.
Manifest build_random_subset(const Manifest& manifest, std::size_t n,
                             std::uint64_t seed);

/// Ids whose answer fails the majority test under both prediction sets,
/// ordered by id. Throws InvalidArgument listing any manifest ids lacking
/// an answered prediction in either set.
std::vector<std::string> failure_intersection(
    const std::vector<PredictionRecord>& preds_a,
    const std::vector<PredictionRecord>& preds_b, const Manifest& manifest);

}  // namespace vcrop::harness
