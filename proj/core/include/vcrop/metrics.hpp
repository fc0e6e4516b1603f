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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcrop/image.hpp"

namespace vcrop::metrics {

inline constexpr std::size_t kHumanAnswers = 10;

/// Lowercases, trims, strips . , ? ! " ' ( ) : ; , drops the articles
/// a/an/the, maps zero..ten to digits and collapses whitespace.
std::string normalize_answer(std::string_view text);

/// min(0.3 n, 1) where n counts the human answers equal to the model answer
/// after normalization. Throws InvalidArgument unless there are exactly 10
/// human answers.
double vqa_accuracy(std::string_view model_answer,
                    std::span<const std::string> human_answers);

/// Length of the longest common subsequence (byte-wise).
std::size_t lcs_length(std::string_view a, std::string_view b);

/// 2 |LCS| / (|a| + |b|) on normalized strings; 1 if both are empty.
double lcs_similarity(std::string_view a, std::string_view b);

double iou(const BBox& a, const BBox& b);

/// Normalized human answers sharing the highest count, in order of first
/// appearance.
std::vector<std::string> modal_answers(std::span<const std::string> human_answers);

/// True when the normalized model answer equals one of the modal human
/// answers. Throws InvalidArgument on an empty answer list.
bool matches_majority(std::string_view model_answer,
                      std::span<const std::string> human_answers);

struct QARecord {
  std::string question_id;
  std::string image_id;
  std::string question;
  std::vector<std::string> human_answers;
  std::optional<std::string> model_answer;
  std::optional<BBox> human_box;
  std::optional<BBox> predicted_box;
};

enum class SimilarityReference {
  kModalAnswer,    // LCS against the first modal human answer
  kBestAnnotator,  // max LCS over all human answers
};

struct ItemScore {
  std::string question_id;
  double acc = 0.0;
  double str_simi = 0.0;
  std::optional<double> iou;
  std::optional<std::string> error;
};

struct MetricsReport {
  double mean_acc = 0.0;       // percent
  double mean_str_simi = 0.0;  // percent
  std::optional<double> mean_iou;  // percent, over rows carrying both boxes
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  std::vector<ItemScore> rows;  // input order, excluded rows included
};

/// Throws InvalidArgument on an empty list or when every record is
/// excluded. Records without a model answer or with the wrong number of
/// human answers are reported with an error and left out of the means.
MetricsReport evaluate_dataset(
    std::span<const QARecord> records,
    SimilarityReference reference = SimilarityReference::kModalAnswer);

}  // namespace vcrop::metrics
