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

#include "vcrop/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

#include "vcrop/errors.hpp"

namespace vcrop::metrics {
namespace {

constexpr std::string_view kStripped = ".,?!\"'():;";

constexpr std::array<std::string_view, 11> kNumberWords = {
    "zero", "one", "two", "three", "four", "five",
    "six",  "seven", "eight", "nine", "ten"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string normalize_answer(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    if (kStripped.find(c) != std::string_view::npos) continue;
    cleaned.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }

  std::string out;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_space(cleaned[i])) ++i;
    std::size_t j = i;
    while (j < cleaned.size() && !is_space(cleaned[j])) ++j;
    if (j == i) break;
    std::string_view word(cleaned.data() + i, j - i);
    i = j;
    if (word == "a" || word == "an" || word == "the") continue;
    std::string token(word);
    for (std::size_t n = 0; n < kNumberWords.size(); ++n) {
      if (word == kNumberWords[n]) token = std::to_string(n);
    }
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

double vqa_accuracy(std::string_view model_answer,
                    std::span<const std::string> human_answers) {
  if (human_answers.size() != kHumanAnswers) {
    throw InvalidArgument("expected 10 human answers, got " +
                          std::to_string(human_answers.size()));
  }
  const auto target = normalize_answer(model_answer);
  int n = 0;
  for (const auto& h : human_answers) {
    if (normalize_answer(h) == target) ++n;
  }
  // 3n/10 rounds once, so n = 3 gives exactly 0.9.
  return std::min(3.0 * n / 10.0, 1.0);
}

std::size_t lcs_length(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (char ca : a) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = ca == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double lcs_similarity(std::string_view a, std::string_view b) {
  const auto na = normalize_answer(a), nb = normalize_answer(b);
  if (na.empty() && nb.empty()) return 1.0;
  return 2.0 * static_cast<double>(lcs_length(na, nb)) /
         static_cast<double>(na.size() + nb.size());
}

double iou(const BBox& a, const BBox& b) {
  const auto ix = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const auto iy = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const auto inter = static_cast<std::int64_t>(ix) * iy;
  const auto uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<std::string> modal_answers(std::span<const std::string> human_answers) {
  std::vector<std::string> order;
  std::unordered_map<std::string, int> counts;
  for (const auto& h : human_answers) {
    auto norm = normalize_answer(h);
    if (counts[norm]++ == 0) order.push_back(std::move(norm));
  }
  int best = 0;
  for (const auto& [_, c] : counts) best = std::max(best, c);
  std::vector<std::string> modes;
  for (auto& a : order) {
    if (counts[a] == best) modes.push_back(a);
  }
  return modes;
}

bool matches_majority(std::string_view model_answer,
                      std::span<const std::string> human_answers) {
  if (human_answers.empty()) {
    throw InvalidArgument("majority test needs at least one human answer");
  }
  const auto modes = modal_answers(human_answers);
  return std::find(modes.begin(), modes.end(), normalize_answer(model_answer)) !=
         modes.end();
}

MetricsReport evaluate_dataset(std::span<const QARecord> records,
                               SimilarityReference reference) {
  if (records.empty()) throw InvalidArgument("no records to evaluate");
  MetricsReport report;
  double acc_sum = 0.0, simi_sum = 0.0, iou_sum = 0.0;
  std::size_t iou_count = 0;

  for (const auto& rec : records) {
    ItemScore row;
    row.question_id = rec.question_id;
    if (!rec.model_answer) {
      row.error = "missing model answer";
    } else if (rec.human_answers.size() != kHumanAnswers) {
      row.error = "expected 10 human answers, got " +
                  std::to_string(rec.human_answers.size());
    }
    if (row.error) {
      ++report.excluded;
      report.rows.push_back(std::move(row));
      continue;
    }
    row.acc = vqa_accuracy(*rec.model_answer, rec.human_answers);
    if (reference == SimilarityReference::kModalAnswer) {
      row.str_simi = lcs_similarity(*rec.model_answer,
                                    modal_answers(rec.human_answers).front());
    } else {
      for (const auto& h : rec.human_answers) {
        row.str_simi = std::max(row.str_simi, lcs_similarity(*rec.model_answer, h));
      }
    }
    if (rec.human_box && rec.predicted_box) {
      row.iou = iou(*rec.human_box, *rec.predicted_box);
      iou_sum += *row.iou;
      ++iou_count;
    }
    acc_sum += row.acc;
    simi_sum += row.str_simi;
    ++report.evaluated;
    report.rows.push_back(std::move(row));
  }
  if (report.evaluated == 0) {
    throw InvalidArgument("every record was excluded from evaluation");
  }
  const auto n = static_cast<double>(report.evaluated);
  report.mean_acc = 100.0 * acc_sum / n;
  report.mean_str_simi = 100.0 * simi_sum / n;
  if (iou_count > 0) report.mean_iou = 100.0 * iou_sum / static_cast<double>(iou_count);
  return report;
}

}  // namespace vcrop::metrics
