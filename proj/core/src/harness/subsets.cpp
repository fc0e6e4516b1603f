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

#include "vcrop/harness/subsets.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "vcrop/errors.hpp"
#include "vcrop/gradcrop.hpp"
#include "vcrop/metrics.hpp"

namespace vcrop::harness {
namespace {

Manifest sorted_by_id(Manifest m) {
  std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) {
    return id_less(a.question_id, b.question_id);
  });
  return m;
}

struct BoxLess {
  bool operator()(const BBox& a, const BBox& b) const {
    return std::tie(a.x0, a.y0, a.x1, a.y1) < std::tie(b.x0, b.y0, b.x1, b.y1);
  }
};

}  // namespace

Manifest build_text_subset(const Manifest& manifest, double expansion) {
  Manifest out;
  for (const auto& entry : manifest) {
    std::unordered_set<std::string> answers;
    for (const auto& a : entry.human_answers) {
      auto norm = metrics::normalize_answer(a);
      if (!norm.empty()) answers.insert(std::move(norm));
    }
    std::set<BBox, BoxLess> matched;
    for (const auto& ocr : entry.ocr_boxes) {
      if (answers.count(metrics::normalize_answer(ocr.text))) matched.insert(ocr.box);
    }
    if (matched.size() != 1) continue;
    const auto size = entry_size(entry);
    const BBox box = *matched.begin();
    if (!box.valid_within(size.width, size.height)) continue;
    ManifestEntry kept = entry;
    kept.human_box = grad::expand_box(box, expansion, size.width, size.height);
    kept.width = size.width;
    kept.height = size.height;
    out.push_back(std::move(kept));
  }
  return out;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below needs a positive bound");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - (kMax % bound + 1) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x <= limit) return x % bound;
  }
}

Manifest build_random_subset(const Manifest& manifest, std::size_t n,
                             std::uint64_t seed) {
  if (n > manifest.size()) {
    throw InvalidArgument("cannot sample " + std::to_string(n) + " of " +
                          std::to_string(manifest.size()) + " entries");
  }
  Manifest pool = sorted_by_id(manifest);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return sorted_by_id(std::move(pool));
}

std::vector<std::string> failure_intersection(
    const std::vector<PredictionRecord>& preds_a,
    const std::vector<PredictionRecord>& preds_b, const Manifest& manifest) {
  const auto index = [](const std::vector<PredictionRecord>& preds) {
    std::unordered_map<std::string, const PredictionRecord*> m;
    for (const auto& p : preds) {
      if (p.answer) m[p.question_id] = &p;
    }
    return m;
  };
  const auto a = index(preds_a), b = index(preds_b);

  std::vector<std::string> missing;
  for (const auto& e : manifest) {
    if (!a.count(e.question_id)) missing.push_back("A:" + e.question_id);
    if (!b.count(e.question_id)) missing.push_back("B:" + e.question_id);
  }
  if (!missing.empty()) {
    std::string msg = "predictions missing for";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ... (" + std::to_string(missing.size()) + " total)";
    throw InvalidArgument(msg);
  }

  std::vector<std::string> out;
  for (const auto& e : manifest) {
    if (e.human_answers.empty()) {
      throw InvalidArgument("entry " + e.question_id + " has no human answers");
    }
    const bool fail_a = !metrics::matches_majority(*a.at(e.question_id)->answer, e.human_answers);
    const bool fail_b = !metrics::matches_majority(*b.at(e.question_id)->answer, e.human_answers);
    if (fail_a && fail_b) out.push_back(e.question_id);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return id_less(x, y); });
  return out;
}

}  // namespace vcrop::harness
