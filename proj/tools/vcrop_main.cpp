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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vcrop/errors.hpp"
#include "vcrop/harness/batch.hpp"
#include "vcrop/harness/config.hpp"
#include "vcrop/harness/overlay.hpp"
#include "vcrop/harness/records.hpp"
#include "vcrop/harness/subsets.hpp"
#include "vcrop/image_io.hpp"
#include "vcrop/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vcrop;
using namespace vcrop::harness;

namespace {

constexpr int kExitEntryErrors = 1;
constexpr int kExitFatal = 2;

struct Common {
  std::string manifest;
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  bool keep_going = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_manifest = true) {
  auto* m = cmd->add_option("--manifest", c.manifest, "dataset manifest (JSONL)");
  if (needs_manifest) m->required();
  cmd->add_option("--out", c.out, "output file")->required();
  cmd->add_flag("--keep-going", c.keep_going,
                "exit 0 even when some entries fail; the error count is still reported");
}

// Per-entry errors decide the exit code.
int finish(std::size_t errors, const Common& c) {
  if (errors == 0) return 0;
  std::cerr << errors << " entr" << (errors == 1 ? "y" : "ies") << " failed\n";
  return c.keep_going ? 0 : kExitEntryErrors;
}

std::string write_jsonl(const std::vector<json>& rows) {
  std::string s;
  for (const auto& r : rows) s += r.dump() + '\n';
  return s;
}

// ------------------------------------------------------------- crop commands

struct CropArgs {
  Common common;
  std::string bundles_dir;
  std::string scorer_cmd;
  std::string crops_dir;
  std::string progress;
  std::string method = "none";
  std::size_t workers = 1;
  int scorer_timeout_s = 60;
};

int run_crop(Method method, const CropArgs& a) {
  const auto manifest = load_manifest(a.common.manifest);
  BatchOptions opt;
  opt.method = method;
  if (!a.common.config.empty()) opt.config = load_crop_config(a.common.config);
  if (!a.bundles_dir.empty()) opt.bundles_dir = a.bundles_dir;
  if (!a.crops_dir.empty()) opt.crops_dir = a.crops_dir;
  if (!a.progress.empty()) opt.progress_file = a.progress;
  opt.workers = a.workers;
  if (!a.scorer_cmd.empty()) {
    const auto cmd = a.scorer_cmd;
    const auto timeout = std::chrono::seconds(a.scorer_timeout_s);
    opt.scorer_factory = [cmd, timeout]() -> std::unique_ptr<sim::Scorer> {
      return sim::spawn_scorer(cmd, timeout);
    };
  }
  const auto result = run_crop_batch(manifest, opt);
  save_predictions(result.records, a.common.out);
  for (const auto& r : result.records) {
    if (r.error) std::cerr << r.question_id << ": " << *r.error << '\n';
  }
  std::cerr << result.records.size() - result.errors << "/" << result.records.size()
            << " entries cropped\n";
  return finish(result.errors, a.common);
}

CLI::App* add_crop_command(CLI::App& app, const std::string& name,
                           const std::string& help, CropArgs& a) {
  auto* cmd = app.add_subcommand(name, help);
  add_common(cmd, a.common);
  cmd->add_option("--config", a.common.config, "JSON crop configuration");
  cmd->add_option("--workers", a.workers, "parallel workers")->check(CLI::PositiveNumber);
  cmd->add_option("--crops-dir", a.crops_dir, "write each crop as <id>.png here");
  cmd->add_option("--progress", a.progress, "resumable progress file (JSONL)");
  return cmd;
}

// ------------------------------------------------------------------ evaluate

struct EvalArgs {
  Common common;
  std::string predictions;
  std::string reference = "modal";
};

int run_evaluate(const EvalArgs& a) {
  const auto manifest = load_manifest(a.common.manifest, {.check_images = false});
  std::map<std::string, PredictionRecord> preds;
  for (auto& p : load_predictions(a.predictions)) {
    const auto id = p.question_id;
    if (!preds.emplace(id, std::move(p)).second) {
      throw FormatError("duplicate prediction for question " + id);
    }
  }
  std::vector<metrics::QARecord> records;
  for (const auto& e : manifest) {
    metrics::QARecord r;
    r.question_id = e.question_id;
    r.image_id = e.image_id;
    r.question = e.question;
    r.human_answers = e.human_answers;
    r.human_box = e.human_box;
    if (const auto it = preds.find(e.question_id); it != preds.end()) {
      r.model_answer = it->second.answer;
      r.predicted_box = it->second.box;
    }
    records.push_back(std::move(r));
  }
  const auto ref = a.reference == "best" ? metrics::SimilarityReference::kBestAnnotator
                                         : metrics::SimilarityReference::kModalAnswer;
  const auto report = metrics::evaluate_dataset(records, ref);

  std::vector<json> rows;
  for (const auto& s : report.rows) {
    json j{{"question_id", s.question_id}};
    if (s.error) {
      j["error"] = *s.error;
    } else {
      j["acc"] = s.acc;
      j["str_simi"] = s.str_simi;
      if (s.iou) j["iou"] = *s.iou;
    }
    rows.push_back(std::move(j));
  }
  json summary{{"summary", true},
               {"acc", report.mean_acc},
               {"str_simi", report.mean_str_simi},
               {"evaluated", report.evaluated},
               {"excluded", report.excluded}};
  summary["iou"] = report.mean_iou ? json(*report.mean_iou) : json(nullptr);
  rows.push_back(summary);
  write_file_atomically(a.common.out, write_jsonl(rows));

  std::printf("acc %.2f  str-simi %.2f", report.mean_acc, report.mean_str_simi);
  if (report.mean_iou) std::printf("  iou %.2f", *report.mean_iou);
  std::printf("  (%zu evaluated, %zu excluded)\n", report.evaluated, report.excluded);
  return finish(report.excluded, a.common);
}

// ------------------------------------------------------------------- subsets

struct TextSubsetArgs {
  Common common;
  double expansion = 1.5;
  std::optional<std::size_t> target_count;
};

int run_text_subset(const TextSubsetArgs& a) {
  const auto manifest = load_manifest(a.common.manifest);
  auto subset = build_text_subset(manifest, a.expansion);
  std::cerr << subset.size() << " of " << manifest.size() << " entries kept\n";
  if (a.target_count && *a.target_count < subset.size()) {
    subset = build_random_subset(subset, *a.target_count, a.common.seed);
  }
  save_manifest(subset, a.common.out);
  return 0;
}

struct RandomSubsetArgs {
  Common common;
  std::size_t n = 0;
};

int run_random_subset(const RandomSubsetArgs& a) {
  const auto manifest = load_manifest(a.common.manifest);
  save_manifest(build_random_subset(manifest, a.n, a.common.seed), a.common.out);
  return 0;
}

struct FailureArgs {
  Common common;
  std::string preds_a;
  std::string preds_b;
};

int run_failure_intersection(const FailureArgs& a) {
  const auto manifest = load_manifest(a.common.manifest, {.check_images = false});
  const auto ids = failure_intersection(load_predictions(a.preds_a),
                                        load_predictions(a.preds_b), manifest);
  std::vector<json> rows;
  for (const auto& id : ids) rows.push_back(json{{"question_id", id}});
  write_file_atomically(a.common.out, write_jsonl(rows));
  std::cerr << ids.size() << " items failed by both\n";
  return 0;
}

// ------------------------------------------------------------------- overlay

struct OverlayArgs {
  Common common;
  std::string image;
  std::vector<std::string> boxes;
  std::string predictions;
  std::string question_id;
};

// "x0,y0,x1,y1" or "x0,y0,x1,y1:label".
LabeledBox parse_labeled_box(const std::string& s) {
  LabeledBox lb;
  const auto colon = s.find(':');
  const std::string coords = s.substr(0, colon);
  if (colon != std::string::npos) lb.label = s.substr(colon + 1);
  char tail = 0;
  if (std::sscanf(coords.c_str(), "%d,%d,%d,%d%c", &lb.box.x0, &lb.box.y0, &lb.box.x1,
                  &lb.box.y1, &tail) != 4) {
    throw InvalidArgument("bad box '" + s + "', want x0,y0,x1,y1[:label]");
  }
  return lb;
}

int run_overlay(const OverlayArgs& a) {
  std::vector<LabeledBox> boxes;
  for (const auto& s : a.boxes) boxes.push_back(parse_labeled_box(s));
  if (!a.predictions.empty()) {
    for (const auto& p : load_predictions(a.predictions)) {
      if (p.question_id == a.question_id && p.box) {
        boxes.push_back({*p.box, std::string(to_string(p.method))});
      }
    }
  }
  write_image(render_overlay(read_image(a.image), boxes), a.common.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vcrop: question-guided visual cropping and VQA evaluation"};
  app.require_subcommand(1);

  CropArgs grad_a, clipw_a, clipr_a, base_a;
  auto* grad = add_crop_command(app, "grad-crop", "crop from gradient bundles", grad_a);
  grad->add_option("--bundles-dir", grad_a.bundles_dir, "directory of <id>.vcgb files")
      ->required();
  const auto add_clip = [&](const char* name, const char* help, CropArgs& a) {
    auto* cmd = add_crop_command(app, name, help, a);
    cmd->add_option("--scorer-cmd", a.scorer_cmd, "command that serves the scorer protocol")
        ->required();
    cmd->add_option("--scorer-timeout", a.scorer_timeout_s, "seconds per scorer reply");
    return cmd;
  };
  auto* clipw = add_clip("clip-w-crop", "sliding-window similarity crop", clipw_a);
  auto* clipr = add_clip("clip-r-crop", "recursive directional similarity crop", clipr_a);
  auto* base = add_crop_command(app, "baseline", "full-image or human-box records", base_a);
  base->add_option("--method", base_a.method, "none or human")
      ->check(CLI::IsMember({"none", "human"}));

  EvalArgs eval_a;
  auto* eval = app.add_subcommand("evaluate", "score answers against human annotations");
  add_common(eval, eval_a.common);
  eval->add_option("--predictions", eval_a.predictions, "prediction records (JSONL)")->required();
  eval->add_option("--reference", eval_a.reference, "str-simi reference: modal or best")
      ->check(CLI::IsMember({"modal", "best"}));

  TextSubsetArgs text_a;
  auto* text = app.add_subcommand("build-text-subset", "keep entries with one matching OCR box");
  add_common(text, text_a.common);
  text->add_option("--expansion", text_a.expansion, "OCR box scale factor");
  text->add_option("--target-count", text_a.target_count, "sample down to this many entries");
  text->add_option("--seed", text_a.common.seed, "sampling seed");

  RandomSubsetArgs rand_a;
  auto* rnd = app.add_subcommand("build-random-subset", "seeded sample without replacement");
  add_common(rnd, rand_a.common);
  rnd->add_option("--n", rand_a.n, "sample size")->required();
  rnd->add_option("--seed", rand_a.common.seed, "sampling seed");

  FailureArgs fail_a;
  auto* fail = app.add_subcommand("failure-intersection", "items both prediction sets get wrong");
  add_common(fail, fail_a.common);
  fail->add_option("--preds-a", fail_a.preds_a, "first prediction set")->required();
  fail->add_option("--preds-b", fail_a.preds_b, "second prediction set")->required();

  OverlayArgs over_a;
  auto* over = app.add_subcommand("overlay", "draw labeled boxes on an image");
  add_common(over, over_a.common, false);
  over->add_option("--image", over_a.image, "input image")->required();
  over->add_option("--box", over_a.boxes, "x0,y0,x1,y1[:label], repeatable");
  over->add_option("--predictions", over_a.predictions, "draw boxes from these records");
  over->add_option("--question-id", over_a.question_id, "record to draw from --predictions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*grad) return run_crop(Method::kGrad, grad_a);
    if (*clipw) return run_crop(Method::kClipW, clipw_a);
    if (*clipr) return run_crop(Method::kClipR, clipr_a);
    if (*base) return run_crop(parse_method(base_a.method), base_a);
    if (*eval) return run_evaluate(eval_a);
    if (*text) return run_text_subset(text_a);
    if (*rnd) return run_random_subset(rand_a);
    if (*fail) return run_failure_intersection(fail_a);
    if (*over) return run_overlay(over_a);
  } catch (const BatchAborted& e) {
    std::cerr << "vcrop: batch aborted: " << e.what() << '\n';
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "vcrop: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}
