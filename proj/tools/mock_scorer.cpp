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

// Stand-in similarity server for tests and dry runs. Scores a region by its
// overlap with a hidden target box, or returns a constant.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vcrop/errors.hpp"
#include "vcrop/harness/records.hpp"
#include "vcrop/scorer.hpp"

namespace {

vcrop::BBox parse_box_arg(const std::string& s) {
  vcrop::BBox b;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d,%d,%d,%d%c", &b.x0, &b.y0, &b.x1, &b.y1, &tail) != 4 ||
      b.x0 >= b.x1 || b.y0 >= b.y1) {
    throw vcrop::InvalidArgument("bad box '" + s + "', want x0,y0,x1,y1");
  }
  return b;
}

// One {"image": path, "bbox": [..]} object per line.
std::map<std::string, vcrop::BBox> load_targets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vcrop::IoError("cannot open " + path);
  std::map<std::string, vcrop::BBox> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    out[j.at("image").get<std::string>()] = vcrop::harness::bbox_from_json(j.at("bbox"));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overlap mock scorer speaking the vcrop wire protocol on stdio"};
  std::string target_arg, targets_file;
  std::optional<double> constant;
  bool pipeline = false;
  app.add_option("--target", target_arg, "hidden target box x0,y0,x1,y1 used for every image");
  app.add_option("--targets", targets_file, "JSONL file mapping image paths to target boxes");
  app.add_option("--constant", constant, "return this score for every region");
  app.add_flag("--pipeline", pipeline, "advertise pipelined requests");
  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<vcrop::BBox> target;
    if (!target_arg.empty()) target = parse_box_arg(target_arg);
    std::map<std::string, vcrop::BBox> targets;
    if (!targets_file.empty()) targets = load_targets(targets_file);
    if (!target && targets.empty() && !constant) {
      std::cerr << "need one of --target, --targets or --constant\n";
      return 2;
    }

    const vcrop::sim::ScoreFn fn = [&](const std::string& image, const vcrop::BBox& box,
                                       const std::string&) -> double {
      if (constant) return *constant;
      if (const auto it = targets.find(image); it != targets.end()) {
        return vcrop::sim::overlap_score(box, it->second);
      }
      if (target) return vcrop::sim::overlap_score(box, *target);
      throw vcrop::InvalidArgument("no target for " + image);
    };
    std::ios::sync_with_stdio(false);
    return vcrop::sim::serve_scorer(std::cin, std::cout, fn, {.pipeline = pipeline});
  } catch (const std::exception& e) {
    std::cerr << "vcrop-mock-scorer: " << e.what() << '\n';
    return 2;
  }
}
