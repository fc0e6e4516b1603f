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

#include "vcrop/harness/records.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <unistd.h>

#include "vcrop/errors.hpp"

namespace vcrop::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string id_from_json(const json& v, std::size_t line_no) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw FormatError("line " + std::to_string(line_no) +
                    ": question_id must be a string or integer");
}

const json& require(const json& obj, const char* key, std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError("line " + std::to_string(line_no) + ": missing \"" +
                      key + "\"");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           std::size_t line_no) {
  const auto& v = require(obj, key, line_no);
  if (!v.is_string()) {
    throw FormatError("line " + std::to_string(line_no) + ": \"" + key +
                      "\" must be a string");
  }
  return v.get<std::string>();
}

template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json v;
    try {
      v = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!v.is_object()) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": expected a JSON object");
    }
    fn(v, line_no);
  }
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
}

}  // namespace

json to_json(const BBox& box) { return json::array({box.x0, box.y0, box.x1, box.y1}); }

BBox bbox_from_json(const json& v) {
  if (!v.is_array() || v.size() != 4 ||
      !std::all_of(v.begin(), v.end(),
                   [](const json& x) { return x.is_number_integer(); })) {
    throw FormatError("box must be [x0,y0,x1,y1] integers, got " + v.dump());
  }
  BBox b{v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
  if (b.x0 < 0 || b.y0 < 0 || b.x0 >= b.x1 || b.y0 >= b.y1) {
    throw FormatError("degenerate box " + v.dump());
  }
  return b;
}

Manifest parse_manifest(std::istream& in, const fs::path& base_dir,
                        const ManifestOptions& options) {
  Manifest out;
  std::unordered_set<std::string> ids;
  for_each_json_line(in, [&](const json& v, std::size_t line_no) {
    ManifestEntry e;
    e.question_id = id_from_json(require(v, "question_id", line_no), line_no);
    if (!ids.insert(e.question_id).second) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": duplicate question_id " + e.question_id);
    }
    if (const auto it = v.find("image_id"); it != v.end()) {
      e.image_id = id_from_json(*it, line_no);
    }
    fs::path img = require_string(v, "image_path", line_no);
    if (img.is_relative()) img = base_dir / img;
    e.image_path = fs::absolute(img).lexically_normal();
    if (options.check_images && !fs::exists(e.image_path)) {
      throw FormatError("line " + std::to_string(line_no) + ": image " +
                        e.image_path.string() + " does not exist");
    }
    e.question = require_string(v, "question", line_no);
    const auto& answers = require(v, "human_answers", line_no);
    if (!answers.is_array()) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": human_answers must be an array");
    }
    for (const auto& a : answers) {
      if (!a.is_string()) {
        throw FormatError("line " + std::to_string(line_no) +
                          ": human answers must be strings");
      }
      e.human_answers.push_back(a.get<std::string>());
    }
    if (const auto it = v.find("ocr_boxes"); it != v.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw FormatError("line " + std::to_string(line_no) +
                          ": ocr_boxes must be an array");
      }
      for (const auto& o : *it) {
        e.ocr_boxes.push_back({require_string(o, "text", line_no),
                               bbox_from_json(require(o, "bbox", line_no))});
      }
    }
    if (const auto it = v.find("human_box"); it != v.end() && !it->is_null()) {
      e.human_box = bbox_from_json(*it);
    }
    for (auto [key, field] : {std::pair{"width", &e.width}, std::pair{"height", &e.height}}) {
      if (const auto it = v.find(key); it != v.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<int>() < 1) {
          throw FormatError("line " + std::to_string(line_no) + ": " + key +
                            " must be a positive integer");
        }
        *field = it->get<int>();
      }
    }
    out.push_back(std::move(e));
  });
  return out;
}

Manifest load_manifest(const fs::path& path, const ManifestOptions& options) {
  auto in = open_in(path);
  return parse_manifest(in, fs::absolute(path).parent_path(), options);
}

void save_manifest(const Manifest& manifest, const fs::path& path) {
  const auto dir = fs::absolute(path).parent_path();
  std::ostringstream os;
  for (const auto& e : manifest) {
    json v;
    v["question_id"] = e.question_id;
    if (!e.image_id.empty()) v["image_id"] = e.image_id;
    auto rel = e.image_path.lexically_relative(dir);
    v["image_path"] = (rel.empty() ? e.image_path : rel).generic_string();
    v["question"] = e.question;
    v["human_answers"] = e.human_answers;
    if (!e.ocr_boxes.empty()) {
      json boxes = json::array();
      for (const auto& o : e.ocr_boxes) {
        boxes.push_back({{"text", o.text}, {"bbox", to_json(o.box)}});
      }
      v["ocr_boxes"] = std::move(boxes);
    }
    if (e.human_box) v["human_box"] = to_json(*e.human_box);
    if (e.width) v["width"] = *e.width;
    if (e.height) v["height"] = *e.height;
    os << v.dump() << '\n';
  }
  write_file_atomically(path, os.str());
}

ImageSize entry_size(const ManifestEntry& entry) {
  if (entry.width && entry.height) return {*entry.width, *entry.height};
  return probe_image_size(entry.image_path);
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kNone: return "none";
    case Method::kHuman: return "human";
    case Method::kGrad: return "grad";
    case Method::kClipW: return "clip-w";
    case Method::kClipR: return "clip-r";
  }
  return "none";
}

Method parse_method(std::string_view s) {
  for (auto m : {Method::kNone, Method::kHuman, Method::kGrad, Method::kClipW,
                 Method::kClipR}) {
    if (to_string(m) == s) return m;
  }
  throw FormatError("unknown method '" + std::string(s) + "'");
}

json to_json(const PredictionRecord& rec) {
  json v;
  v["question_id"] = rec.question_id;
  v["method"] = std::string(to_string(rec.method));
  v["box"] = rec.box ? to_json(*rec.box) : json(nullptr);
  if (rec.answer) v["answer"] = *rec.answer;
  if (rec.error) v["error"] = *rec.error;
  if (!rec.trace.empty()) {
    json t = json::array();
    for (const auto& b : rec.trace) t.push_back(to_json(b));
    v["trace"] = std::move(t);
  }
  return v;
}

PredictionRecord prediction_from_json(const json& v) {
  PredictionRecord rec;
  rec.question_id = id_from_json(require(v, "question_id", 0), 0);
  rec.method = parse_method(require_string(v, "method", 0));
  if (const auto it = v.find("box"); it != v.end() && !it->is_null()) {
    rec.box = bbox_from_json(*it);
  }
  if (const auto it = v.find("answer"); it != v.end() && !it->is_null()) {
    if (!it->is_string()) throw FormatError("answer must be a string");
    rec.answer = it->get<std::string>();
  }
  if (const auto it = v.find("error"); it != v.end() && !it->is_null()) {
    rec.error = it->is_string() ? it->get<std::string>() : it->dump();
  }
  if (const auto it = v.find("trace"); it != v.end() && it->is_array()) {
    for (const auto& b : *it) rec.trace.push_back(bbox_from_json(b));
  }
  return rec;
}

std::vector<PredictionRecord> parse_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  for_each_json_line(in, [&](const json& v, std::size_t line_no) {
    try {
      out.push_back(prediction_from_json(v));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

std::vector<PredictionRecord> load_predictions(const fs::path& path) {
  auto in = open_in(path);
  return parse_predictions(in);
}

void save_predictions(const std::vector<PredictionRecord>& records,
                      const fs::path& path) {
  std::ostringstream os;
  for (const auto& r : records) os << to_json(r).dump() << '\n';
  write_file_atomically(path, os.str());
}

bool id_less(std::string_view a, std::string_view b) {
  const bool da = all_digits(a), db = all_digits(b);
  if (da != db) return da;
  if (da) {
    const auto strip = [](std::string_view s) {
      const auto p = s.find_first_not_of('0');
      return p == std::string_view::npos ? std::string_view{} : s.substr(p);
    };
    const auto sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

void write_file_atomically(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

}  // namespace vcrop::harness
