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

#include "vcrop/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "vcrop/errors.hpp"

namespace vcrop::harness {

using nlohmann::json;

namespace {

class Section {
 public:
  Section(const json& doc, const char* name) : name_(name) {
    if (const auto it = doc.find(name); it != doc.end()) {
      if (!it->is_object()) {
        throw InvalidArgument(std::string("config section '") + name +
                              "' must be an object");
      }
      obj_ = &*it;
    }
  }

  template <typename T>
  void read(const char* key, T& field) {
    if (!obj_) return;
    const auto it = obj_->find(key);
    if (it == obj_->end()) return;
    ++used_;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw InvalidArgument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw InvalidArgument("expected an integer");
      } else {
        if (!it->is_number()) throw InvalidArgument("expected a number");
      }
      field = it->get<T>();
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("config ") + name_ + "." + key + ": " +
                            e.what());
    }
  }

  bool has(const char* key) const { return obj_ && obj_->contains(key); }

  void finish() const {
    if (obj_ && used_ != obj_->size()) {
      for (const auto& [k, _] : obj_->items()) {
        (void)_;
        if (!known(k)) {
          throw InvalidArgument(std::string("unknown config key ") + name_ + "." + k);
        }
      }
    }
  }

  void set_known(std::vector<std::string> keys) { known_ = std::move(keys); }

 private:
  bool known(const std::string& k) const {
    return std::find(known_.begin(), known_.end(), k) != known_.end();
  }

  const char* name_;
  const json* obj_ = nullptr;
  std::size_t used_ = 0;
  std::vector<std::string> known_;
};

}  // namespace

CropConfig parse_crop_config(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [k, _] : doc.items()) {
    (void)_;
    if (k != "grad" && k != "clip_w" && k != "clip_r") {
      throw InvalidArgument("unknown config section '" + k + "'");
    }
  }
  CropConfig cfg;

  Section g(doc, "grad");
  g.set_known({"k_discard", "kernel_size", "sigma", "patch_size", "n_pool",
               "expansion", "connectivity", "enable_highlighting",
               "enable_highpass", "max_highlight_iters"});
  g.read("k_discard", cfg.grad.k_discard);
  g.read("kernel_size", cfg.grad.kernel_size);
  if (g.has("kernel_size") && !g.has("sigma")) {
    cfg.grad.sigma = default_sigma(cfg.grad.kernel_size);
  }
  g.read("sigma", cfg.grad.sigma);
  g.read("patch_size", cfg.grad.patch_size);
  g.read("n_pool", cfg.grad.n_pool);
  g.read("expansion", cfg.grad.expansion);
  int connectivity = static_cast<int>(cfg.grad.connectivity);
  g.read("connectivity", connectivity);
  if (connectivity != 4 && connectivity != 8) {
    throw InvalidArgument("config grad.connectivity must be 4 or 8");
  }
  cfg.grad.connectivity = static_cast<grad::Connectivity>(connectivity);
  g.read("enable_highlighting", cfg.grad.enable_highlighting);
  g.read("enable_highpass", cfg.grad.enable_highpass);
  g.read("max_highlight_iters", cfg.grad.max_highlight_iters);
  g.finish();

  Section w(doc, "clip_w");
  w.set_known({"patch_size", "window_patches", "stride", "threshold",
               "max_highlight_iters"});
  w.read("patch_size", cfg.window.patch_size);
  w.read("window_patches", cfg.window.window_patches);
  w.read("stride", cfg.window.stride);
  w.read("threshold", cfg.window.threshold);
  w.read("max_highlight_iters", cfg.window.max_highlight_iters);
  w.finish();

  Section r(doc, "clip_r");
  r.set_known({"ratio", "iterations", "min_side"});
  r.read("ratio", cfg.recursive.ratio);
  r.read("iterations", cfg.recursive.iterations);
  r.read("min_side", cfg.recursive.min_side);
  r.finish();

  cfg.grad.validate();
  cfg.window.validate();
  cfg.recursive.validate();
  return cfg;
}

CropConfig load_crop_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path.string() + " is not JSON: " + e.what());
  }
  return parse_crop_config(doc);
}

}  // namespace vcrop::harness
