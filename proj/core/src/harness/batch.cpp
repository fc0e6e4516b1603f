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

#include "vcrop/harness/batch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "vcrop/gradcrop.hpp"
#include "vcrop/image_io.hpp"
#include "vcrop/simcrop.hpp"

namespace vcrop::harness {

namespace fs = std::filesystem;

namespace {

struct IdLess {
  bool operator()(const std::string& a, const std::string& b) const {
    return id_less(a, b);
  }
};

class Runner {
 public:
  Runner(const Manifest& manifest, const BatchOptions& options)
      : manifest_(manifest), options_(options) {}

  BatchResult run() {
    validate();
    load_progress();

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < manifest_.size(); ++i) {
      const auto it = done_.find(manifest_[i].question_id);
      if (it == done_.end() || it->second.error) todo.push_back(i);
    }

    const std::size_t workers =
        std::clamp<std::size_t>(options_.workers, 1, std::max<std::size_t>(1, todo.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] { work(todo); });
    }
    for (auto& t : pool) t.join();

    if (abort_) {
      save_progress();
      std::rethrow_exception(abort_);
    }

    BatchResult result;
    for (const auto& e : manifest_) {
      auto rec = done_.at(e.question_id);
      if (rec.error) ++result.errors;
      result.records.push_back(std::move(rec));
    }
    std::sort(result.records.begin(), result.records.end(),
              [](const auto& a, const auto& b) { return id_less(a.question_id, b.question_id); });
    return result;
  }

 private:
  void validate() const {
    const auto m = options_.method;
    if (m == Method::kGrad && !options_.bundles_dir) {
      throw InvalidArgument("grad cropping needs a bundles directory");
    }
    if ((m == Method::kClipW || m == Method::kClipR) && !options_.scorer_factory) {
      throw InvalidArgument("clip cropping needs a scorer");
    }
    options_.config.grad.validate();
    options_.config.window.validate();
    options_.config.recursive.validate();
  }

  void load_progress() {
    if (!options_.progress_file || !fs::exists(*options_.progress_file)) return;
    std::set<std::string> wanted;
    for (const auto& e : manifest_) wanted.insert(e.question_id);
    for (auto& rec : load_predictions(*options_.progress_file)) {
      if (rec.method == options_.method && wanted.count(rec.question_id)) {
        done_[rec.question_id] = std::move(rec);
      }
    }
  }

  // Caller holds mu_.
  void save_progress() {
    if (!options_.progress_file) return;
    std::ostringstream os;
    for (const auto& [_, rec] : done_) os << to_json(rec).dump() << '\n';
    write_file_atomically(*options_.progress_file, os.str());
  }

  void work(const std::vector<std::size_t>& todo) {
    std::unique_ptr<sim::Scorer> scorer;
    for (;;) {
      if (aborting_) return;
      const auto k = next_.fetch_add(1);
      if (k >= todo.size()) return;
      const auto& entry = manifest_[todo[k]];
      PredictionRecord rec;
      try {
        if (!scorer && options_.scorer_factory &&
            (options_.method == Method::kClipW || options_.method == Method::kClipR)) {
          scorer = options_.scorer_factory();
        }
        rec = crop_one(entry, scorer.get());
      } catch (const TransportError& e) {
        std::lock_guard lock(mu_);
        if (!abort_) {
          abort_ = std::make_exception_ptr(BatchAborted(
              "scorer failed on " + entry.question_id + ": " + e.what()));
        }
        aborting_ = true;
        return;
      } catch (const std::exception& e) {
        rec.question_id = entry.question_id;
        rec.method = options_.method;
        rec.box.reset();
        rec.trace.clear();
        rec.error = e.what();
      }
      std::lock_guard lock(mu_);
      done_[entry.question_id] = std::move(rec);
      try {
        save_progress();
      } catch (const std::exception& e) {
        if (!abort_) {
          abort_ = std::make_exception_ptr(
              IoError(std::string("cannot save progress: ") + e.what()));
        }
        aborting_ = true;
        return;
      }
    }
  }

  PredictionRecord crop_one(const ManifestEntry& entry, sim::Scorer* scorer) const {
    PredictionRecord rec;
    rec.question_id = entry.question_id;
    rec.method = options_.method;
    const auto size = entry_size(entry);
    const sim::ImageRef ref{entry.image_path.string(), size.width, size.height};

    switch (options_.method) {
      case Method::kNone:
        rec.box = ref.full_box();
        break;
      case Method::kHuman:
        if (!entry.human_box) throw InvalidArgument("entry has no human box");
        if (!entry.human_box->valid_within(size.width, size.height)) {
          throw InvalidArgument("human box " + to_string(*entry.human_box) +
                                " is outside the image");
        }
        rec.box = *entry.human_box;
        break;
      case Method::kGrad: {
        const auto path = *options_.bundles_dir / (entry.question_id + ".vcgb");
        if (!fs::exists(path)) throw IoError("missing bundle " + path.string());
        const auto bundle = read_bundle(path);
        const auto img = read_image(entry.image_path);
        rec.box = grad::grad_crop(img, bundle, options_.config.grad);
        break;
      }
      case Method::kClipW:
        rec.box = sim::clip_w_crop(ref, entry.question, *scorer, options_.config.window);
        break;
      case Method::kClipR: {
        auto r = sim::clip_r_crop_traced(ref, entry.question, *scorer,
                                         options_.config.recursive);
        rec.box = r.box;
        rec.trace = std::move(r.trace);
        break;
      }
    }
    if (options_.crops_dir) {
      fs::create_directories(*options_.crops_dir);
      write_image(crop_image(read_image(entry.image_path), *rec.box),
                  *options_.crops_dir / (entry.question_id + ".png"));
    }
    return rec;
  }

  const Manifest& manifest_;
  const BatchOptions& options_;
  std::mutex mu_;
  std::map<std::string, PredictionRecord, IdLess> done_;
  std::atomic<std::size_t> next_{0};
  std::atomic<bool> aborting_{false};
  std::exception_ptr abort_;
};

}  // namespace

BatchResult run_crop_batch(const Manifest& manifest, const BatchOptions& options) {
  return Runner(manifest, options).run();
}

}  // namespace vcrop::harness
