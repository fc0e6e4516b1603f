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

#include "vcrop/gradient_bundle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "vcrop/errors.hpp"

namespace vcrop {
namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) |
           ((v & 0xFF0000u) >> 8) | (v >> 24);
  }
  return v;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_plane(std::ostream& out, const std::vector<float>& plane) {
  for (float f : plane) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

void read_exact(std::istream& in, void* dst, std::size_t n, const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(std::string("VCGB truncated while reading ") + what);
  }
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  read_exact(in, &v, sizeof v, what);
  return to_le(v);
}

std::vector<float> get_plane(std::istream& in, std::size_t n,
                             const char* what) {
  std::vector<std::uint32_t> raw(n);
  read_exact(in, raw.data(), n * sizeof(std::uint32_t), what);
  std::vector<float> plane(n);
  for (std::size_t i = 0; i < n; ++i) {
    plane[i] = std::bit_cast<float>(to_le(raw[i]));
  }
  return plane;
}

}  // namespace

void GradientBundle::validate() const {
  if (width < 1 || height < 1) {
    throw InvalidArgument("gradient bundle dimensions must be >= 1");
  }
  if (!std::isfinite(loss)) {
    throw InvalidArgument("gradient bundle loss must be finite");
  }
  const auto n = static_cast<std::size_t>(width) * height;
  for (const auto* plane : {&grad_r, &grad_g, &grad_b}) {
    if (plane->size() != n) {
      throw InvalidArgument("gradient plane size " +
                            std::to_string(plane->size()) + " != " +
                            std::to_string(width) + "x" +
                            std::to_string(height));
    }
    for (float v : *plane) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("gradient plane holds a non-finite value");
      }
    }
  }
}

void write_bundle(const GradientBundle& bundle, std::ostream& out) {
  bundle.validate();
  out.write(kBundleMagic, sizeof kBundleMagic);
  put_u32(out, kBundleVersion);
  put_u32(out, static_cast<std::uint32_t>(bundle.width));
  put_u32(out, static_cast<std::uint32_t>(bundle.height));
  put_plane(out, bundle.grad_r);
  put_plane(out, bundle.grad_g);
  put_plane(out, bundle.grad_b);

  nlohmann::json meta = bundle.extra.is_object() ? bundle.extra
                                                 : nlohmann::json::object();
  meta["question"] = bundle.question;
  meta["answer"] = bundle.answer;
  meta["loss"] = bundle.loss;
  const std::string text = meta.dump();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing gradient bundle");
}

void write_bundle(const GradientBundle& bundle,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_bundle(bundle, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

GradientBundle read_bundle(std::istream& in) {
  char magic[4];
  read_exact(in, magic, sizeof magic, "magic");
  if (std::memcmp(magic, kBundleMagic, sizeof magic) != 0) {
    throw FormatError("not a VCGB file (bad magic)");
  }
  const auto version = get_u32(in, "version");
  if (version != kBundleVersion) {
    throw FormatError("unsupported VCGB version " + std::to_string(version));
  }
  GradientBundle b;
  const auto w = get_u32(in, "width");
  const auto h = get_u32(in, "height");
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
    throw FormatError("VCGB dimensions out of range");
  }
  b.width = static_cast<int>(w);
  b.height = static_cast<int>(h);
  const auto n = static_cast<std::size_t>(w) * h;
  b.grad_r = get_plane(in, n, "R plane");
  b.grad_g = get_plane(in, n, "G plane");
  b.grad_b = get_plane(in, n, "B plane");

  const auto json_len = get_u32(in, "metadata length");
  std::string text(json_len, '\0');
  read_exact(in, text.data(), json_len, "metadata");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after VCGB metadata");
  }

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("VCGB metadata is not JSON: ") + e.what());
  }
  if (!meta.is_object() || !meta.contains("question") ||
      !meta.contains("answer") || !meta.contains("loss") ||
      !meta["question"].is_string() || !meta["answer"].is_string() ||
      !meta["loss"].is_number()) {
    throw FormatError(
        "VCGB metadata must be an object with question, answer and loss");
  }
  b.question = meta["question"].get<std::string>();
  b.answer = meta["answer"].get<std::string>();
  b.loss = meta["loss"].get<double>();
  meta.erase("question");
  meta.erase("answer");
  meta.erase("loss");
  b.extra = std::move(meta);

  try {
    b.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return b;
}

GradientBundle read_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_bundle(in);
}

}  // namespace vcrop
