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

#include "vcrop/harness/overlay.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "vcrop/errors.hpp"

namespace vcrop::harness {
namespace {

// 3x5 glyphs, rows top to bottom, '1' = ink.
struct Glyph {
  char ch;
  const char* bits;
};

constexpr Glyph kFont[] = {
    {'0', "111101101101111"}, {'1', "010110010010111"}, {'2', "111001111100111"},
    {'3', "111001111001111"}, {'4', "101101111001001"}, {'5', "111100111001111"},
    {'6', "111100111101111"}, {'7', "111001001001001"}, {'8', "111101111101111"},
    {'9', "111101111001111"}, {'A', "010101111101101"}, {'B', "110101110101110"},
    {'C', "011100100100011"}, {'D', "110101101101110"}, {'E', "111100110100111"},
    {'F', "111100110100100"}, {'G', "011100101101011"}, {'H', "101101111101101"},
    {'I', "111010010010111"}, {'J', "001001001101010"}, {'K', "101101110101101"},
    {'L', "100100100100111"}, {'M', "101111111101101"}, {'N', "110101101101101"},
    {'O', "010101101101010"}, {'P', "110101110100100"}, {'Q', "010101101110011"},
    {'R', "110101110101101"}, {'S', "011100010001110"}, {'T', "111010010010010"},
    {'U', "101101101101111"}, {'V', "101101101101010"}, {'W', "101101111111101"},
    {'X', "101101010101101"}, {'Y', "101101010010010"}, {'Z', "111001010100111"},
    {'-', "000000111000000"}, {'+', "000010111010000"}, {'_', "000000000000111"},
    {'.', "000000000000010"}, {':', "000010000010000"}, {'/', "001001010100100"},
};

const char* glyph_bits(char c) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& g : kFont) {
    if (g.ch == up) return g.bits;
  }
  return nullptr;
}

constexpr int kBorder = 2;

}  // namespace

std::array<float, 3> label_color(std::string_view label) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : label) {
    h ^= c;
    h *= 16777619u;
  }
  const double hue = (h % 360u) / 60.0;
  const double x = 1.0 - std::fabs(std::fmod(hue, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hue)) {
    case 0: r = 1; g = x; break;
    case 1: r = x; g = 1; break;
    case 2: g = 1; b = x; break;
    case 3: g = x; b = 1; break;
    case 4: r = x; b = 1; break;
    default: r = 1; b = x; break;
  }
  return {static_cast<float>(r), static_cast<float>(g), static_cast<float>(b)};
}

ImageTensor render_overlay(const ImageTensor& img,
                           const std::vector<LabeledBox>& boxes) {
  for (const auto& lb : boxes) {
    if (!lb.box.valid_within(img.width(), img.height())) {
      throw InvalidArgument("overlay box " + to_string(lb.box) +
                            " is outside the image");
    }
  }
  ImageTensor out = img;
  for (const auto& lb : boxes) {
    const auto color = label_color(lb.label);
    const auto paint = [&](int x, int y) {
      for (int c = 0; c < 3; ++c) out.set(c, x, y, color[c]);
    };
    const BBox& b = lb.box;
    for (int y = b.y0; y < b.y1; ++y) {
      for (int x = b.x0; x < b.x1; ++x) {
        const bool edge = x < b.x0 + kBorder || x >= b.x1 - kBorder ||
                          y < b.y0 + kBorder || y >= b.y1 - kBorder;
        if (edge) paint(x, y);
      }
    }
    // Text starts one pixel inside the border and is clipped to the box.
    int pen_x = b.x0 + kBorder + 1;
    const int pen_y = b.y0 + kBorder + 1;
    for (char ch : lb.label) {
      if (const char* bits = glyph_bits(ch)) {
        for (int gy = 0; gy < 5; ++gy) {
          for (int gx = 0; gx < 3; ++gx) {
            if (bits[gy * 3 + gx] != '1') continue;
            const int x = pen_x + gx, y = pen_y + gy;
            if (x < b.x1 - kBorder && y < b.y1 - kBorder) paint(x, y);
          }
        }
      }
      pen_x += 4;
    }
  }
  return out;
}

}  // namespace vcrop::harness
