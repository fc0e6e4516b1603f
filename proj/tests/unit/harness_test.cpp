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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <atomic>
#include <bit>
#include <cstring>
#include <deque>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "datasets.hpp"
#include "synthetic.hpp"
#include "vcrop/errors.hpp"
#include "vcrop/gradient_bundle.hpp"
#include "vcrop/harness/batch.hpp"
#include "vcrop/harness/config.hpp"
#include "vcrop/harness/overlay.hpp"
#include "vcrop/harness/subsets.hpp"
#include "vcrop/image_io.hpp"
#include "vcrop/metrics.hpp"
#include "vcrop/scorer.hpp"

namespace vcrop::harness {
namespace {

using nlohmann::json;
using testing::TempDir;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// ------------------------------------------------------------------ VCGB

GradientBundle random_bundle(std::mt19937_64& rng) {
  std::normal_distribution<float> g(0.f, 1e-3f);
  GradientBundle b;
  b.width = 1 + static_cast<int>(rng() % 40);
  b.height = 1 + static_cast<int>(rng() % 40);
  for (auto* p : {&b.grad_r, &b.grad_g, &b.grad_b}) {
    p->resize(static_cast<std::size_t>(b.width) * b.height);
    for (auto& v : *p) v = g(rng);
  }
  // A few awkward floats.
  b.grad_r[0] = -0.f;
  if (b.grad_g.size() > 1) b.grad_g[1] = std::numeric_limits<float>::denorm_min();
  b.question = "what colour is the sign? \xe2\x9c\x93";
  b.answer = "red";
  b.loss = 1.0 / 3.0 + static_cast<double>(rng() % 1000);
  b.extra = json{{"model", "m-" + std::to_string(rng() % 100)}, {"scale", 0.5}};
  return b;
}

std::string serialize(const GradientBundle& b) {
  std::ostringstream os(std::ios::binary);
  write_bundle(b, os);
  return os.str();
}

GradientBundle deserialize(const std::string& s) {
  std::istringstream is(s, std::ios::binary);
  return read_bundle(is);
}

bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

TEST(Bundle, RoundTripIsBitExact) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto b = random_bundle(rng);
    const auto bytes = serialize(b);
    const auto back = deserialize(bytes);
    ASSERT_EQ(back.width, b.width);
    ASSERT_EQ(back.height, b.height);
    ASSERT_TRUE(same_bits(back.grad_r, b.grad_r));
    ASSERT_TRUE(same_bits(back.grad_g, b.grad_g));
    ASSERT_TRUE(same_bits(back.grad_b, b.grad_b));
    ASSERT_EQ(back.question, b.question);
    ASSERT_EQ(back.answer, b.answer);
    ASSERT_EQ(std::bit_cast<std::uint64_t>(back.loss), std::bit_cast<std::uint64_t>(b.loss));
    ASSERT_EQ(back.extra, b.extra);
    ASSERT_EQ(serialize(back), bytes);
  }
}

TEST(Bundle, HeaderLayout) {
  GradientBundle b;
  b.width = 2;
  b.height = 1;
  b.grad_r = {1.f, 2.f};
  b.grad_g = {3.f, 4.f};
  b.grad_b = {5.f, 6.f};
  b.answer = "x";
  const auto bytes = serialize(b);
  ASSERT_GE(bytes.size(), 16u + 24u + 4u);
  EXPECT_EQ(bytes.substr(0, 4), "VCGB");
  const auto u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(bytes[off + k]);
    return v;
  };
  EXPECT_EQ(u32(4), 1u);
  EXPECT_EQ(u32(8), 2u);
  EXPECT_EQ(u32(12), 1u);
  EXPECT_EQ(u32(16), std::bit_cast<std::uint32_t>(1.f));
  EXPECT_EQ(u32(36), std::bit_cast<std::uint32_t>(6.f));
  const auto len = u32(40);
  ASSERT_EQ(bytes.size(), 44u + len);
  const auto meta = json::parse(bytes.substr(44));
  EXPECT_EQ(meta["answer"], "x");
  EXPECT_EQ(meta["loss"], 0.0);
}

TEST(Bundle, RejectsCorruptInput) {
  std::mt19937_64 rng(12);
  auto b = random_bundle(rng);
  b.width = 3;
  b.height = 2;
  for (auto* p : {&b.grad_r, &b.grad_g, &b.grad_b}) p->assign(6, 0.25f);
  const auto good = serialize(b);

  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(deserialize(bad), FormatError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(deserialize(bad), FormatError);
  for (std::size_t n = 0; n < good.size(); ++n) {
    EXPECT_THROW(deserialize(good.substr(0, n)), FormatError) << "prefix " << n;
  }
  EXPECT_THROW(deserialize(good + "x"), FormatError);

  bad = good;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bad.data() + 16, &nan, 4);
  EXPECT_THROW(deserialize(bad), FormatError);

  bad = good;
  bad.replace(bad.size() - 1, 1, "!");  // break the closing brace
  EXPECT_THROW(deserialize(bad), FormatError);

  bad = good;
  std::memset(bad.data() + 8, 0, 4);  // width 0
  EXPECT_THROW(deserialize(bad), FormatError);
}

TEST(Bundle, WriteValidates) {
  GradientBundle b;
  b.width = 2;
  b.height = 2;
  b.grad_r.assign(4, 0.f);
  b.grad_g.assign(4, 0.f);
  b.grad_b.assign(3, 0.f);
  EXPECT_THROW(serialize(b), InvalidArgument);
  b.grad_b.assign(4, std::numeric_limits<float>::infinity());
  EXPECT_THROW(serialize(b), InvalidArgument);
}

TEST(Bundle, FileRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(13);
  const auto b = random_bundle(rng);
  write_bundle(b, dir / "x.vcgb");
  EXPECT_EQ(read_bundle(dir / "x.vcgb"), b);
  EXPECT_THROW(read_bundle(dir / "missing.vcgb"), IoError);
}

// -------------------------------------------------------------- protocol

class ScriptedChannel final : public sim::LineChannel {
 public:
  using Script = std::function<void(const json& request, std::deque<std::string>& replies)>;
  explicit ScriptedChannel(Script script) : script_(std::move(script)) {}

  void write_line(std::string_view line) override {
    written.emplace_back(line);
    script_(json::parse(line), replies_);
  }
  std::optional<std::string> read_line() override {
    if (replies_.empty()) return std::nullopt;
    auto s = replies_.front();
    replies_.pop_front();
    return s;
  }
  void close_write() override {}

  std::vector<std::string> written;

 private:
  Script script_;
  std::deque<std::string> replies_;
};

ScriptedChannel::Script hello_then(bool pipeline,
                                   std::function<void(const json&, std::deque<std::string>&)> on_score) {
  return [pipeline, on_score](const json& req, std::deque<std::string>& out) {
    if (req["op"] == "hello") {
      out.push_back(json{{"op", "hello"}, {"version", 1}, {"pipeline", pipeline}}.dump());
    } else if (req["op"] == "score") {
      on_score(req, out);
    }
  };
}

std::unique_ptr<sim::ScorerSession> scripted_session(ScriptedChannel::Script script,
                                                     ScriptedChannel** raw = nullptr) {
  auto ch = std::make_unique<ScriptedChannel>(std::move(script));
  if (raw) *raw = ch.get();
  return std::make_unique<sim::ScorerSession>(std::move(ch));
}

const sim::ImageRef kRef{"img.png", 64, 64};
const std::vector<BBox> kRegions{{0, 0, 10, 10}, {5, 5, 20, 20}, {0, 0, 64, 64}};

TEST(Protocol, RequestShapeAndScores) {
  ScriptedChannel* ch = nullptr;
  auto s = scripted_session(hello_then(false,
                                       [](const json& req, auto& out) {
                                         out.push_back(json{{"id", req["id"]},
                                                            {"score", req["bbox"][2].get<int>() / 100.0},
                                                            {"extra", "ignored"}}
                                                           .dump());
                                       }),
                            &ch);
  EXPECT_FALSE(s->pipelined());
  const auto scores = s->score(kRef, kRegions, "a sign");
  EXPECT_EQ(scores, (std::vector<double>{0.10, 0.20, 0.64}));
  ASSERT_EQ(ch->written.size(), 4u);
  EXPECT_EQ(json::parse(ch->written[0]), (json{{"op", "hello"}, {"version", 1}}));
  const auto req = json::parse(ch->written[2]);
  EXPECT_EQ(req["id"], 2);
  EXPECT_EQ(req["op"], "score");
  EXPECT_EQ(req["image"], "img.png");
  EXPECT_EQ(req["bbox"], json::array({5, 5, 20, 20}));
  EXPECT_EQ(req["prompt"], "a sign");
  EXPECT_EQ(s->requests_sent(), 3u);
  EXPECT_EQ(s->responses_received(), 3u);
  s->shutdown();
  s->shutdown();
  EXPECT_EQ(json::parse(ch->written.back()), (json{{"op", "shutdown"}}));
  EXPECT_EQ(ch->written.size(), 5u);
  EXPECT_THROW(s->score(kRef, kRegions, "x"), TransportError);
}

TEST(Protocol, PipelinedResponsesMayArriveOutOfOrder) {
  // Hold every request and answer the batch in reverse once all are in.
  auto held = std::make_shared<std::vector<json>>();
  auto script = hello_then(true, [held](const json& req, auto& out) {
    held->push_back(req);
    if (held->size() == 3) {
      for (auto it = held->rbegin(); it != held->rend(); ++it) {
        out.push_back(json{{"id", (*it)["id"]}, {"score", (*it)["bbox"][0].get<int>()}}.dump());
      }
      held->clear();
    }
  });
  auto s = scripted_session(script);
  EXPECT_TRUE(s->pipelined());
  EXPECT_EQ(s->score(kRef, kRegions, "p"), (std::vector<double>{0, 5, 0}));
}

TEST(Protocol, HandshakeFailures) {
  const auto hello_reply = [](json reply) {
    return [reply](const json&, std::deque<std::string>& out) { out.push_back(reply.dump()); };
  };
  EXPECT_THROW(scripted_session(hello_reply({{"op", "hello"}, {"version", 2}})), ProtocolError);
  EXPECT_THROW(scripted_session(hello_reply({{"op", "hi"}, {"version", 1}})), ProtocolError);
  EXPECT_THROW(scripted_session(hello_reply({{"op", "hello"}, {"version", 1}, {"pipeline", "yes"}})),
               ProtocolError);
  EXPECT_THROW(scripted_session([](const json&, auto& out) { out.push_back("not json"); }), ProtocolError);
  EXPECT_THROW(scripted_session([](const json&, auto&) {}), ProtocolError);
}

TEST(Protocol, BadResponsesBreakTheSession) {
  const std::vector<std::pair<std::string, std::function<void(const json&, std::deque<std::string>&)>>> cases{
      {"unknown id", [](const json&, auto& out) { out.push_back(R"({"id":999,"score":1})"); }},
      {"no id", [](const json&, auto& out) { out.push_back(R"({"score":1})"); }},
      {"no score", [](const json& r, auto& out) { out.push_back(json{{"id", r["id"]}}.dump()); }},
      {"string score",
       [](const json& r, auto& out) { out.push_back(json{{"id", r["id"]}, {"score", "high"}}.dump()); }},
      {"not json", [](const json&, auto& out) { out.push_back("{oops"); }},
      {"duplicate id",
       [](const json& r, auto& out) {
         out.push_back(json{{"id", r["id"]}, {"score", 1}}.dump());
         out.push_back(json{{"id", r["id"]}, {"score", 1}}.dump());
       }},
  };
  for (const auto& [name, on_score] : cases) {
    auto s = scripted_session(hello_then(false, on_score));
    EXPECT_THROW(s->score(kRef, kRegions, "p"), ProtocolError) << name;
    EXPECT_THROW(s->score(kRef, kRegions, "p"), TransportError) << name;
  }
}

TEST(Protocol, ErrorResponseAndClosedStreamAreTransportErrors) {
  auto err = scripted_session(hello_then(false, [](const json& r, auto& out) {
    out.push_back(json{{"id", r["id"]}, {"error", "no such image"}}.dump());
  }));
  try {
    err->score(kRef, kRegions, "p");
    FAIL() << "expected TransportError";
  } catch (const ProtocolError&) {
    FAIL() << "error responses are not protocol violations";
  } catch (const TransportError& e) {
    EXPECT_NE(std::string(e.what()).find("no such image"), std::string::npos);
  }
  auto closed = scripted_session(hello_then(false, [](const json&, auto&) {}));
  EXPECT_THROW(closed->score(kRef, kRegions, "p"), TransportError);
}

std::vector<json> serve(const std::string& input, int expect_status, bool pipeline = false) {
  std::istringstream in(input);
  std::ostringstream out;
  const auto fn = [](const std::string& image, const BBox& b, const std::string&) -> double {
    if (image == "boom") throw std::runtime_error("cannot load");
    return b.area();
  };
  EXPECT_EQ(sim::serve_scorer(in, out, fn, {.pipeline = pipeline}), expect_status) << input;
  std::vector<json> lines;
  std::istringstream replies(out.str());
  for (std::string l; std::getline(replies, l);) lines.push_back(json::parse(l));
  return lines;
}

TEST(Server, FullSession) {
  const auto r = serve(
      "{\"op\":\"hello\",\"version\":1}\n"
      "{\"id\":1,\"op\":\"score\",\"image\":\"a\",\"bbox\":[0,0,2,3],\"prompt\":\"p\"}\n"
      "\n"
      "{\"id\":2,\"op\":\"score\",\"image\":\"a\",\"bbox\":[0,0,1,1],\"prompt\":\"p\"}\r\n"
      "{\"op\":\"shutdown\"}\n"
      "{\"id\":3,\"op\":\"score\",\"image\":\"a\",\"bbox\":[0,0,1,1],\"prompt\":\"p\"}\n",
      0, true);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], (json{{"op", "hello"}, {"version", 1}, {"pipeline", true}}));
  EXPECT_EQ(r[1], (json{{"id", 1}, {"score", 6.0}}));
  EXPECT_EQ(r[2], (json{{"id", 2}, {"score", 1.0}}));
}

TEST(Server, MalformedLinesWithIdGetErrorResponses) {
  const auto r = serve(
      "{\"op\":\"hello\",\"version\":1}\n"
      "{\"id\":7,\"op\":\"score\",\"image\":\"a\",\"bbox\":[0,0,2,3],\"prompt\":\n"
      "{\"id\":8,\"op\":\"score\",\"image\":\"a\",\"bbox\":[2,0,1,3],\"prompt\":\"p\"}\n"
      "{\"id\":9,\"op\":\"score\",\"image\":\"a\",\"prompt\":\"p\"}\n"
      "{\"id\":10,\"op\":\"rank\"}\n"
      "{\"id\":11,\"op\":\"score\",\"image\":\"boom\",\"bbox\":[0,0,1,1],\"prompt\":\"p\"}\n"
      "{\"id\":12,\"op\":\"score\",\"image\":\"a\",\"bbox\":[0,0,1,1],\"prompt\":\"p\"}\n",
      0);
  ASSERT_EQ(r.size(), 7u);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(r[k]["id"], 6 + k);
    EXPECT_TRUE(r[k].contains("error")) << r[k].dump();
    EXPECT_FALSE(r[k].contains("score"));
  }
  EXPECT_EQ(r[6], (json{{"id", 12}, {"score", 1.0}}));
}

TEST(Server, UnrecoverableLinesAbort) {
  EXPECT_TRUE(serve("{\"op\":\"hello\",\"version\":1}\ngarbage\n{\"op\":\"shutdown\"}\n", 1).size() == 1);
  EXPECT_TRUE(serve("[1,2]\n", 1).empty());
  EXPECT_TRUE(serve("{\"op\":\"score\",\"image\":\"a\",\"bbox\":[0,0,1,1],\"prompt\":\"p\"}\n", 1).empty());
  const auto v2 = serve("{\"op\":\"hello\",\"version\":2}\n", 1);
  ASSERT_EQ(v2.size(), 1u);
  EXPECT_EQ(v2[0]["version"], 1);
}

std::string mock_cmd(const std::string& args) {
  return std::string("'") + VCROP_MOCK_SCORER + "' " + args;
}

TEST(MockScorer, FullSessionOverAProcess) {
  const BBox target{40, 60, 150, 170};
  for (const bool pipeline : {false, true}) {
    auto s = sim::spawn_scorer(mock_cmd("--target 40,60,150,170" + std::string(pipeline ? " --pipeline" : "")));
    EXPECT_EQ(s->pipelined(), pipeline);
    const auto wins = sim::enumerate_windows(224, 224);
    const auto scores = s->score({"x.png", 224, 224}, wins, "q");
    ASSERT_EQ(scores.size(), wins.size());
    for (std::size_t i = 0; i < wins.size(); ++i) {
      EXPECT_DOUBLE_EQ(scores[i], sim::overlap_score(wins[i], target));
    }
    EXPECT_EQ(s->requests_sent(), 81u);
    EXPECT_EQ(s->responses_received(), 81u);
    s->shutdown();
  }
}

TEST(MockScorer, DrivesClipCropsLikeAnInProcessScorer) {
  const BBox target{30, 20, 170, 150};
  auto remote = sim::spawn_scorer(mock_cmd("--pipeline --target 30,20,170,150"));
  sim::FunctionScorer local([&](const sim::ImageRef&, const BBox& b, const std::string&) {
    return sim::overlap_score(b, target);
  });
  const sim::ImageRef img{"x.png", 224, 224};
  EXPECT_EQ(sim::clip_w_crop(img, "q", *remote), sim::clip_w_crop(img, "q", local));
  EXPECT_EQ(sim::clip_r_crop_traced(img, "q", *remote).trace,
            sim::clip_r_crop_traced(img, "q", local).trace);
}

TEST(MockScorer, ExitStatusOnRawChannel) {
  {
    sim::ProcessChannel ch(mock_cmd("--constant 0.5"));
    ch.write_line(R"({"op":"hello","version":1})");
    EXPECT_EQ(json::parse(*ch.read_line())["pipeline"], false);
    ch.write_line(R"({"op":"shutdown"})");
    EXPECT_FALSE(ch.read_line().has_value());
    EXPECT_EQ(ch.wait(), 0);
  }
  {
    sim::ProcessChannel ch(mock_cmd("--constant 0.5"));
    ch.write_line("no id here");
    EXPECT_FALSE(ch.read_line().has_value());
    EXPECT_EQ(ch.wait(), 1);
  }
  {
    sim::ProcessChannel ch(mock_cmd(""));
    EXPECT_EQ(ch.wait(), 2);
  }
}

TEST(MockScorer, TimeoutIsTransportError) {
  EXPECT_THROW(sim::spawn_scorer("sleep 5", std::chrono::milliseconds(200)), TransportError);
  // A child that exits before the handshake is a transport failure.
  EXPECT_THROW(sim::spawn_scorer("true"), TransportError);
}

// -------------------------------------------------------------- records

TEST(Records, ManifestParseAndSave) {
  TempDir dir;
  fs::create_directories(dir / "img");
  write_image(ImageTensor(8, 6), dir / "img/a.png");
  spit(dir / "m.jsonl",
       R"({"question_id": 17, "image_path": "img/a.png", "question": "q?", "human_answers": ["a","b"],)"
       R"( "ocr_boxes": [{"text": "hi", "bbox": [0,0,2,2]}], "human_box": [1,1,4,4]})"
       "\n\n"
       R"({"question_id": "x9", "image_id": 5, "image_path": ")" +
           (dir / "img/a.png").string() + R"(", "question": "", "human_answers": [], "width": 8, "height": 6})" + "\n");
  const auto m = load_manifest(dir / "m.jsonl");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].question_id, "17");
  EXPECT_EQ(m[0].image_path, fs::absolute(dir / "img/a.png").lexically_normal());
  EXPECT_EQ(m[0].ocr_boxes, (std::vector<OcrBox>{{"hi", {0, 0, 2, 2}}}));
  EXPECT_EQ(m[0].human_box, (BBox{1, 1, 4, 4}));
  EXPECT_EQ(entry_size(m[0]).width, 8);
  EXPECT_EQ(m[1].image_id, "5");
  EXPECT_EQ(m[1].width, 8);

  fs::create_directories(dir / "out");
  save_manifest(m, dir / "out/m2.jsonl");
  EXPECT_NE(slurp(dir / "out/m2.jsonl").find("\"../img/a.png\""), std::string::npos);
  EXPECT_EQ(load_manifest(dir / "out/m2.jsonl"), m);
}

TEST(Records, ManifestErrors) {
  const auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_manifest(in, "/", {.check_images = false});
  };
  const std::string ok = R"("image_path": "a.png", "question": "q", "human_answers": ["a"])";
  EXPECT_NO_THROW(parse("{\"question_id\": 1, " + ok + "}"));
  EXPECT_THROW(parse("{\"question_id\": 1, " + ok + "}\n{\"question_id\": \"1\", " + ok + "}"),
               FormatError);
  EXPECT_THROW(parse("{" + ok + "}"), FormatError);
  EXPECT_THROW(parse("{\"question_id\": 1, " + ok + ", \"human_box\": [0,0,0,5]}"), FormatError);
  EXPECT_THROW(parse("{\"question_id\": 1, " + ok + ", \"width\": -3}"), FormatError);
  EXPECT_THROW(parse("not json"), FormatError);
  std::istringstream in("{\"question_id\": 1, " + ok + "}");
  EXPECT_THROW(parse_manifest(in, "/definitely/missing"), FormatError);
}

TEST(Records, PredictionsRoundTrip) {
  TempDir dir;
  std::vector<PredictionRecord> recs(3);
  recs[0] = {"2", Method::kClipR, BBox{0, 0, 5, 5}, "yes", std::nullopt, {{0, 0, 9, 9}, {0, 0, 5, 5}}};
  recs[1] = {"10", Method::kGrad, std::nullopt, std::nullopt, "missing bundle", {}};
  recs[2] = {"a", Method::kNone, BBox{0, 0, 1, 1}, std::nullopt, std::nullopt, {}};
  save_predictions(recs, dir / "p.jsonl");
  EXPECT_EQ(load_predictions(dir / "p.jsonl"), recs);
  EXPECT_EQ(json::parse(to_json(recs[0]).dump())["box"], json::array({0, 0, 5, 5}));
  EXPECT_THROW(prediction_from_json(json{{"question_id", "1"}, {"method", "magic"}}), FormatError);
  for (auto m : {Method::kNone, Method::kHuman, Method::kGrad, Method::kClipW, Method::kClipR}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
}

TEST(Records, IdOrdering) {
  std::vector<std::string> ids{"10", "b", "2", "a", "1", "02"};
  std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) { return id_less(a, b); });
  EXPECT_EQ(ids, (std::vector<std::string>{"1", "02", "2", "10", "a", "b"}));
}

TEST(Records, BoxJson) {
  EXPECT_EQ(bbox_from_json(json::array({1, 2, 3, 4})), (BBox{1, 2, 3, 4}));
  EXPECT_THROW(bbox_from_json(json::array({1, 2, 3})), FormatError);
  EXPECT_THROW(bbox_from_json(json::array({1, 2, 3, 4.5})), FormatError);
  EXPECT_THROW(bbox_from_json(json::array({3, 2, 3, 4})), FormatError);
}

// -------------------------------------------------------------- config

TEST(Config, ParsesSectionsAndDerivesSigma) {
  const auto c = parse_crop_config(json::parse(R"({
    "grad": {"k_discard": 2, "kernel_size": 7, "connectivity": 8, "enable_highpass": false},
    "clip_w": {"window_patches": 4, "threshold": 0.6},
    "clip_r": {"ratio": 0.8, "iterations": 5}})"));
  EXPECT_EQ(c.grad.k_discard, 2.0);
  EXPECT_EQ(c.grad.kernel_size, 7);
  EXPECT_DOUBLE_EQ(c.grad.sigma, default_sigma(7));
  EXPECT_EQ(c.grad.connectivity, grad::Connectivity::kEight);
  EXPECT_FALSE(c.grad.enable_highpass);
  EXPECT_TRUE(c.grad.enable_highlighting);
  EXPECT_EQ(c.window.window_patches, 4);
  EXPECT_EQ(c.window.threshold, 0.6);
  EXPECT_EQ(c.recursive.ratio, 0.8);
  EXPECT_EQ(c.recursive.iterations, 5);
  EXPECT_EQ(c.recursive.min_side, 16);

  const auto explicit_sigma = parse_crop_config(json::parse(R"({"grad": {"kernel_size": 7, "sigma": 2}})"));
  EXPECT_EQ(explicit_sigma.grad.sigma, 2.0);
  EXPECT_EQ(parse_crop_config(json::object()).grad.sigma, 1.1);
}

TEST(Config, RejectsUnknownAndInvalid) {
  EXPECT_THROW(parse_crop_config(json::parse(R"({"grad": {"kdiscard": 1}})")), InvalidArgument);
  EXPECT_THROW(parse_crop_config(json::parse(R"({"clipw": {}})")), InvalidArgument);
  EXPECT_THROW(parse_crop_config(json::parse(R"({"clip_r": {"ratio": 1.5}})")), InvalidArgument);
  EXPECT_THROW(parse_crop_config(json::parse(R"({"grad": {"connectivity": 6}})")), InvalidArgument);
  EXPECT_THROW(parse_crop_config(json::parse(R"({"grad": {"patch_size": "16"}})")), InvalidArgument);
  EXPECT_THROW(load_crop_config("/definitely/missing.json"), IoError);
}

// -------------------------------------------------------------- subsets

TEST(Subsets, TextSubsetKeepsSingleBoxMatches) {
  const auto f = testing::text_subset_fixture();
  const auto kept = build_text_subset(f.manifest);
  ASSERT_EQ(kept.size(), f.expected.size());
  for (const auto& e : kept) {
    ASSERT_TRUE(f.expected.count(e.question_id)) << e.question_id;
    EXPECT_EQ(e.human_box, f.expected.at(e.question_id)) << e.question_id;
  }
  // Factor 1 attaches the OCR box itself.
  EXPECT_EQ(build_text_subset(f.manifest, 1.0)[0].human_box, (BBox{20, 20, 60, 40}));
}

TEST(Subsets, RandomSubsetIsReproducibleAndUnique) {
  Manifest big;
  for (int i = 0; i < 5000; ++i) big.push_back(testing::qa_entry(std::to_string(i), testing::ten("a")));
  std::shuffle(big.begin(), big.end(), std::mt19937_64(1));

  const auto a = build_random_subset(big, 1001, 42);
  const auto b = build_random_subset(big, 1001, 42);
  auto reordered = big;
  std::reverse(reordered.begin(), reordered.end());
  const auto c = build_random_subset(reordered, 1001, 42);
  const auto d = build_random_subset(big, 1001, 43);
  ASSERT_EQ(a.size(), 1001u);
  std::set<std::string> ids;
  for (const auto& e : a) ids.insert(e.question_id);
  EXPECT_EQ(ids.size(), 1001u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a, d);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), [](const auto& x, const auto& y) {
    return id_less(x.question_id, y.question_id);
  }));

  auto whole = build_random_subset(big, big.size(), 7);
  auto sorted = big;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return id_less(x.question_id, y.question_id); });
  EXPECT_EQ(whole, sorted);
  EXPECT_THROW(build_random_subset(big, big.size() + 1, 7), InvalidArgument);
  EXPECT_TRUE(build_random_subset(big, 0, 7).empty());
}

TEST(Subsets, SamplerFollowsDocumentedAlgorithm) {
  // Partial Fisher-Yates over ids 0..9 with an explicit generator.
  Manifest m;
  for (int i = 0; i < 10; ++i) m.push_back(testing::qa_entry(std::to_string(i), testing::ten("a")));
  std::vector<int> slots(10);
  std::iota(slots.begin(), slots.end(), 0);
  std::mt19937_64 rng(2024);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::uint64_t bound = 10 - i;
    std::uint64_t x;
    const std::uint64_t lim = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    do x = rng();
    while (x > lim);
    std::swap(slots[i], slots[i + x % bound]);
  }
  std::vector<int> want(slots.begin(), slots.begin() + 4);
  std::sort(want.begin(), want.end());
  std::vector<int> got;
  for (const auto& e : build_random_subset(m, 4, 2024)) got.push_back(std::stoi(e.question_id));
  EXPECT_EQ(got, want);
}

TEST(Subsets, UniformBelowIsUnbiasedEnough) {
  std::mt19937_64 rng(3);
  std::vector<int> counts(7);
  for (int i = 0; i < 70000; ++i) ++counts[uniform_below(rng, 7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
  EXPECT_THROW(uniform_below(rng, 0), InvalidArgument);
}

TEST(Subsets, FailureIntersection) {
  const auto f = testing::failure_fixture();
  EXPECT_EQ(failure_intersection(f.preds_a, f.preds_b, f.manifest), f.expected);
  // Oracle: per item, both answers miss every modal answer.
  std::vector<std::string> oracle;
  for (std::size_t i = 0; i < f.manifest.size(); ++i) {
    const auto modes = metrics::modal_answers(f.manifest[i].human_answers);
    const auto miss = [&](const std::string& a) {
      return std::find(modes.begin(), modes.end(), metrics::normalize_answer(a)) == modes.end();
    };
    if (miss(*f.preds_a[i].answer) && miss(*f.preds_b[i].answer)) oracle.push_back(f.manifest[i].question_id);
  }
  EXPECT_EQ(oracle, f.expected);
  EXPECT_TRUE(failure_intersection(f.preds_a, f.preds_a, Manifest{f.manifest[0]}).empty());

  auto short_b = f.preds_b;
  short_b.pop_back();
  short_b[0].answer.reset();
  try {
    failure_intersection(f.preds_a, short_b, f.manifest);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("B:1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("B:6"), std::string::npos) << msg;
  }
}

// -------------------------------------------------------------- batch

struct BlobWorkspace {
  TempDir dir;
  Manifest manifest;
  std::vector<testing::BlobCase> cases;

  explicit BlobWorkspace(int n) {
    fs::create_directories(dir / "bundles");
    for (int i = 0; i < n; ++i) {
      auto c = testing::make_blob_case(900 + i);
      const auto id = std::to_string(i);
      write_image(c.image, dir / (id + ".png"));
      write_bundle(c.bundle, dir / ("bundles/" + id + ".vcgb"));
      auto e = testing::qa_entry(id, testing::ten("blob"));
      e.image_path = dir / (id + ".png");
      e.width.reset();
      e.height.reset();
      e.human_box = c.blob_box;
      manifest.push_back(e);
      cases.push_back(std::move(c));
    }
  }
};

TEST(Batch, NoneAndHumanBaselines) {
  BlobWorkspace ws(3);
  const auto none = run_crop_batch(ws.manifest, {.method = Method::kNone});
  ASSERT_EQ(none.records.size(), 3u);
  EXPECT_EQ(none.errors, 0u);
  for (const auto& r : none.records) EXPECT_EQ(r.box, (BBox{0, 0, 224, 224}));

  auto m = ws.manifest;
  m[1].human_box.reset();
  const auto human = run_crop_batch(m, {.method = Method::kHuman});
  EXPECT_EQ(human.errors, 1u);
  EXPECT_EQ(human.records[0].box, ws.cases[0].blob_box);
  EXPECT_TRUE(human.records[1].error.has_value());
  EXPECT_FALSE(human.records[1].box.has_value());
}

TEST(Batch, GradBoxesHitBlobQuadrantAndWriteCrops) {
  BlobWorkspace ws(6);
  BatchOptions opt;
  opt.method = Method::kGrad;
  opt.bundles_dir = ws.dir / "bundles";
  opt.crops_dir = ws.dir / "crops";
  opt.workers = 3;
  const auto res = run_crop_batch(ws.manifest, opt);
  ASSERT_EQ(res.errors, 0u);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& r = res.records[i];
    ASSERT_EQ(r.question_id, std::to_string(i));
    const int cx = (r.box->x0 + r.box->x1) / 2, cy = (r.box->y0 + r.box->y1) / 2;
    EXPECT_EQ((cx >= 112) + 2 * (cy >= 112), ws.cases[i].quadrant) << i;
    const auto crop = read_image(ws.dir / ("crops/" + r.question_id + ".png"));
    EXPECT_EQ(crop.width(), r.box->width());
    EXPECT_EQ(crop.height(), r.box->height());
  }
}

TEST(Batch, MissingBundleIsAPerEntryError) {
  BlobWorkspace ws(3);
  fs::remove(ws.dir / "bundles/1.vcgb");
  spit(ws.dir / "bundles/2.vcgb", "VCGB");
  BatchOptions opt;
  opt.method = Method::kGrad;
  opt.bundles_dir = ws.dir / "bundles";
  const auto res = run_crop_batch(ws.manifest, opt);
  EXPECT_EQ(res.errors, 2u);
  EXPECT_FALSE(res.records[0].error.has_value());
  EXPECT_NE(res.records[1].error->find("missing bundle"), std::string::npos);
  EXPECT_NE(res.records[2].error->find("truncated"), std::string::npos);
  EXPECT_THROW(run_crop_batch(ws.manifest, {.method = Method::kGrad}), InvalidArgument);
  EXPECT_THROW(run_crop_batch(ws.manifest, {.method = Method::kClipW}), InvalidArgument);
}

Manifest sized_manifest(int n, std::uint64_t seed, std::map<std::string, BBox>* targets) {
  std::mt19937_64 rng(seed);
  Manifest m;
  for (int i = 0; i < n; ++i) {
    auto e = testing::qa_entry("q" + std::to_string(i), testing::ten("a"));
    e.image_path = "/imgs/" + std::to_string(i) + ".png";
    e.width = 224;
    e.height = 224;
    (*targets)[e.image_path.string()] = testing::make_clip_target(rng);
    m.push_back(e);
  }
  return m;
}

ScorerFactory local_factory(const std::map<std::string, BBox>& targets,
                            std::shared_ptr<std::atomic<int>> requests = nullptr) {
  return [targets, requests]() -> std::unique_ptr<sim::Scorer> {
    return std::make_unique<sim::FunctionScorer>(
        [targets, requests](const sim::ImageRef& img, const BBox& b, const std::string&) {
          if (requests) ++*requests;
          return sim::overlap_score(b, targets.at(img.path));
        });
  };
}

TEST(Batch, ClipRTraceThroughMockScorerProcess) {
  std::map<std::string, BBox> targets;
  const auto m = sized_manifest(4, 5, &targets);
  TempDir dir;
  std::ostringstream lines;
  for (const auto& [img, box] : targets) lines << json{{"image", img}, {"bbox", to_json(box)}}.dump() << '\n';
  spit(dir / "targets.jsonl", lines.str());

  BatchOptions opt;
  opt.method = Method::kClipR;
  opt.workers = 2;
  const auto cmd = mock_cmd("--targets '" + (dir / "targets.jsonl").string() + "'");
  opt.scorer_factory = [cmd]() -> std::unique_ptr<sim::Scorer> { return sim::spawn_scorer(cmd); };
  const auto res = run_crop_batch(m, opt);
  ASSERT_EQ(res.errors, 0u);
  for (const auto& r : res.records) {
    ASSERT_GE(r.trace.size(), 2u);
    EXPECT_LE(r.trace.size() - 1, 20u);
    EXPECT_EQ(r.trace.front(), (BBox{0, 0, 224, 224}));
    EXPECT_EQ(r.trace.back(), *r.box);
    for (std::size_t t = 1; t < r.trace.size(); ++t) EXPECT_TRUE(r.trace[t - 1].contains(r.trace[t]));
  }
}

TEST(Batch, OutputIndependentOfWorkersAndOrder) {
  std::map<std::string, BBox> targets;
  auto m = sized_manifest(12, 6, &targets);
  BatchOptions opt;
  opt.method = Method::kClipW;
  opt.scorer_factory = local_factory(targets);
  const auto one = run_crop_batch(m, opt);
  std::reverse(m.begin(), m.end());
  opt.workers = 5;
  const auto five = run_crop_batch(m, opt);
  EXPECT_EQ(one.records, five.records);
  EXPECT_EQ(one.records.front().question_id, "q0");
  // Non-numeric ids order lexicographically.
  EXPECT_EQ(one.records[3].question_id, "q11");
  EXPECT_EQ(one.records.back().question_id, "q9");
}

TEST(Batch, TransportFailureAbortsAndProgressResumes) {
  std::map<std::string, BBox> targets;
  const auto m = sized_manifest(6, 7, &targets);
  TempDir dir;
  // The mock knows every image but q3's, so it answers q3 with an error.
  std::ostringstream lines;
  for (const auto& [img, box] : targets) {
    if (img != "/imgs/3.png") lines << json{{"image", img}, {"bbox", to_json(box)}}.dump() << '\n';
  }
  spit(dir / "targets.jsonl", lines.str());

  BatchOptions opt;
  opt.method = Method::kClipW;
  opt.progress_file = dir / "progress.jsonl";
  const auto cmd = mock_cmd("--targets '" + (dir / "targets.jsonl").string() + "'");
  opt.scorer_factory = [cmd]() -> std::unique_ptr<sim::Scorer> { return sim::spawn_scorer(cmd); };
  EXPECT_THROW(run_crop_batch(m, opt), BatchAborted);

  const auto saved = load_predictions(dir / "progress.jsonl");
  ASSERT_EQ(saved.size(), 3u);
  EXPECT_EQ(saved[2].question_id, "q2");

  auto requests = std::make_shared<std::atomic<int>>(0);
  opt.scorer_factory = local_factory(targets, requests);
  const auto res = run_crop_batch(m, opt);
  EXPECT_EQ(res.errors, 0u);
  EXPECT_EQ(res.records.size(), 6u);
  EXPECT_EQ(requests->load(), 3 * 81);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(res.records[i], saved[i]);
  EXPECT_EQ(load_predictions(dir / "progress.jsonl"), res.records);
}

// -------------------------------------------------------------- overlay

ImageTensor gradient_image(int w, int h) {
  ImageTensor img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(0, x, y, 0.2f + 0.001f * x);
      img.set(1, x, y, 0.3f);
      img.set(2, x, y, 0.25f + 0.001f * y);
    }
  }
  return img;
}

TEST(Overlay, EmptyListLeavesImageUnchanged) {
  const auto img = gradient_image(30, 20);
  EXPECT_EQ(render_overlay(img, {}), img);
}

TEST(Overlay, OneUnlabeledBoxRecolorsExactlyItsBorder) {
  const auto img = gradient_image(40, 30);
  const BBox box{5, 4, 25, 20};
  const auto out = render_overlay(img, {{box, ""}});
  const auto color = label_color("");
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const bool inside = box.x0 <= x && x < box.x1 && box.y0 <= y && y < box.y1;
      const bool border = inside && (x < box.x0 + 2 || x >= box.x1 - 2 || y < box.y0 + 2 || y >= box.y1 - 2);
      for (int c = 0; c < 3; ++c) {
        ASSERT_EQ(out.at(c, x, y), border ? color[c] : img.at(c, x, y)) << x << "," << y;
      }
    }
  }
}

TEST(Overlay, LabelTextStaysInsideBoxAndLaterBoxesWin) {
  const auto img = gradient_image(60, 40);
  const BBox a{0, 0, 40, 30}, b{10, 0, 60, 30};
  const auto ab = render_overlay(img, {{a, "grad"}, {b, "clip-w"}});
  const auto ca = label_color("grad"), cb = label_color("clip-w");
  ASSERT_NE(ca, cb);
  // b's left border crosses a's interior and top border; b is drawn last.
  for (int y = 0; y < 30; ++y) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(ab.at(c, 10, y), cb[c]);
  }
  const auto ba = render_overlay(img, {{b, "clip-w"}, {a, "grad"}});
  for (int c = 0; c < 3; ++c) EXPECT_EQ(ba.at(c, 38, 10), ca[c]);

  // Off the border, pixels only change inside the box interior.
  const BBox lb{20, 10, 50, 30};
  const auto labeled = render_overlay(img, {{lb, "A1"}});
  int text = 0;
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 60; ++x) {
      const bool border = lb.x0 <= x && x < lb.x1 && lb.y0 <= y && y < lb.y1 &&
                          (x < lb.x0 + 2 || x >= lb.x1 - 2 || y < lb.y0 + 2 || y >= lb.y1 - 2);
      if (!border && labeled.at(0, x, y) != img.at(0, x, y)) {
        ++text;
        EXPECT_TRUE(x >= 22 && x < 48 && y >= 12 && y < 28) << x << "," << y;
      }
    }
  }
  EXPECT_GT(text, 8);
}

TEST(Overlay, Errors) {
  const auto img = gradient_image(10, 10);
  EXPECT_THROW(render_overlay(img, {{BBox{0, 0, 11, 5}, "x"}}), InvalidArgument);
  EXPECT_THROW(render_overlay(img, {{BBox{5, 5, 5, 8}, "x"}}), InvalidArgument);
  EXPECT_EQ(label_color("clip-r"), label_color("clip-r"));
}

// -------------------------------------------------------------- CLI

struct CliResult {
  int status;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + VCROP_CLI + "' " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  const int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

TEST(Cli, GradCropExitCodes) {
  BlobWorkspace ws(3);
  save_manifest(ws.manifest, ws.dir / "m.jsonl");
  const auto base = "grad-crop --manifest '" + (ws.dir / "m.jsonl").string() + "' --bundles-dir '" +
                    (ws.dir / "bundles").string() + "' --out '" + (ws.dir / "p.jsonl").string() + "'";
  EXPECT_EQ(run_cli(base).status, 0);
  EXPECT_EQ(load_predictions(ws.dir / "p.jsonl").size(), 3u);

  fs::remove(ws.dir / "bundles/2.vcgb");
  const auto fail = run_cli(base);
  EXPECT_EQ(fail.status, 1) << fail.output;
  const auto keep = run_cli(base + " --keep-going");
  EXPECT_EQ(keep.status, 0) << keep.output;
  EXPECT_NE(keep.output.find("1 entry failed"), std::string::npos) << keep.output;
  const auto preds = load_predictions(ws.dir / "p.jsonl");
  EXPECT_TRUE(preds[2].error.has_value());

  EXPECT_EQ(run_cli("grad-crop --manifest /missing.jsonl --bundles-dir x --out y").status, 2);
  EXPECT_NE(run_cli("no-such-command").status, 0);
}

TEST(Cli, ClipCropAbortsWithFatalStatus) {
  std::map<std::string, BBox> targets;
  TempDir dir;
  auto m = sized_manifest(2, 8, &targets);
  for (auto& e : m) {
    e.image_path = dir / (e.question_id + ".png");
    write_image(ImageTensor(224, 224), e.image_path);
  }
  save_manifest(m, dir / "m.jsonl");
  const auto base = "clip-w-crop --manifest '" + (dir / "m.jsonl").string() + "' --out '" +
                    (dir / "p.jsonl").string() + "' --scorer-cmd ";
  EXPECT_EQ(run_cli(base + "\"'" + VCROP_MOCK_SCORER + "' --target 0,0,100,100\"").status, 0);
  const auto bad = run_cli(base + "\"'" + VCROP_MOCK_SCORER + "' --targets /dev/null\"");
  EXPECT_EQ(bad.status, 2) << bad.output;
  EXPECT_NE(bad.output.find("aborted"), std::string::npos) << bad.output;
}

TEST(Cli, DatasetCommands) {
  TempDir dir;
  const auto write_with_images = [&](Manifest m, const std::string& name) {
    for (auto& e : m) {
      e.image_path = dir / (e.question_id + ".png");
      write_image(ImageTensor(*e.width, *e.height), e.image_path);
    }
    save_manifest(m, dir / name);
    return "'" + (dir / name).string() + "'";
  };
  const auto q = [&](const std::string& name) { return "'" + (dir / name).string() + "'"; };

  const auto tf = testing::text_subset_fixture();
  const auto text = run_cli("build-text-subset --manifest " + write_with_images(tf.manifest, "m.jsonl") +
                            " --out " + q("t.jsonl"));
  ASSERT_EQ(text.status, 0) << text.output;
  const auto kept = load_manifest(dir / "t.jsonl");
  ASSERT_EQ(kept.size(), tf.expected.size());
  for (const auto& e : kept) EXPECT_EQ(e.human_box, tf.expected.at(e.question_id));

  const auto r1 = run_cli("build-random-subset --manifest " + q("m.jsonl") + " --n 4 --seed 9 --out " + q("r1.jsonl"));
  const auto r2 = run_cli("build-random-subset --manifest " + q("m.jsonl") + " --n 4 --seed 9 --out " + q("r2.jsonl"));
  ASSERT_EQ(r1.status, 0) << r1.output;
  ASSERT_EQ(r2.status, 0) << r2.output;
  EXPECT_EQ(slurp(dir / "r1.jsonl"), slurp(dir / "r2.jsonl"));
  EXPECT_EQ(load_manifest(dir / "r1.jsonl"), build_random_subset(load_manifest(dir / "m.jsonl"), 4, 9));
  EXPECT_EQ(run_cli("build-random-subset --manifest " + q("m.jsonl") + " --n 11 --seed 9 --out " + q("r3.jsonl")).status, 2);

  const auto ff = testing::failure_fixture();
  save_predictions(ff.preds_a, dir / "a.jsonl");
  save_predictions(ff.preds_b, dir / "b.jsonl");
  const auto fi = run_cli("failure-intersection --manifest " + write_with_images(ff.manifest, "f.jsonl") +
                          " --preds-a " + q("a.jsonl") + " --preds-b " + q("b.jsonl") + " --out " + q("i.jsonl"));
  ASSERT_EQ(fi.status, 0) << fi.output;
  EXPECT_EQ(slurp(dir / "i.jsonl"), "{\"question_id\":\"3\"}\n{\"question_id\":\"6\"}\n");

  const auto ev = run_cli("evaluate --manifest " + q("f.jsonl") + " --predictions " + q("a.jsonl") +
                          " --out " + q("e.jsonl"));
  ASSERT_EQ(ev.status, 0) << ev.output;
  std::ifstream report(dir / "e.jsonl");
  std::vector<json> rows;
  for (std::string l; std::getline(report, l);) rows.push_back(json::parse(l));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows.back()["summary"], true);
}

}  // namespace
}  // namespace vcrop::harness
