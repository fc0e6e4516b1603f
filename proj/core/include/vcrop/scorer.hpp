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

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcrop/image.hpp"

namespace vcrop::sim {

/// An image on disk together with its pixel dimensions.
struct ImageRef {
  std::string path;
  int width = 0;
  int height = 0;

  BBox full_box() const { return BBox::full(width, height); }
};

/// Similarity between a region of an image and a text prompt.
class Scorer {
 public:
  virtual ~Scorer() = default;

  /// One score per region, in request order. Throws TransportError when
  /// the backing service fails.
  virtual std::vector<double> score(const ImageRef& image,
                                    std::span<const BBox> regions,
                                    const std::string& prompt) = 0;
};

/// In-process scorer backed by a callable. Counts requests.
class FunctionScorer final : public Scorer {
 public:
  using Fn = std::function<double(const ImageRef&, const BBox&,
                                  const std::string&)>;
  explicit FunctionScorer(Fn fn) : fn_(std::move(fn)) {}

  std::vector<double> score(const ImageRef& image,
                            std::span<const BBox> regions,
                            const std::string& prompt) override;

  std::uint64_t requests() const { return requests_; }

 private:
  Fn fn_;
  std::uint64_t requests_ = 0;
};

/// Bidirectional, newline-framed byte stream.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  /// Writes `line` plus a trailing newline.
  virtual void write_line(std::string_view line) = 0;
  /// Next line without its newline; nullopt once the peer closes.
  virtual std::optional<std::string> read_line() = 0;
  /// Half-closes the outgoing direction.
  virtual void close_write() = 0;
};

/// Runs `command` under /bin/sh with its stdin/stdout connected to the
/// channel. Reads time out after `timeout`. The child is reaped (and
/// killed if still running) on destruction.
class ProcessChannel final : public LineChannel {
 public:
  ProcessChannel(const std::string& command,
                 std::chrono::milliseconds timeout = std::chrono::seconds(60));
  ~ProcessChannel() override;
  ProcessChannel(const ProcessChannel&) = delete;
  ProcessChannel& operator=(const ProcessChannel&) = delete;

  void write_line(std::string_view line) override;
  std::optional<std::string> read_line() override;
  void close_write() override;

  int pid() const { return pid_; }
  /// Waits for the child and returns its exit status (-1 if signalled).
  int wait();

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
  bool eof_ = false;
  std::optional<int> status_;
};

inline constexpr int kProtocolVersion = 1;

/// Client side of the line-delimited JSON scorer protocol:
///
///   -> {"op":"hello","version":1}
///   <- {"op":"hello","version":1,"pipeline":bool}
///   -> {"id":u64,"op":"score","image":path,"bbox":[x0,y0,x1,y1],"prompt":s}
///   <- {"id":u64,"score":float} | {"id":u64,"error":string}
///   -> {"op":"shutdown"}            <- stream close
///
/// Unknown response fields are ignored. When the server advertises
/// pipelining, up to `max_in_flight` requests are outstanding at once and
/// responses may arrive in any order; otherwise requests are strictly
/// one at a time.
class ScorerSession final : public Scorer {
 public:
  /// Performs the handshake; throws ProtocolError on a version mismatch or
  /// malformed hello.
  explicit ScorerSession(std::unique_ptr<LineChannel> channel,
                         std::size_t max_in_flight = 32);
  ~ScorerSession() override;
  ScorerSession(const ScorerSession&) = delete;
  ScorerSession& operator=(const ScorerSession&) = delete;

  std::vector<double> score(const ImageRef& image,
                            std::span<const BBox> regions,
                            const std::string& prompt) override;

  bool pipelined() const { return pipelined_; }
  std::uint64_t requests_sent() const { return next_id_ - 1; }
  std::uint64_t responses_received() const { return responses_; }

  /// Sends shutdown and waits for the server to close its stream. Safe to
  /// call more than once.
  void shutdown();

 private:
  std::unique_ptr<LineChannel> channel_;
  std::size_t max_in_flight_;
  bool pipelined_ = false;
  bool closed_ = false;
  bool broken_ = false;
  std::uint64_t next_id_ = 1;
  std::uint64_t responses_ = 0;
};

/// Spawns `command` and handshakes with it.
std::unique_ptr<ScorerSession> spawn_scorer(
    const std::string& command,
    std::chrono::milliseconds timeout = std::chrono::seconds(60));

// ------------------------------------------------------------ server side

using ScoreFn = std::function<double(const std::string& image, const BBox&,
                                     const std::string& prompt)>;

struct ServerOptions {
  bool pipeline = false;
};

/// Serves the protocol on a pair of streams until shutdown or end of input.
/// A request whose id can be recovered but is otherwise malformed, or whose
/// scoring throws, gets an error response. A line with no recoverable id
/// aborts the session. Returns 0 on clean shutdown/EOF and 1 on abort.
int serve_scorer(std::istream& in, std::ostream& out, const ScoreFn& fn,
                 const ServerOptions& options = {});

/// Mock similarity: intersection-over-union of `region` and a hidden
/// `target`, in [0,1].
double overlap_score(const BBox& region, const BBox& target);

}  // namespace vcrop::sim
