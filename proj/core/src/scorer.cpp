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

#include "vcrop/scorer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <regex>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "vcrop/errors.hpp"

namespace vcrop::sim {

using nlohmann::json;

std::vector<double> FunctionScorer::score(const ImageRef& image,
                                          std::span<const BBox> regions,
                                          const std::string& prompt) {
  std::vector<double> out;
  out.reserve(regions.size());
  for (const auto& r : regions) {
    ++requests_;
    out.push_back(fn_(image, r, prompt));
  }
  return out;
}

// ------------------------------------------------------------ ProcessChannel

namespace {

std::string errno_text() { return std::strerror(errno); }

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

ProcessChannel::ProcessChannel(const std::string& command,
                               std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw TransportError("socketpair failed: " + errno_text());
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw TransportError("fork failed: " + errno_text());
  }
  if (pid == 0) {
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  pid_ = pid;
  to_child_ = sv[0];
  from_child_ = ::dup(sv[0]);
  if (from_child_ < 0) {
    throw TransportError("dup failed: " + errno_text());
  }
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
}

ProcessChannel::~ProcessChannel() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0 && !status_) {
    int st = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &st, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &st, 0);
  }
}

void ProcessChannel::write_line(std::string_view line) {
  if (to_child_ < 0) throw TransportError("scorer channel is closed");
  std::string data(line);
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::send(to_child_, data.data() + off, data.size() - off,
                          MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("write to scorer failed: " + errno_text());
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> ProcessChannel::read_line() {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (eof_) {
      if (buffer_.empty()) return std::nullopt;
      return std::exchange(buffer_, {});
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError("poll on scorer failed: " + errno_text());
    }
    if (ready == 0) {
      throw TransportError("scorer timed out after " +
                           std::to_string(timeout_.count()) + " ms");
    }
    char chunk[4096];
    const auto n = ::recv(from_child_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("read from scorer failed: " + errno_text());
    }
    if (n == 0) {
      eof_ = true;
    } else {
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }
}

void ProcessChannel::close_write() {
  if (to_child_ >= 0) ::shutdown(to_child_, SHUT_WR);
}

int ProcessChannel::wait() {
  if (!status_) {
    int st = 0;
    while (::waitpid(pid_, &st, 0) < 0) {
      if (errno != EINTR) throw TransportError("waitpid failed: " + errno_text());
    }
    status_ = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }
  return *status_;
}

// ------------------------------------------------------------ ScorerSession

namespace {

json parse_response(const std::string& line) {
  json msg;
  try {
    msg = json::parse(line);
  } catch (const json::exception&) {
    throw ProtocolError("scorer sent a line that is not JSON: " + line);
  }
  if (!msg.is_object()) {
    throw ProtocolError("scorer sent a non-object message: " + line);
  }
  return msg;
}

std::optional<std::uint64_t> as_id(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  return std::nullopt;
}

}  // namespace

ScorerSession::ScorerSession(std::unique_ptr<LineChannel> channel,
                             std::size_t max_in_flight)
    : channel_(std::move(channel)), max_in_flight_(std::max<std::size_t>(1, max_in_flight)) {
  channel_->write_line(json{{"op", "hello"}, {"version", kProtocolVersion}}.dump());
  const auto line = channel_->read_line();
  if (!line) throw ProtocolError("scorer closed the stream during handshake");
  const json msg = parse_response(*line);
  if (msg.value("op", "") != "hello" || !msg.contains("version") ||
      !msg["version"].is_number_integer()) {
    throw ProtocolError("malformed hello from scorer: " + *line);
  }
  const auto version = msg["version"].get<int>();
  if (version != kProtocolVersion) {
    broken_ = true;
    throw ProtocolError("scorer speaks protocol version " +
                        std::to_string(version) + ", expected " +
                        std::to_string(kProtocolVersion));
  }
  if (msg.contains("pipeline")) {
    if (!msg["pipeline"].is_boolean()) {
      throw ProtocolError("hello.pipeline must be a boolean");
    }
    pipelined_ = msg["pipeline"].get<bool>();
  }
}

ScorerSession::~ScorerSession() {
  if (!broken_) {
    try {
      shutdown();
    } catch (const std::exception&) {
    }
  }
}

std::vector<double> ScorerSession::score(const ImageRef& image,
                                         std::span<const BBox> regions,
                                         const std::string& prompt) {
  if (closed_) throw TransportError("scorer session is shut down");
  if (broken_) throw TransportError("scorer session is in a failed state");
  std::vector<double> out(regions.size(), 0.0);
  std::unordered_map<std::uint64_t, std::size_t> pending;
  const std::size_t window = pipelined_ ? max_in_flight_ : 1;
  std::size_t next = 0;

  try {
    while (next < regions.size() || !pending.empty()) {
      while (next < regions.size() && pending.size() < window) {
        const auto id = next_id_++;
        const BBox& b = regions[next];
        json req{{"id", id},
                 {"op", "score"},
                 {"image", image.path},
                 {"bbox", {b.x0, b.y0, b.x1, b.y1}},
                 {"prompt", prompt}};
        channel_->write_line(req.dump());
        pending.emplace(id, next++);
      }
      const auto line = channel_->read_line();
      if (!line) throw TransportError("scorer closed the stream mid-session");
      const json msg = parse_response(*line);
      const auto id_it = msg.find("id");
      const auto id = id_it == msg.end() ? std::nullopt : as_id(*id_it);
      if (!id) throw ProtocolError("scorer response without a valid id: " + *line);
      const auto it = pending.find(*id);
      if (it == pending.end()) {
        throw ProtocolError("scorer answered unknown or repeated id " +
                            std::to_string(*id));
      }
      ++responses_;
      if (msg.contains("error")) {
        const auto& e = msg["error"];
        throw TransportError("scorer failed on request " + std::to_string(*id) +
                             ": " + (e.is_string() ? e.get<std::string>() : e.dump()));
      }
      if (!msg.contains("score") || !msg["score"].is_number()) {
        throw ProtocolError("scorer response without a numeric score: " + *line);
      }
      const double s = msg["score"].get<double>();
      if (!std::isfinite(s)) throw ProtocolError("scorer returned a non-finite score");
      out[it->second] = s;
      pending.erase(it);
    }
  } catch (...) {
    broken_ = true;
    throw;
  }
  return out;
}

void ScorerSession::shutdown() {
  if (closed_) return;
  closed_ = true;
  channel_->write_line(json{{"op", "shutdown"}}.dump());
  channel_->close_write();
  while (channel_->read_line()) {
  }
}

std::unique_ptr<ScorerSession> spawn_scorer(const std::string& command,
                                            std::chrono::milliseconds timeout) {
  return std::make_unique<ScorerSession>(
      std::make_unique<ProcessChannel>(command, timeout));
}

// ------------------------------------------------------------ server

namespace {

std::optional<std::uint64_t> scrape_id(const std::string& line) {
  static const std::regex re(R"re("id"\s*:\s*([0-9]{1,19})(?![0-9]))re");
  std::smatch m;
  if (!std::regex_search(line, m, re)) return std::nullopt;
  try {
    return std::stoull(m[1].str());
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void reply(std::ostream& out, const json& msg) {
  out << msg.dump() << '\n';
  out.flush();
}

void reply_error(std::ostream& out, std::uint64_t id, const std::string& what) {
  reply(out, json{{"id", id}, {"error", what}});
}

std::optional<BBox> parse_bbox(const json& v) {
  if (!v.is_array() || v.size() != 4) return std::nullopt;
  for (const auto& x : v) {
    if (!x.is_number_integer()) return std::nullopt;
  }
  BBox b{v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
  if (b.x0 >= b.x1 || b.y0 >= b.y1) return std::nullopt;
  return b;
}

}  // namespace

int serve_scorer(std::istream& in, std::ostream& out, const ScoreFn& fn,
                 const ServerOptions& options) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    json msg;
    try {
      msg = json::parse(line);
    } catch (const json::exception&) {
      if (const auto id = scrape_id(line)) {
        reply_error(out, *id, "malformed request line");
        continue;
      }
      return 1;
    }
    if (!msg.is_object()) return 1;

    const auto id_it = msg.find("id");
    std::uint64_t rid = 0;
    bool has_id = false;
    if (id_it != msg.end()) {
      if (const auto v = as_id(*id_it)) {
        rid = *v;
        has_id = true;
      }
    }
    const auto op_it = msg.find("op");
    const std::string op =
        (op_it != msg.end() && op_it->is_string()) ? op_it->get<std::string>() : "";

    if (op == "hello") {
      reply(out, json{{"op", "hello"},
                      {"version", kProtocolVersion},
                      {"pipeline", options.pipeline}});
      const auto v = msg.find("version");
      if (v == msg.end() || !v->is_number_integer() ||
          v->get<int>() != kProtocolVersion) {
        return 1;
      }
      continue;
    }
    if (op == "shutdown") return 0;
    if (!has_id) return 1;
    if (op != "score") {
      reply_error(out, rid, "unknown op '" + op + "'");
      continue;
    }
    const auto image = msg.find("image");
    const auto prompt = msg.find("prompt");
    const auto bbox = msg.contains("bbox") ? parse_bbox(msg["bbox"]) : std::nullopt;
    if (image == msg.end() || !image->is_string() || prompt == msg.end() ||
        !prompt->is_string() || !bbox) {
      reply_error(out, rid, "score request needs image, bbox and prompt");
      continue;
    }
    try {
      const double s = fn(image->get<std::string>(), *bbox, prompt->get<std::string>());
      if (!std::isfinite(s)) {
        reply_error(out, rid, "non-finite score");
      } else {
        reply(out, json{{"id", rid}, {"score", s}});
      }
    } catch (const std::exception& e) {
      reply_error(out, rid, e.what());
    }
  }
  return 0;
}

double overlap_score(const BBox& region, const BBox& target) {
  const auto ix = std::max(0, std::min(region.x1, target.x1) - std::max(region.x0, target.x0));
  const auto iy = std::max(0, std::min(region.y1, target.y1) - std::max(region.y0, target.y0));
  const double inter = static_cast<double>(ix) * iy;
  const double uni = static_cast<double>(region.area()) + target.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace vcrop::sim
