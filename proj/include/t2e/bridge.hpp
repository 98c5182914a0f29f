// Copyright 2026 The T2E Authors
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

// Policy bridge: drives an episode while an external client chooses actions
// for some of the robots over a line-oriented JSON protocol (v1).
//
//   engine -> client  {"v":1,"step":n,"done":false,"robots":[
//                        {"id":i,"team":"captor","obs":{"agent":[..],
//                         "obstacle":[[0,1,..],..]},"reward":{..}}, ..]}
//   client -> engine  {"v":1,"step":n,"actions":[{"id":i,"a":0..4}, ..]}
//   engine -> client  {"v":1,"type":"outcome","step":n,"success":..,
//                      "steps_used":..,"rewards":[{"id":i,..}, ..]}
//
// "reward" is the breakdown earned on the previous step and is absent on
// step 0. On bad input the engine writes {"error":"protocol","detail":..}
// (or "timeout") and ends the session.

#ifndef T2E_BRIDGE_HPP_
#define T2E_BRIDGE_HPP_

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "t2e/engine.hpp"
#include "t2e/errors.hpp"
#include "t2e/perception.hpp"
#include "t2e/trajectory_io.hpp"

namespace t2e {

/// Bidirectional line transport.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  /// Next line without its terminator; nullopt at end of stream. Throws
  /// ProtocolError("timeout") when `timeout_ms` (> 0) elapses first.
  virtual std::optional<std::string> read_line(int timeout_ms) = 0;
  virtual void write_line(const std::string& line) = 0;
};

/// Line channel over POSIX file descriptors (pipes, stdio, sockets).
class FdChannel final : public LineChannel {
 public:
  FdChannel(int in_fd, int out_fd, bool owns = false)
      : in_(in_fd), out_(out_fd), owns_(owns) {}
  ~FdChannel() override {
    if (owns_) {
      ::close(in_);
      if (out_ != in_) ::close(out_);
    }
  }
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  std::optional<std::string> read_line(int timeout_ms) override {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      if (eof_) {
        if (buffer_.empty()) return std::nullopt;
        std::string line;
        line.swap(buffer_);
        return line;
      }
      int wait = -1;
      if (timeout_ms > 0) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                              deadline - Clock::now())
                              .count();
        if (left <= 0) throw ProtocolError("client reply timed out", "timeout");
        wait = static_cast<int>(left);
      }
      pollfd pfd{in_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, wait);
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw Error(std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) continue;  // deadline re-checked above
      char chunk[4096];
      const ssize_t got = ::read(in_, chunk, sizeof(chunk));
      if (got < 0) {
        if (errno == EINTR) continue;
        throw Error(std::string("read failed: ") + std::strerror(errno));
      }
      if (got == 0) {
        eof_ = true;
      } else {
        buffer_.append(chunk, static_cast<std::size_t>(got));
      }
    }
  }

  void write_line(const std::string& line) override {
    std::string data = line;
    data += '\n';
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t put = ::write(out_, data.data() + off, data.size() - off);
      if (put < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("write failed: ") +
                            std::strerror(errno));
      }
      off += static_cast<std::size_t>(put);
    }
  }

 private:
  int in_;
  int out_;
  bool owns_;
  bool eof_ = false;
  std::string buffer_;
};

/// Binds a unix-domain socket at `path`, waits for one client and returns a
/// channel over the accepted connection.
inline std::unique_ptr<FdChannel> accept_unix_client(const std::string& path,
                                                     int timeout_ms) {
  const int srv = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (srv < 0) throw Error("socket() failed");
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) {
    ::close(srv);
    throw ConfigError("socket path too long");
  }
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  ::unlink(path.c_str());
  if (::bind(srv, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(srv, 1) < 0) {
    ::close(srv);
    throw ConfigError("cannot bind socket: " + path);
  }
  pollfd pfd{srv, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, timeout_ms > 0 ? timeout_ms : -1);
  if (ready <= 0) {
    ::close(srv);
    ::unlink(path.c_str());
    throw ProtocolError("no client connected", "timeout");
  }
  const int fd = ::accept(srv, nullptr, nullptr);
  ::close(srv);
  ::unlink(path.c_str());
  if (fd < 0) throw Error("accept() failed");
  return std::make_unique<FdChannel>(fd, fd, true);
}

// ---------------------------------------------------------------------------
// Messages

inline ojson observation_json(const Observation& obs,
                              const PerceptionConfig& config) {
  ojson grid = ojson::array();
  for (int r = 0; r < obs.obstacle.size; ++r) {
    ojson row = ojson::array();
    for (int c = 0; c < obs.obstacle.size; ++c) {
      row.push_back(static_cast<int>(obs.obstacle.at(r, c)));
    }
    grid.push_back(std::move(row));
  }
  return {{"agent", obs.agent.flatten(config)}, {"obstacle", std::move(grid)}};
}

struct BridgeOptions {
  int timeout_ms = 30000;  // per client reply; <= 0 waits forever
};

/// Parses one client reply; returns actions in the order of `expected_ids`.
inline std::vector<Action> parse_bridge_reply(
    const std::string& line, int step,
    const std::vector<std::size_t>& expected_ids) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("reply is not valid JSON");
  }
  if (!j.is_object() || !j.contains("v") || j["v"] != kLogVersion) {
    throw ProtocolError("reply must carry \"v\":1");
  }
  if (!j.contains("step") || !j["step"].is_number_integer() ||
      j["step"].get<long long>() != step) {
    throw ProtocolError("reply step does not match request");
  }
  if (!j.contains("actions") || !j["actions"].is_array()) {
    throw ProtocolError("reply needs an actions array");
  }
  std::vector<std::optional<Action>> found(expected_ids.size());
  for (const ojson& a : j["actions"]) {
    if (!a.is_object() || !a.contains("id") || !a.contains("a") ||
        !a["id"].is_number_integer() || !a["a"].is_number_integer()) {
      throw ProtocolError("action entries need integer id and a");
    }
    const long long id = a["id"].get<long long>();
    const auto act = action_from_code(a["a"].get<long long>());
    if (!act) throw ProtocolError("action code out of range");
    bool matched = false;
    for (std::size_t k = 0; k < expected_ids.size(); ++k) {
      if (static_cast<long long>(expected_ids[k]) != id) continue;
      if (found[k]) throw ProtocolError("duplicate action for robot");
      found[k] = *act;
      matched = true;
    }
    if (!matched) throw ProtocolError("action for a robot not under control");
  }
  std::vector<Action> out;
  for (const auto& f : found) {
    if (!f) throw ProtocolError("missing action for a controlled robot");
    out.push_back(*f);
  }
  return out;
}

/// Runs one episode with the robots of bridged teams controlled over
/// `channel`. A null policy marks its team as bridged. The outcome object is
/// written before returning. Protocol failures are reported to the client
/// and rethrown.
inline TrajectoryLog run_bridge_session(Episode& ep, LineChannel& channel,
                                        Policy* captor_policy,
                                        Policy* target_policy,
                                        const BridgeOptions& options = {}) {
  const std::size_t n = ep.snapshot().n_captors;
  std::vector<std::size_t> bridged;
  for (std::size_t i = 0; i <= n; ++i) {
    const bool captor = i < n;
    if ((captor && captor_policy == nullptr) ||
        (!captor && target_policy == nullptr)) {
      bridged.push_back(i);
    }
  }
  TrajectoryLog log = make_log_header(
      ep, captor_policy ? captor_policy->id() : "bridge",
      target_policy ? target_policy->id() : "bridge");

  auto rewards_of = [&](const StepRecord& rec) {
    ojson arr = ojson::array();
    for (std::size_t id : bridged) {
      ojson r = reward_to_json(rec.rewards[id]);
      r["id"] = id;
      arr.push_back(std::move(r));
    }
    return arr;
  };

  try {
    while (!ep.done()) {
      std::vector<Action> actions(n + 1, Action::Stop);
      std::vector<std::size_t> captor_ids(n);
      for (std::size_t i = 0; i < n; ++i) captor_ids[i] = i;
      if (captor_policy) {
        captor_policy->act(ep, captor_ids, std::span<Action>(actions.data(), n));
      }
      if (target_policy) {
        const std::size_t t = n;
        target_policy->act(ep, std::span<const std::size_t>(&t, 1),
                           std::span<Action>(actions.data() + n, 1));
      }
      if (!bridged.empty()) {
        ojson req;
        req["v"] = kLogVersion;
        req["step"] = ep.step_index();
        req["done"] = false;
        ojson robots = ojson::array();
        for (std::size_t id : bridged) {
          ojson r;
          r["id"] = id;
          r["team"] = to_string(ep.snapshot().team_of(id));
          r["obs"] = observation_json(ep.observe(id), ep.config().perception);
          if (!log.steps.empty()) {
            r["reward"] = reward_to_json(log.steps.back().rewards[id]);
          }
          robots.push_back(std::move(r));
        }
        req["robots"] = std::move(robots);
        channel.write_line(req.dump());
        const std::optional<std::string> reply =
            channel.read_line(options.timeout_ms);
        if (!reply) throw ProtocolError("client closed the stream");
        const std::vector<Action> chosen =
            parse_bridge_reply(*reply, ep.step_index(), bridged);
        for (std::size_t k = 0; k < bridged.size(); ++k) {
          actions[bridged[k]] = chosen[k];
        }
      }
      log.steps.push_back(ep.step(actions));
    }
  } catch (const ProtocolError& e) {
    ojson err{{"error", e.kind()}, {"detail", e.what()}};
    try {
      channel.write_line(err.dump());
    } catch (const Error&) {
      // Client already gone.
    }
    throw;
  }
  log.outcome.success = ep.captured();
  log.outcome.steps_used = ep.step_index();
  ojson out;
  out["v"] = kLogVersion;
  out["type"] = "outcome";
  out["step"] = ep.step_index();
  out["success"] = log.outcome.success;
  out["steps_used"] = log.outcome.steps_used;
  out["rewards"] =
      log.steps.empty() ? ojson::array() : rewards_of(log.steps.back());
  channel.write_line(out.dump());
  return log;
}

}  // namespace t2e

#endif  // T2E_BRIDGE_HPP_
