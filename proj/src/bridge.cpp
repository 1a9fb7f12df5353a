#include "tscf/bridge.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "tscf/json_io.hpp"

namespace tscf {

namespace {

[[noreturn]] void protocol_error(const std::string& what) {
  throw Error(ErrorCode::BridgeProtocolError, what);
}

std::size_t positive_field(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer() || doc.at(key).get<long long>() < 1) {
    protocol_error(std::string("handshake field \"") + key + "\" missing or not a positive integer");
  }
  return doc.at(key).get<std::size_t>();
}

}  // namespace

std::vector<ProbabilityVector> parse_proba_response(const json& response, std::size_t batch_size,
                                                    std::size_t class_count) {
  if (!response.is_object() || !response.contains("proba") || !response.at("proba").is_array()) {
    protocol_error("response lacks a \"proba\" array");
  }
  const auto& rows = response.at("proba");
  if (rows.size() != batch_size) {
    protocol_error("expected " + std::to_string(batch_size) + " probability rows, got " +
                   std::to_string(rows.size()));
  }
  std::vector<ProbabilityVector> out;
  out.reserve(batch_size);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != class_count) {
      protocol_error("probability row does not have " + std::to_string(class_count) + " entries");
    }
    ProbabilityVector p;
    p.reserve(class_count);
    double total = 0.0;
    for (const auto& v : row) {
      if (!v.is_number()) protocol_error("non-numeric probability");
      const double d = v.get<double>();
      if (!std::isfinite(d) || d < 0.0) protocol_error("probability not finite and non-negative");
      p.push_back(d);
      total += d;
    }
    if (total < 0.99 || total > 1.01) {
      protocol_error("probability row sums to " + std::to_string(total));
    }
    for (double& d : p) d /= total;
    out.push_back(std::move(p));
  }
  return out;
}

ExternalModelBridge::ExternalModelBridge(const std::string& command, BridgeOptions options)
    : options_(std::move(options)) {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw Error(ErrorCode::Io, "pipe failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::Io, "pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw Error(ErrorCode::Io, "fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(to_child_, F_SETFL, ::fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);

  if (options_.transcript) {
    transcript_.open(*options_.transcript, std::ios::binary | std::ios::app);
    if (!transcript_) {
      shutdown();
      throw Error(ErrorCode::Io, "cannot open transcript " + options_.transcript->string());
    }
  }

  try {
    const json info = exchange({{"op", "info"}});
    if (!info.is_object()) protocol_error("handshake response is not an object");
    classes_ = positive_field(info, "classes");
    length_ = positive_field(info, "length");
    channels_ = positive_field(info, "channels");
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalModelBridge::~ExternalModelBridge() { shutdown(); }

void ExternalModelBridge::shutdown() noexcept {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
  if (pid_ > 0) {
    // Closing stdin asks the child to exit; give it a moment, then kill the
    // whole process group so grandchildren started by the shell go too.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        ::kill(-pid_, SIGKILL);
        pid_ = -1;
        return;
      }
      ::usleep(2000);
    }
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void ExternalModelBridge::write_line(const std::string& line) const {
  const std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  // SIGPIPE would kill the parent if the child is gone; ignore it for this write.
  struct sigaction ignore {};
  struct sigaction previous {};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &previous);
  auto fail = [&](ErrorCode code, const std::string& what) {
    ::sigaction(SIGPIPE, &previous, nullptr);
    broken_ = true;
    throw Error(code, what);
  };
  while (left > 0) {
    const ssize_t n = ::write(to_child_, p, left);
    if (n >= 0) {
      p += n;
      left -= static_cast<std::size_t>(n);
      continue;
    }
    if (errno == EINTR) continue;
    if (errno != EAGAIN && errno != EWOULDBLOCK) {
      fail(ErrorCode::BridgeProtocolError, "child closed its input");
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) fail(ErrorCode::Timeout, "model child stopped reading requests");
    pollfd pfd{to_child_, POLLOUT, 0};
    ::poll(&pfd, 1, static_cast<int>(remaining.count()));
  }
  ::sigaction(SIGPIPE, &previous, nullptr);
}

std::string ExternalModelBridge::read_line() const {
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  for (;;) {
    if (const auto nl = read_buffer_.find('\n'); nl != std::string::npos) {
      std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      broken_ = true;
      throw Error(ErrorCode::Timeout, "no response from model child");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      protocol_error("poll failed");
    }
    if (ready == 0) continue;
    char buf[65536];
    const ssize_t n = ::read(from_child_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      protocol_error("read from child failed");
    }
    if (n == 0) {
      broken_ = true;
      protocol_error("child exited before responding");
    }
    read_buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

json ExternalModelBridge::exchange(const json& request) const {
  if (broken_) protocol_error("bridge is no longer usable after an earlier failure");
  const std::string line = request.dump();
  write_line(line);
  const std::string reply = read_line();
  json response;
  try {
    response = json::parse(reply);
  } catch (const json::parse_error&) {
    broken_ = true;
    protocol_error("malformed JSON from child: " + reply.substr(0, 200));
  }
  if (transcript_.is_open()) {
    transcript_ << json{{"request", request}, {"response", response}}.dump() << '\n';
    transcript_.flush();
  }
  return response;
}

std::vector<ProbabilityVector> ExternalModelBridge::predict_proba(
    std::span<const TimeSeriesInstance> batch) const {
  for (const auto& x : batch) {
    if (x.length() != length_ || x.channels() != channels_) {
      throw Error(ErrorCode::DimensionMismatch, "instance shape does not match the bridge model");
    }
  }
  if (batch.empty()) return {};
  json instances = json::array();
  for (const auto& x : batch) instances.push_back(values_to_json(x));
  std::lock_guard lock(mutex_);
  const json response = exchange({{"op", "predict_proba"}, {"instances", std::move(instances)}});
  return parse_proba_response(response, batch.size(), classes_);
}

}  // namespace tscf
