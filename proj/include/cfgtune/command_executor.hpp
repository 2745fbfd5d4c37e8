#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cfgtune/errors.hpp"
#include "cfgtune/execution.hpp"

extern char** environ;

namespace cfgtune {

/// Parses "t_seconds,throughput[,latency_ms]". Returns nullopt for malformed lines.
inline std::optional<MetricSample> parse_metric_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() < 2 || fields.size() > 3) return std::nullopt;
  auto t = parse_number(fields[0]);
  auto thr = parse_number(fields[1]);
  if (!t || !thr || !std::isfinite(*t) || !std::isfinite(*thr) || *t < 0.0 || *thr < 0.0) return std::nullopt;
  MetricSample s{*t, *thr, std::nullopt};
  if (fields.size() == 3) {
    auto lat = parse_number(fields[2]);
    if (!lat || !std::isfinite(*lat) || *lat < 0.0) return std::nullopt;
    s.latency_ms = *lat;
  }
  return s;
}

inline std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

/// Runs an external benchmark command per repetition.
///
/// Placeholders in the template: {config} (path of the name=value handoff
/// file), {metrics} (path the command appends metric lines to; when absent,
/// metric lines are read from standard output), {id}, {rep}, {duration},
/// {warmup}. Substituted paths are shell-quoted.
class CommandExecutor : public Executor {
 public:
  struct Settings {
    std::string command_template;
    std::filesystem::path workdir = ".";
    std::optional<double> timeout_s;
    double kill_grace_s = 2.0;
  };

  explicit CommandExecutor(Settings settings) : settings_(std::move(settings)) {
    if (settings_.command_template.empty()) throw ValidationError("command executor needs a command template");
    if (settings_.command_template.find("{config}") == std::string::npos) {
      throw ValidationError("command template must reference {config}");
    }
  }

  std::string name() const override { return "command"; }

  RepetitionResult run(const ExperimentRequest& request, std::size_t repetition, const SampleSink& sink) override {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(settings_.workdir, ec);
    const std::string stem = dns_label(request.id) + "-r" + std::to_string(repetition);
    const fs::path config_path = fs::absolute(settings_.workdir / (stem + ".conf"));
    const fs::path metrics_path = fs::absolute(settings_.workdir / (stem + ".metrics"));
    {
      std::ofstream out(config_path, std::ios::trunc);
      if (!out) return failed("cannot write config file " + config_path.string());
      out << render_config_file(request.config);
    }
    const bool metrics_from_file = settings_.command_template.find("{metrics}") != std::string::npos;
    if (metrics_from_file) fs::remove(metrics_path, ec);

    std::string command = settings_.command_template;
    substitute(command, "{config}", shell_quote(config_path.string()));
    substitute(command, "{metrics}", shell_quote(metrics_path.string()));
    substitute(command, "{id}", shell_quote(request.id));
    substitute(command, "{rep}", std::to_string(repetition));
    substitute(command, "{duration}", format_number(request.duration_s));
    substitute(command, "{warmup}", format_number(request.warmup_s));
    command = "cd " + shell_quote(fs::absolute(settings_.workdir).string()) + " && " + command;

    Process proc;
    if (!proc.spawn(command, !metrics_from_file)) return failed("spawn failed: " + std::string(std::strerror(errno)));

    LineReader reader;
    RepetitionResult result;
    const auto started = std::chrono::steady_clock::now();
    bool cancelled = false;
    int input_fd = metrics_from_file ? -1 : proc.stdout_fd;
    std::size_t file_offset = 0;

    auto feed = [&](std::string_view chunk) {
      reader.buffer.append(chunk);
      std::size_t nl;
      while (!cancelled && (nl = reader.buffer.find('\n')) != std::string::npos) {
        std::string line = reader.buffer.substr(0, nl);
        reader.buffer.erase(0, nl + 1);
        if (!consume(line, reader, result, sink)) cancelled = true;
      }
    };
    auto drain_file = [&]() {
      std::ifstream in(metrics_path, std::ios::binary);
      if (!in) return;
      in.seekg(static_cast<std::streamoff>(file_offset));
      std::string chunk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      file_offset += chunk.size();
      feed(chunk);
    };

    std::optional<int> exit_status;
    while (!cancelled) {
      if (settings_.timeout_s &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() > *settings_.timeout_s) {
        proc.terminate(settings_.kill_grace_s);
        return failed("timed out after " + format_number(*settings_.timeout_s) + " s");
      }
      if (input_fd >= 0) {
        pollfd pfd{input_fd, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc < 0 && errno != EINTR) break;
        if (rc > 0) {
          char buf[4096];
          ssize_t n = ::read(input_fd, buf, sizeof buf);
          if (n > 0) {
            feed(std::string_view(buf, static_cast<std::size_t>(n)));
            continue;
          }
          if (n == 0) {
            input_fd = -1;  // EOF; wait for exit below
          }
        }
      } else {
        if (metrics_from_file) drain_file();
        if (cancelled) break;
        exit_status = proc.try_wait();
        if (exit_status) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(metrics_from_file ? 50 : 10));
      }
    }

    if (cancelled) {
      proc.terminate(settings_.kill_grace_s);
      result.status = RepetitionResult::Status::cancelled;
      return result;
    }
    if (metrics_from_file) drain_file();
    if (!reader.buffer.empty()) {
      std::string last = std::move(reader.buffer);
      reader.buffer.clear();
      if (!consume(last, reader, result, sink)) {
        proc.terminate(settings_.kill_grace_s);
        result.status = RepetitionResult::Status::cancelled;
        return result;
      }
    }
    if (!exit_status) exit_status = proc.wait();

    if (*exit_status != 0) {
      result.status = RepetitionResult::Status::failed;
      result.reason = *exit_status > 0 ? "exit status " + std::to_string(*exit_status)
                                       : "killed by signal " + std::to_string(-*exit_status);
      return result;
    }
    if (reader.total > 0 && 2 * reader.malformed > reader.total) {
      result.status = RepetitionResult::Status::failed;
      result.reason = std::to_string(reader.malformed) + " of " + std::to_string(reader.total) +
                      " metric lines malformed";
      return result;
    }
    return result;
  }

 private:
  struct LineReader {
    std::string buffer;
    std::size_t total = 0;
    std::size_t malformed = 0;
  };

  /// Owns one child process running in its own process group.
  struct Process {
    pid_t pid = -1;
    int stdout_fd = -1;
    bool reaped = false;

    Process() = default;
    Process(const Process&) = delete;
    Process& operator=(const Process&) = delete;
    ~Process() {
      if (pid > 0 && !reaped) terminate(0.5);
      if (stdout_fd >= 0) ::close(stdout_fd);
    }

    bool spawn(const std::string& command, bool capture_stdout) {
      int fds[2] = {-1, -1};
      if (capture_stdout && ::pipe2(fds, O_CLOEXEC) != 0) return false;
      posix_spawn_file_actions_t actions;
      posix_spawn_file_actions_init(&actions);
      if (capture_stdout) posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
      posix_spawnattr_t attr;
      posix_spawnattr_init(&attr);
      posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
      posix_spawnattr_setpgroup(&attr, 0);
      std::string shell = "/bin/sh";
      std::string flag = "-c";
      std::string cmd = command;
      char* argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
      int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
      posix_spawn_file_actions_destroy(&actions);
      posix_spawnattr_destroy(&attr);
      if (capture_stdout) ::close(fds[1]);
      if (rc != 0) {
        if (capture_stdout) ::close(fds[0]);
        errno = rc;
        pid = -1;
        return false;
      }
      stdout_fd = capture_stdout ? fds[0] : -1;
      return true;
    }

    static int decode(int status) {
      if (WIFEXITED(status)) return WEXITSTATUS(status);
      if (WIFSIGNALED(status)) return -WTERMSIG(status);
      return -1;
    }

    std::optional<int> try_wait() {
      int status = 0;
      pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid) {
        reaped = true;
        return decode(status);
      }
      return std::nullopt;
    }

    int wait() {
      int status = 0;
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      reaped = true;
      return decode(status);
    }

    /// SIGTERM to the whole group, SIGKILL after the grace period.
    void terminate(double grace_s) {
      if (pid <= 0 || reaped) return;
      ::kill(-pid, SIGTERM);
      const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(grace_s);
      while (std::chrono::steady_clock::now() < deadline) {
        if (try_wait()) {
          ::kill(-pid, SIGKILL);  // stragglers in the group
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(-pid, SIGKILL);
      wait();
    }
  };

  static void substitute(std::string& text, std::string_view key, const std::string& value) {
    for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
      text.replace(pos, key.size(), value);
    }
  }

  static RepetitionResult failed(std::string reason) {
    return {RepetitionResult::Status::failed, std::move(reason), {}};
  }

  /// Returns false when the sink asks for cancellation.
  static bool consume(std::string_view line, LineReader& reader, RepetitionResult& result, const SampleSink& sink) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') return true;
    ++reader.total;
    auto sample = parse_metric_line(line);
    if (!sample) {
      ++reader.malformed;
      if (reader.malformed <= 10) result.warnings.push_back("skipped malformed metric line: '" + std::string(line) + "'");
      return true;
    }
    return sink(*sample);
  }

  Settings settings_;
};

}  // namespace cfgtune
