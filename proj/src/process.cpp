// Copyright 2026 The fastfail Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fastfail/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace fastfail {

namespace {

constexpr std::size_t kMaxOutput = 1 << 20;

void append_capped(std::string& out, const char* data, std::size_t n) {
  out.append(data, n);
  if (out.size() > kMaxOutput) out.erase(0, out.size() - kMaxOutput);
}

struct Pipe {
  int fds[2] = {-1, -1};
  ~Pipe() {
    for (int fd : fds) {
      if (fd >= 0) ::close(fd);
    }
  }
  void close_end(int i) {
    if (fds[i] >= 0) ::close(fds[i]);
    fds[i] = -1;
  }
};

}  // namespace

ProcessOutcome run_process(const ProcessRequest& request) {
  ProcessOutcome outcome;
  if (request.argv.empty()) {
    outcome.error = "empty command";
    return outcome;
  }
  Pipe out, err;
  if (::pipe2(out.fds, O_CLOEXEC) != 0 || ::pipe2(err.fds, O_CLOEXEC) != 0) {
    outcome.error = std::string("pipe: ") + std::strerror(errno);
    return outcome;
  }

  std::vector<char*> argv;
  for (const auto& a : request.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  const std::string workdir = request.workdir.string();

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    outcome.error = std::string("fork: ") + std::strerror(errno);
    return outcome;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out.fds[1], STDOUT_FILENO);
    ::dup2(out.fds[1], STDERR_FILENO);
    int null_in = ::open("/dev/null", O_RDONLY);
    if (null_in >= 0) ::dup2(null_in, STDIN_FILENO);
    for (const auto& [k, v] : request.env) ::setenv(k.c_str(), v.c_str(), 1);
    if (!workdir.empty() && ::chdir(workdir.c_str()) != 0) {
      int e = errno;
      (void)!::write(err.fds[1], &e, sizeof e);
      ::_exit(127);
    }
    ::execvp(argv[0], argv.data());
    int e = errno;
    (void)!::write(err.fds[1], &e, sizeof e);
    ::_exit(127);
  }
  out.close_end(1);
  err.close_end(1);

  int child_errno = 0;
  if (::read(err.fds[0], &child_errno, sizeof child_errno) == sizeof child_errno) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    outcome.error = "cannot start '" + request.argv[0] + "': " + std::strerror(child_errno);
    return outcome;
  }
  outcome.spawned = true;

  const bool limited = request.timeout.count() > 0;
  const auto deadline = start + request.timeout;
  char buf[4096];
  bool eof = false;
  int status = 0;
  bool reaped = false;
  while (!eof) {
    int wait_ms = 100;
    if (limited) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        outcome.timed_out = true;
        ::kill(-pid, SIGKILL);
        break;
      }
      wait_ms = static_cast<int>(std::min<long long>(left.count(), 100));
    }
    pollfd pfd{out.fds[0], POLLIN, 0};
    const int rc = ::poll(&pfd, 1, wait_ms);
    if (rc < 0 && errno != EINTR) break;
    if (rc > 0) {
      const ssize_t n = ::read(out.fds[0], buf, sizeof buf);
      if (n > 0) {
        append_capped(outcome.output, buf, static_cast<std::size_t>(n));
      } else if (n == 0) {
        eof = true;
      }
    }
    // A background grandchild may keep the pipe open after the child exits.
    if (!eof && ::waitpid(pid, &status, WNOHANG) == pid) {
      reaped = true;
      ::fcntl(out.fds[0], F_SETFL, O_NONBLOCK);
      ssize_t n;
      while ((n = ::read(out.fds[0], buf, sizeof buf)) > 0) {
        append_capped(outcome.output, buf, static_cast<std::size_t>(n));
      }
      break;
    }
  }
  if (!reaped) ::waitpid(pid, &status, 0);
  if (WIFEXITED(status)) {
    outcome.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.term_signal = WTERMSIG(status);
  }
  return outcome;
}

std::string shell_quote(std::string_view arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

}  // namespace fastfail
