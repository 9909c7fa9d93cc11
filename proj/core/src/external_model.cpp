#include "cfe/external_model.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <sstream>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "cfe/dataset_io.hpp"
#include "cfe/errors.hpp"

namespace cfe {

struct ExternalCommandModel::Process {
  std::mutex mutex;
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string read_buffer;

  ~Process() { shutdown(); }

  void shutdown() {
    if (to_child >= 0) close(to_child);
    if (from_child >= 0) close(from_child);
    to_child = from_child = -1;
    if (pid > 0) {
      kill(pid, SIGTERM);
      int status = 0;
      waitpid(pid, &status, 0);
      pid = -1;
    }
  }

  void spawn(const std::string& command) {
    // A dead child must surface as ModelError, not SIGPIPE.
    static std::once_flag sigpipe_once;
    std::call_once(sigpipe_once, [] { signal(SIGPIPE, SIG_IGN); });

    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
      throw ModelError("external model: pipe() failed: " + std::string(strerror(errno)));
    }
    pid = fork();
    if (pid < 0) {
      throw ModelError("external model: fork() failed: " + std::string(strerror(errno)));
    }
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
    read_buffer.clear();
  }

  void write_line(const std::string& line) {
    std::string payload = line;
    payload.push_back('\n');
    size_t written = 0;
    while (written < payload.size()) {
      const ssize_t n = write(to_child, payload.data() + written, payload.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ModelError("external model: write failed: " + std::string(strerror(errno)));
      }
      written += static_cast<size_t>(n);
    }
  }

  std::string read_line(int timeout_ms) {
    for (;;) {
      const size_t newline = read_buffer.find('\n');
      if (newline != std::string::npos) {
        std::string line = read_buffer.substr(0, newline);
        read_buffer.erase(0, newline + 1);
        return line;
      }
      struct pollfd pfd = {from_child, POLLIN, 0};
      const int ready = poll(&pfd, 1, timeout_ms);
      if (ready == 0) {
        throw ModelError("external model: timed out waiting for a prediction");
      }
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw ModelError("external model: poll failed: " + std::string(strerror(errno)));
      }
      char chunk[4096];
      const ssize_t n = read(from_child, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ModelError("external model: read failed: " + std::string(strerror(errno)));
      }
      if (n == 0) {
        throw ModelError("external model: command exited before replying");
      }
      read_buffer.append(chunk, static_cast<size_t>(n));
    }
  }
};

ExternalCommandModel::ExternalCommandModel(std::string command, int timeout_ms)
    : command_(std::move(command)),
      timeout_ms_(timeout_ms),
      process_(std::make_unique<Process>()) {}

ExternalCommandModel::~ExternalCommandModel() = default;

double ExternalCommandModel::predict(const SeriesSample& sample) const {
  std::lock_guard<std::mutex> lock(process_->mutex);
  if (process_->pid < 0) {
    process_->spawn(command_);
  }

  std::ostringstream line;
  for (int k = 0; k < sample.time_steps(); ++k) {
    for (int d = 0; d < sample.feature_count(); ++d) {
      if (k != 0 || d != 0) line << ' ';
      line << format_real(sample.values(k, d));
    }
  }
  std::string reply;
  try {
    process_->write_line(line.str());
    reply = process_->read_line(timeout_ms_);
  } catch (const ModelError&) {
    process_->shutdown();  // drop the broken child; the next call respawns
    throw;
  }

  char* end = nullptr;
  const double value = std::strtod(reply.c_str(), &end);
  if (end == reply.c_str()) {
    process_->shutdown();
    throw ModelError("external model: reply '" + reply + "' is not a number");
  }
  return value;
}

}  // namespace cfe
