#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vprec {

struct ProcessSpec {
  std::vector<std::string> argv;
  /// Added to (or replacing entries of) the parent's environment.
  std::vector<std::pair<std::string, std::string>> environment;
  std::filesystem::path stdout_path;  // empty: inherit
  std::filesystem::path stderr_path;  // empty: inherit
  std::chrono::milliseconds timeout{0};  // zero: wait indefinitely
};

struct ProcessResult {
  int exit_code = -1;  // valid when signal == 0 and !timed_out
  int signal = 0;
  bool timed_out = false;
  std::chrono::milliseconds wall{0};

  bool succeeded() const noexcept { return signal == 0 && !timed_out && exit_code == 0; }
};

/// ["/bin/sh", "-c", command, extra...]
std::vector<std::string> shell_argv(std::string_view command,
                                    const std::vector<std::string>& positional = {});

/// Spawns and waits. Throws std::runtime_error if the process cannot be started.
ProcessResult run_process(const ProcessSpec& spec);

std::string read_file(const std::filesystem::path& path);

}  // namespace vprec
