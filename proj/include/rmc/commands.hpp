#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

namespace rmc {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNumerical = 2,
};

struct RunOptions {
  std::filesystem::path config;            // single scenario
  std::optional<std::filesystem::path> batch_dir;  // every *.cfg in the directory
  std::optional<std::filesystem::path> output;
  bool degrees = false;
  bool plot_script = true;
};

struct AnalyzeOptions {
  std::filesystem::path config;
  std::filesystem::path log_csv;
  std::optional<std::filesystem::path> output;
  bool degrees = false;  // input CSV was written with --deg
};

/// Output directory override from RMC_LOG_DIR (empty when unset).
std::filesystem::path log_dir_override();

/// Resolves where a file lands: RMC_LOG_DIR replaces the directory part.
std::filesystem::path resolve_output(const std::filesystem::path& requested);

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check_gains(const std::filesystem::path& config, const std::optional<std::filesystem::path>& bounds,
                    std::ostream& out, std::ostream& err);
int cmd_decompose(const std::filesystem::path& matrix_file, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);

/// Runs `body`, mapping ValidationError to 1 and numerical failures to 2.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace rmc
