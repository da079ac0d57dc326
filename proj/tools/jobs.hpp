#pragma once

// Job files, presets and the four subcommands of the fracspec tool.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace fracspec::cli {

using Json = nlohmann::json;

/// Invalid flags or job documents; the tool exits with status 2.
class JobError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] std::vector<std::string> preset_names();
/// Parsed preset document; throws JobError for an unknown name.
[[nodiscard]] Json preset(const std::string& name);
[[nodiscard]] Json load_job_file(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out = "fracspec-out";
  int threads = 1;
  std::optional<std::size_t> n_max;
  std::optional<double> tol;
};

// Each returns the process exit status: 0 success, 1 solver failure.
int run_solve(const Json& job, const RunOptions& opts);
int run_eig(const Json& job, const RunOptions& opts);
int run_pseudospectra(const Json& job, const RunOptions& opts);

struct BuildArgs {
  std::string transform = "de";
  std::optional<double> omega;
  std::optional<double> beta;
  double mu = 0.0;
  std::string side = "left";
  std::size_t n = 0;
  std::size_t K = 0;
  std::size_t L = 0;
  std::optional<double> kernel_tol;
  std::filesystem::path out;
  int threads = 1;
};

int run_build(const BuildArgs& args);

}  // namespace fracspec::cli
