#include <iostream>

#include "CLI11.hpp"
#include "fracspec/common.hpp"
#include "jobs.hpp"

namespace {

using namespace fracspec::cli;

struct JobSource {
  std::string preset;
  std::string job;
  std::string out = "fracspec-out";
  int threads = 1;
  std::optional<std::size_t> n_max;
  std::optional<double> tol;
};

void add_job_flags(CLI::App* cmd, JobSource& src) {
  auto* p = cmd->add_option("--preset", src.preset, "Built-in experiment preset");
  auto* j = cmd->add_option("--job", src.job, "JSON job file")->check(CLI::ExistingFile);
  p->excludes(j);
  cmd->add_option("--out", src.out, "Output directory")->capture_default_str();
  cmd->add_option("--threads", src.threads, "Worker threads")->check(CLI::Range(1, 1024));
  cmd->add_option("--n-max", src.n_max, "Override the largest truncation size")->check(CLI::Range(4, 1 << 20));
  cmd->add_option("--tol", src.tol, "Override the convergence tolerance")->check(CLI::PositiveNumber);
}

Json resolve(const JobSource& src) {
  if (src.preset.empty() && src.job.empty()) throw JobError("one of --preset or --job is required");
  return src.preset.empty() ? load_job_file(src.job) : preset(src.preset);
}

RunOptions run_options(const JobSource& src) {
  return {src.out, src.threads, src.n_max, src.tol};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral approximation of fractional integral operators"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build an operator matrix and write it with JSON metadata");
  b->add_option("--transform", build.transform, "de or algebraic")->capture_default_str();
  b->add_option("--omega", build.omega, "DE parameter (default: selected from mu)");
  b->add_option("--beta", build.beta, "Algebraic transform order (default: mu)");
  b->add_option("--mu", build.mu, "Operator order")->required();
  b->add_option("--side", build.side, "left, right or riesz")->capture_default_str();
  b->add_option("--n", build.n, "Truncation size")->required();
  b->add_option("--K", build.K, "Kernel degree in y (0: default)");
  b->add_option("--L", build.L, "Kernel degree in t (0: K)");
  b->add_option("--kernel-tol", build.kernel_tol, "Cross approximation tolerance");
  b->add_option("--threads", build.threads, "Worker threads")->check(CLI::Range(1, 1024));
  b->add_option("--out", build.out, "Output file")->required();

  JobSource solve_src, eig_src, ps_src;
  auto* s = app.add_subcommand("solve", "Solve an integral or Airy equation");
  add_job_flags(s, solve_src);
  auto* e = app.add_subcommand("eig", "Two-order fractional eigenproblem");
  add_job_flags(e, eig_src);
  auto* ps = app.add_subcommand("pseudospectra", "Pseudospectra of the Caputo derivative");
  add_job_flags(ps, ps_src);
  app.add_subcommand("presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (*b) return run_build(build);
    if (*s) return run_solve(resolve(solve_src), run_options(solve_src));
    if (*e) return run_eig(resolve(eig_src), run_options(eig_src));
    if (*ps) return run_pseudospectra(resolve(ps_src), run_options(ps_src));
    for (const auto& name : preset_names()) std::cout << name << '\n';
    return 0;
  } catch (const JobError& err) {
    std::cerr << "fracspec: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "fracspec: " << err.what() << '\n';
    return 1;
  }
}
