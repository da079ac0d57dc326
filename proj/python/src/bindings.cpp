#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fracspec/io.hpp"
#include "fracspec/solver.hpp"
#include "jobs.hpp"

namespace py = pybind11;
using namespace fracspec;

namespace {

Transform make_transform(const std::string& kind, std::optional<double> omega, std::optional<double> beta, double mu) {
  if (kind == "de") return DoubleExpTransform(omega ? *omega : select_omega(SingularityInfo{mu, 1.0}));
  if (kind == "algebraic") return AlgebraicTransform(beta ? *beta : mu);
  throw Error("transform must be 'de' or 'algebraic'");
}

py::dict fio_dict(const FIOApprox& op) {
  py::dict d;
  d["A"] = op.A;
  d["mu"] = op.mu;
  d["side"] = std::string(to_string(op.side));
  d["N"] = op.N;
  d["transform"] = kind(op.transform) == TransformKind::double_exponential ? "de" : "algebraic";
  d["parameter"] = parameter(op.transform);
  d["kernel_rank"] = op.kernel_rank;
  d["band_profile"] = py::make_tuple(op.profile.lower, op.profile.upper);
  return d;
}

int run_job(const std::string& command, const std::string& job_json, const std::string& preset,
            const std::filesystem::path& out, int threads) {
  cli::Json job = preset.empty() ? cli::Json::parse(job_json) : cli::preset(preset);
  cli::RunOptions opts{out, threads, std::nullopt, std::nullopt};
  py::gil_scoped_release release;
  if (command == "solve") return cli::run_solve(job, opts);
  if (command == "eig") return cli::run_eig(job, opts);
  if (command == "pseudospectra") return cli::run_pseudospectra(job, opts);
  throw cli::JobError("command must be solve, eig or pseudospectra");
}

}  // namespace

PYBIND11_MODULE(_fracspec, m) {
  m.doc() = "Spectral approximation of fractional integral operators";

  py::register_exception<Error>(m, "FracspecError", PyExc_RuntimeError);
  py::register_exception<cli::JobError>(m, "JobError", PyExc_ValueError);

  m.def("select_omega", [](double gamma, double fnorm) { return select_omega(SingularityInfo{gamma, fnorm}); },
        py::arg("gamma"), py::arg("fnorm") = 1.0,
        "Smallest DE parameter resolving an endpoint singularity of order gamma.");

  m.def(
      "build_operator",
      [](double mu, const std::string& side, std::size_t n, const std::string& transform, std::optional<double> omega,
         std::optional<double> beta, int threads) {
        const Transform t = make_transform(transform, omega, beta, mu);
        const Side s = side_from_string(side);
        FIOApprox op;
        {
          py::gil_scoped_release release;
          op = s == Side::riesz ? build_riesz(mu, t, n, KernelOptions{}, threads) : build_fio(t, mu, s, n, KernelOptions{}, threads);
        }
        return fio_dict(op);
      },
      py::arg("mu"), py::arg("side") = "left", py::arg("n") = 64, py::arg("transform") = "de",
      py::arg("omega") = py::none(), py::arg("beta") = py::none(), py::arg("threads") = 1,
      "Matrix of I^mu acting on transplanted Chebyshev coefficients, with metadata.");

  m.def(
      "tcp_coefficients",
      [](const py::function& f, std::size_t n, double omega, bool with_endpoints) {
        const Transform t = DoubleExpTransform(omega);
        return tcp_coeffs<double>(
            t,
            [&f, with_endpoints](const TransformedPoint& p) {
              return with_endpoints ? f(p.x, p.one_plus_x(), p.one_minus_x()).cast<double>() : f(p.x).cast<double>();
            },
            n);
      },
      py::arg("f"), py::arg("n"), py::arg("omega"), py::arg("with_endpoints") = false,
      "First n TCP coefficients of f in the DE basis. With with_endpoints, f is called as\n"
      "f(x, 1 + x, 1 - x) with both distances accurate near the endpoints; needed for\n"
      "endpoint singularities, since x itself cannot resolve them.");

  m.def(
      "tcp_evaluate",
      [](const std::vector<double>& coeffs, const std::vector<double>& xs, double omega) {
        const Transform t = DoubleExpTransform(omega);
        const ChebSeries<double> s(coeffs);
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs) out.push_back(tcp_eval<double>(t, s, x));
        return out;
      },
      py::arg("coeffs"), py::arg("x"), py::arg("omega"));

  m.def(
      "solve_eigen",
      [](double mu1, double mu2, std::size_t k, std::size_t n_max, int threads) {
        EigenOptions o;
        o.k = k;
        o.n_max = n_max;
        o.threads = threads;
        EigenResult r;
        {
          py::gil_scoped_release release;
          r = solve_eigen(mu1, mu2, o);
        }
        std::vector<cplx> lam;
        for (const auto& row : r.rows) lam.push_back(row.lambda);
        return py::make_tuple(lam, r.N_final);
      },
      py::arg("mu1"), py::arg("mu2"), py::arg("k") = 6, py::arg("n_max") = 1024, py::arg("threads") = 1,
      "Smallest-modulus eigenvalues (pairs listed once) and the final truncation size.");

  m.def("presets", &cli::preset_names);
  m.def("run_job", &run_job, py::arg("command"), py::arg("job_json") = "", py::arg("preset") = "",
        py::arg("out") = std::filesystem::path("fracspec-out"), py::arg("threads") = 1,
        "Runs a job document or preset exactly as the command line tool does; returns the exit status.");
}
