#include "jobs.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fracspec/io.hpp"
#include "fracspec/solver.hpp"

namespace fracspec::cli {

namespace {

struct PresetEntry {
  const char* name;
  const char* text;
};

constexpr PresetEntry kPresets[] = {
#include "presets.inc"
};

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw JobError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw JobError(where + ": unknown key '" + key + "'");
  }
}

void require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw JobError(where + ": missing key '" + std::string(key) + "'");
}

double get_number(const Json& obj, const char* key, const std::string& where) {
  require(obj, key, where);
  const auto& v = obj.at(key);
  if (!v.is_number()) throw JobError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double get_number(const Json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

std::size_t get_size(const Json& obj, const char* key, std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw JobError(where + "." + key + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

bool get_bool(const Json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw JobError(where + "." + key + ": expected true or false");
  return obj.at(key).get<bool>();
}

std::string get_string(const Json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw JobError(where + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

// f for u + I^{1/2}_riesz[u] = f with u = 2 Gamma(1/2) cos(pi/4) sqrt(1+x).
double riesz_half_rhs(const TransformedPoint& p) {
  const double C = 2.0 * std::tgamma(0.5) * std::cos(kPi / 4);
  const double sq = std::sqrt(0.5 * p.one_minus_x());
  const double at = std::log1p(sq) + 0.5 * (std::log(2.0) - p.log1px);
  return C * p.pow1p(0.5) + std::sqrt(2.0 * p.one_minus_x()) + p.one_plus_x() * (kPi / 2 + at);
}

const std::map<std::string, RealFn>& builtins() {
  static const std::map<std::string, RealFn> table{{"riesz_half_rhs", riesz_half_rhs}};
  return table;
}

// number | {"sum": [{"coef", "pow_1px", "pow_1mx"}]} | {"builtin": name}
RealFn parse_function(const Json& v, const std::string& where) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](const TransformedPoint&) { return c; };
  }
  if (!v.is_object()) throw JobError(where + ": expected a number or a function object");
  if (v.contains("builtin")) {
    check_keys(v, {"builtin"}, where);
    const auto name = get_string(v, "builtin", "", where);
    const auto it = builtins().find(name);
    if (it == builtins().end()) throw JobError(where + ": unknown builtin '" + name + "'");
    return it->second;
  }
  check_keys(v, {"sum"}, where);
  require(v, "sum", where);
  if (!v.at("sum").is_array() || v.at("sum").empty()) throw JobError(where + ".sum: expected a nonempty array");
  struct Power {
    double c, p, q;
  };
  std::vector<Power> terms;
  for (std::size_t i = 0; i < v.at("sum").size(); ++i) {
    const auto& t = v.at("sum")[i];
    const std::string w = where + ".sum[" + std::to_string(i) + "]";
    check_keys(t, {"coef", "pow_1px", "pow_1mx"}, w);
    terms.push_back({get_number(t, "coef", 1.0, w), get_number(t, "pow_1px", 0.0, w), get_number(t, "pow_1mx", 0.0, w)});
  }
  return [terms](const TransformedPoint& pt) {
    double s = 0.0;
    for (const auto& t : terms) {
      double term = t.c;
      if (t.p != 0.0) term *= pt.pow1p(t.p);
      if (t.q != 0.0) term *= pt.pow1m(t.q);
      s += term;
    }
    return s;
  };
}

TransformedPoint point_at(double x) {
  return {0.0, x, std::log1p(x), std::log1p(-x)};
}

Transform parse_transform(const Json& v, const std::string& where) {
  check_keys(v, {"kind", "omega", "beta"}, where);
  const auto k = get_string(v, "kind", "de", where);
  try {
    if (k == "de") return DoubleExpTransform(get_number(v, "omega", where));
    if (k == "algebraic") return AlgebraicTransform(get_number(v, "beta", where));
  } catch (const fracspec::Error& e) {
    throw JobError(where + ": " + e.what());
  }
  throw JobError(where + ".kind: expected 'de' or 'algebraic'");
}

KernelOptions parse_kernel(const Json& v, const std::string& where) {
  check_keys(v, {"K", "L", "tol", "max_rank", "require_tolerance"}, where);
  KernelOptions k;
  k.K = get_size(v, "K", k.K, where);
  k.L = get_size(v, "L", k.L, where);
  k.tol = get_number(v, "tol", k.tol, where);
  k.max_rank = get_size(v, "max_rank", k.max_rank, where);
  k.require_tolerance = get_bool(v, "require_tolerance", k.require_tolerance, where);
  if (!(k.tol > 0)) throw JobError(where + ".tol: must be positive");
  return k;
}

TruncationPolicy parse_policy(const Json& v, TruncationPolicy p, const RunOptions& opts, const std::string& where) {
  if (!v.is_null()) {
    check_keys(v, {"n_start", "n_max", "tol", "eval_points", "full_sweep", "max_condition"}, where);
    p.n_start = get_size(v, "n_start", p.n_start, where);
    p.n_max = get_size(v, "n_max", p.n_max, where);
    p.tol = get_number(v, "tol", p.tol, where);
    p.eval_points = get_size(v, "eval_points", p.eval_points, where);
    p.full_sweep = get_bool(v, "full_sweep", p.full_sweep, where);
    p.max_condition = get_number(v, "max_condition", p.max_condition, where);
  }
  if (opts.n_max) p.n_max = *opts.n_max;
  if (opts.tol) p.tol = *opts.tol;
  if (p.n_start < 4 || p.n_max < p.n_start) throw JobError(where + ": need 4 <= n_start <= n_max");
  if (!(p.tol > 0)) throw JobError(where + ".tol: must be positive");
  if (p.eval_points < 2) throw JobError(where + ".eval_points: need at least 2");
  return p;
}

Side parse_side(const std::string& s, const std::string& where) {
  try {
    return side_from_string(s);
  } catch (const fracspec::Error& e) {
    throw JobError(where + ": " + e.what());
  }
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw fracspec::Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... fields) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cell(fields)), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw fracspec::Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Non-finite values are not representable in JSON; they are written as null.
nlohmann::ordered_json num(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json transform_json(const Transform& t) {
  if (kind(t) == TransformKind::double_exponential) return {{"kind", "de"}, {"omega", parameter(t)}};
  return {{"kind", "algebraic"}, {"beta", parameter(t)}};
}

void write_convergence(const std::filesystem::path& dir, const std::vector<ConvergenceRecord>& history) {
  Csv csv(dir / "convergence.csv", "N,cauchy_error,residual");
  for (const auto& h : history) csv.row(h.N, h.cauchy_error, h.residual);
}

template <Scalar S>
void write_solution(const std::filesystem::path& dir, const Solution<S>& sol, std::size_t samples) {
  Csv csv(dir / "solution.csv", "x,re_u,im_u");
  for (double x : equispaced(samples)) {
    const cplx u = sol(x);
    csv.row(x, u.real(), u.imag());
  }
  nlohmann::ordered_json c;
  c["transform"] = transform_json(sol.transform);
  c["N"] = sol.coeffs.size();
  std::vector<double> re, im;
  for (const S& v : sol.coeffs.coeffs) {
    re.push_back(std::real(v));
    im.push_back(std::imag(v));
  }
  c["re"] = re;
  c["im"] = im;
  write_json(dir / "coefficients.json", c);
}

nlohmann::ordered_json history_json(const std::vector<ConvergenceRecord>& history) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& h : history) {
    arr.push_back({{"N", h.N}, {"cauchy_error", num(h.cauchy_error)}, {"residual", num(h.residual)},
                   {"condition", num(h.condition)}});
  }
  return arr;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int solve_fie_job(const Json& job, const RunOptions& opts) {
  check_keys(job, {"kind", "terms", "rhs", "exact", "transform", "singularities", "policy", "samples"}, "job");
  ProblemSpec spec;
  spec.threads = opts.threads;
  require(job, "terms", "job");
  if (!job.at("terms").is_array() || job.at("terms").empty()) throw JobError("job.terms: expected a nonempty array");
  for (std::size_t i = 0; i < job.at("terms").size(); ++i) {
    const auto& t = job.at("terms")[i];
    const std::string w = "job.terms[" + std::to_string(i) + "]";
    check_keys(t, {"mu", "side", "a", "b", "kernel"}, w);
    Term term;
    term.mu = get_number(t, "mu", w);
    if (!(term.mu >= 0)) throw JobError(w + ".mu: must be nonnegative");
    term.side = parse_side(get_string(t, "side", "left", w), w + ".side");
    if (t.contains("a")) term.a = parse_function(t.at("a"), w + ".a");
    if (t.contains("b")) term.b = parse_function(t.at("b"), w + ".b");
    if (t.contains("kernel")) term.kernel = parse_kernel(t.at("kernel"), w + ".kernel");
    spec.terms.push_back(std::move(term));
  }
  require(job, "rhs", "job");
  spec.rhs = parse_function(job.at("rhs"), "job.rhs");
  RealFn exact;
  if (job.contains("exact")) exact = parse_function(job.at("exact"), "job.exact");
  if (job.contains("transform")) spec.transform = parse_transform(job.at("transform"), "job.transform");
  if (job.contains("singularities")) {
    const auto& arr = job.at("singularities");
    if (!arr.is_array()) throw JobError("job.singularities: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string w = "job.singularities[" + std::to_string(i) + "]";
      check_keys(arr[i], {"gamma", "fnorm"}, w);
      spec.singularities.push_back({get_number(arr[i], "gamma", w), get_number(arr[i], "fnorm", 1.0, w)});
    }
  }
  if (!spec.transform && spec.singularities.empty()) {
    throw JobError("job: give either a transform or at least one singularity declaration");
  }
  spec.policy = parse_policy(job.value("policy", Json()), TruncationPolicy{}, opts, "job.policy");
  const std::size_t samples = get_size(job, "samples", 1001, "job");
  if (samples < 2) throw JobError("job.samples: need at least 2");

  std::filesystem::create_directories(opts.out);
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::ordered_json summary;
  summary["kind"] = "fie";
  try {
    const auto sol = solve_fie(spec);
    write_convergence(opts.out, sol.history);
    write_solution(opts.out, sol, samples);
    summary["converged"] = true;
    summary["transform"] = transform_json(sol.transform);
    summary["N_final"] = sol.N_final;
    summary["residual"] = num(sol.residual);
    summary["condition"] = num(sol.condition);
    if (exact) {
      double err = 0.0;
      for (double x : equispaced(10000)) err = std::max(err, std::abs(sol(x) - exact(point_at(x))));
      summary["max_error"] = num(err);
    }
    summary["history"] = history_json(sol.history);
    summary["runtime_seconds"] = seconds_since(t0);
    write_json(opts.out / "summary.json", summary);
    return 0;
  } catch (const ConvergenceError& e) {
    write_convergence(opts.out, e.history());
    summary["converged"] = false;
    summary["error"] = e.what();
    summary["history"] = history_json(e.history());
    write_json(opts.out / "summary.json", summary);
    throw;
  }
}

int solve_airy_job(const Json& job, const RunOptions& opts) {
  check_keys(job, {"kind", "epsilon", "ansatz", "omega", "policy", "samples"}, "job");
  const double eps = get_number(job, "epsilon", "job");
  if (!(eps > 0)) throw JobError("job.epsilon: must be positive");
  AiryOptions ao;
  ao.threads = opts.threads;
  const auto ansatz = get_string(job, "ansatz", "sqrt", "job");
  if (ansatz == "sqrt") {
    ao.ansatz = AiryAnsatz::sqrt;
  } else if (ansatz == "linear") {
    ao.ansatz = AiryAnsatz::linear;
  } else {
    throw JobError("job.ansatz: expected 'sqrt' or 'linear'");
  }
  if (job.contains("omega")) ao.omega = get_number(job, "omega", "job");
  ao.policy = parse_policy(job.value("policy", Json()), ao.policy, opts, "job.policy");
  const std::size_t samples = get_size(job, "samples", 1001, "job");
  if (samples < 2) throw JobError("job.samples: need at least 2");

  std::filesystem::create_directories(opts.out);
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::ordered_json summary;
  summary["kind"] = "airy";
  summary["epsilon"] = eps;
  try {
    const auto r = solve_fde_airy(eps, ao);
    write_convergence(opts.out, r.u.history);
    write_solution(opts.out, r.u, samples);
    summary["converged"] = true;
    summary["transform"] = transform_json(r.u.transform);
    summary["N_final"] = r.u.N_final;
    summary["a"] = {{"re", r.a.real()}, {"im", r.a.imag()}};
    summary["boundary_residual_left"] = num(r.residual_left);
    summary["boundary_residual_right"] = num(r.residual_right);
    summary["residual"] = num(r.u.residual);
    summary["history"] = history_json(r.u.history);
    summary["runtime_seconds"] = seconds_since(t0);
    write_json(opts.out / "summary.json", summary);
    return 0;
  } catch (const ConvergenceError& e) {
    write_convergence(opts.out, e.history());
    summary["converged"] = false;
    summary["error"] = e.what();
    summary["history"] = history_json(e.history());
    write_json(opts.out / "summary.json", summary);
    throw;
  }
}

void write_eigen(const std::filesystem::path& dir, const EigenResult& r, nlohmann::ordered_json& summary) {
  {
    Csv csv(dir / "eigenvalues.csv", "index,re_lambda,im_lambda,pair");
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      csv.row(i, r.rows[i].lambda.real(), r.rows[i].lambda.imag(), r.rows[i].pair);
    }
  }
  {
    Csv csv(dir / "convergence.csv", "N,cauchy_error,max_tail");
    for (const auto& h : r.history) csv.row(h.N, h.cauchy_error, h.max_tail);
  }
  {
    std::string header = "n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      header += ",re_v" + std::to_string(i) + ",im_v" + std::to_string(i);
    }
    std::ofstream out(dir / "eigenvector_coefficients.csv");
    if (!out) throw fracspec::Error("cannot write eigenvector_coefficients.csv");
    out << header << '\n';
    for (Eigen::Index n = 0; n < r.vectors.rows(); ++n) {
      out << n;
      for (Eigen::Index c = 0; c < r.vectors.cols(); ++c) {
        out << ',' << format_double(r.vectors(n, c).real()) << ',' << format_double(r.vectors(n, c).imag());
      }
      out << '\n';
    }
  }
  summary["transform"] = transform_json(r.transform);
  summary["theta"] = r.theta;
  summary["N_final"] = r.N_final;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    rows.push_back({{"re", r.rows[i].lambda.real()}, {"im", r.rows[i].lambda.imag()}, {"pair", r.rows[i].pair},
                    {"residual", num(i < r.eigen_residuals.size() ? r.eigen_residuals[i] : NAN)}});
  }
  summary["eigenvalues"] = rows;
}

std::filesystem::path with_extension(std::filesystem::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

Json preset(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return Json::parse(p.text);
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw JobError("unknown preset '" + name + "' (known: " + known + ")");
}

Json load_job_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw JobError("cannot open job file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw JobError("malformed job file " + path.string() + ": " + e.what());
  }
}

int run_solve(const Json& job, const RunOptions& opts) {
  if (!job.is_object()) throw JobError("job: expected an object");
  const auto kind = get_string(job, "kind", "fie", "job");
  if (kind == "fie") return solve_fie_job(job, opts);
  if (kind == "airy") return solve_airy_job(job, opts);
  throw JobError("job.kind: expected 'fie' or 'airy'");
}

int run_eig(const Json& job, const RunOptions& opts) {
  check_keys(job, {"mu1", "mu2", "k", "n_start", "n_max", "plateau_tol", "tail_tol", "omega"}, "job");
  EigenOptions eo;
  eo.threads = opts.threads;
  const double mu1 = get_number(job, "mu1", "job");
  const double mu2 = get_number(job, "mu2", "job");
  eo.k = get_size(job, "k", eo.k, "job");
  eo.n_start = get_size(job, "n_start", eo.n_start, "job");
  eo.n_max = get_size(job, "n_max", eo.n_max, "job");
  eo.plateau_tol = get_number(job, "plateau_tol", eo.plateau_tol, "job");
  eo.tail_tol = get_number(job, "tail_tol", eo.tail_tol, "job");
  if (job.contains("omega")) eo.omega = get_number(job, "omega", "job");
  if (opts.n_max) eo.n_max = *opts.n_max;
  if (opts.tol) eo.plateau_tol = *opts.tol;
  if (eo.k == 0) throw JobError("job.k: must be positive");
  if (eo.n_start < 4 || eo.n_max < eo.n_start) throw JobError("job: need 4 <= n_start <= n_max");
  if (!(eo.plateau_tol > 0) || !(eo.tail_tol > 0)) throw JobError("job: tolerances must be positive");
  const int l = static_cast<int>(std::ceil(mu1));
  if (!(l >= 2 && mu1 > l - 1 && mu2 >= 0 && mu2 < l - 1)) {
    throw JobError("job: orders must satisfy 0 <= mu2 < l - 1 < mu1 < l for an integer l >= 2");
  }

  std::filesystem::create_directories(opts.out);
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::ordered_json summary;
  summary["kind"] = "eig";
  summary["mu1"] = mu1;
  summary["mu2"] = mu2;
  try {
    const auto r = solve_eigen(mu1, mu2, eo);
    summary["converged"] = true;
    write_eigen(opts.out, r, summary);
    summary["runtime_seconds"] = seconds_since(t0);
    write_json(opts.out / "summary.json", summary);
    return 0;
  } catch (const EigenConvergenceError& e) {
    summary["converged"] = false;
    summary["error"] = e.what();
    write_eigen(opts.out, e.partial(), summary);
    write_json(opts.out / "summary.json", summary);
    throw;
  }
}

int run_pseudospectra(const Json& job, const RunOptions& opts) {
  check_keys(job, {"mu", "region", "resolution", "lanczos", "n_start", "n_max", "truncation_tol", "omega"}, "job");
  PseudospectraJob pj;
  pj.threads = opts.threads;
  pj.mu = get_number(job, "mu", pj.mu, "job");
  if (job.contains("region")) {
    const auto& r = job.at("region");
    if (!r.is_array() || r.size() != 4 || !std::all_of(r.begin(), r.end(), [](const Json& v) { return v.is_number(); })) {
      throw JobError("job.region: expected [re_lo, re_hi, im_lo, im_hi]");
    }
    pj.re_lo = r[0].get<double>();
    pj.re_hi = r[1].get<double>();
    pj.im_lo = r[2].get<double>();
    pj.im_hi = r[3].get<double>();
  }
  if (job.contains("resolution")) {
    const auto& r = job.at("resolution");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer() ||
        r[0].get<long long>() < 1 || r[1].get<long long>() < 1) {
      throw JobError("job.resolution: expected [n_re, n_im] with positive integers");
    }
    pj.n_re = r[0].get<std::size_t>();
    pj.n_im = r[1].get<std::size_t>();
  }
  if (job.contains("lanczos")) {
    const auto& l = job.at("lanczos");
    check_keys(l, {"max_iter", "tol"}, "job.lanczos");
    pj.lanczos_max_iter = get_size(l, "max_iter", pj.lanczos_max_iter, "job.lanczos");
    pj.lanczos_tol = get_number(l, "tol", pj.lanczos_tol, "job.lanczos");
  }
  pj.n_start = get_size(job, "n_start", pj.n_start, "job");
  pj.n_max = get_size(job, "n_max", pj.n_max, "job");
  pj.truncation_tol = get_number(job, "truncation_tol", pj.truncation_tol, "job");
  if (job.contains("omega")) pj.omega = get_number(job, "omega", "job");
  if (opts.n_max) pj.n_max = *opts.n_max;
  if (opts.tol) pj.truncation_tol = *opts.tol;
  if (!(pj.mu > 0 && pj.mu < 1)) throw JobError("job.mu: must lie in (0, 1)");
  if (!(pj.re_hi >= pj.re_lo) || !(pj.im_hi >= pj.im_lo)) throw JobError("job.region: empty rectangle");
  if (pj.n_start < 4 || pj.n_max < pj.n_start) throw JobError("job: need 4 <= n_start <= n_max");
  if (pj.lanczos_max_iter == 0 || !(pj.lanczos_tol > 0) || !(pj.truncation_tol > 0)) {
    throw JobError("job: Lanczos settings and tolerances must be positive");
  }

  std::filesystem::create_directories(opts.out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto points = pseudospectra(pj);
  std::size_t flagged = 0;
  {
    Csv csv(opts.out / "grid.csv", "re_z,im_z,value,flagged");
    for (const auto& p : points) {
      csv.row(p.z.real(), p.z.imag(), p.value, p.flagged);
      flagged += p.flagged ? 1 : 0;
    }
  }
  nlohmann::ordered_json summary;
  summary["kind"] = "pseudospectra";
  summary["mu"] = pj.mu;
  summary["region"] = {pj.re_lo, pj.re_hi, pj.im_lo, pj.im_hi};
  summary["resolution"] = {pj.n_re, pj.n_im};
  summary["epsilon_levels"] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12};
  summary["flagged_points"] = flagged;
  summary["runtime_seconds"] = seconds_since(t0);
  write_json(opts.out / "summary.json", summary);
  return 0;
}

int run_build(const BuildArgs& a) {
  if (!(a.mu > 0) || !std::isfinite(a.mu)) throw JobError("--mu: must be a positive number");
  if (a.n < 1) throw JobError("--n: must be positive");
  if (a.out.empty()) throw JobError("--out: output file required");
  const Side side = parse_side(a.side, "--side");
  if (side == Side::riesz) {
    const double r = std::remainder(a.mu, 2.0);
    if (std::abs(std::abs(r) - 1.0) <= 1e-8) throw JobError("--mu: Riesz operator undefined at odd integer orders");
  }
  Transform t;
  if (a.transform == "de") {
    if (a.beta) throw JobError("--beta: only valid with --transform algebraic");
    try {
      t = DoubleExpTransform(a.omega ? *a.omega : select_omega(SingularityInfo{a.mu, 1.0}));
    } catch (const fracspec::Error& e) {
      throw JobError(std::string("--omega: ") + e.what());
    }
  } else if (a.transform == "algebraic") {
    if (a.omega) throw JobError("--omega: only valid with --transform de");
    try {
      t = AlgebraicTransform(a.beta ? *a.beta : a.mu);
    } catch (const fracspec::Error& e) {
      throw JobError(std::string("--beta: ") + e.what());
    }
  } else {
    throw JobError("--transform: expected 'de' or 'algebraic'");
  }
  KernelOptions ko;
  ko.K = a.K;
  ko.L = a.L;
  if (a.kernel_tol) {
    if (!(*a.kernel_tol > 0)) throw JobError("--kernel-tol: must be positive");
    ko.tol = *a.kernel_tol;
  }
  const FIOApprox op = side == Side::riesz ? build_riesz(a.mu, t, a.n, ko, a.threads)
                                           : build_fio(t, a.mu, side, a.n, ko, a.threads);
  if (a.out.has_parent_path()) std::filesystem::create_directories(a.out.parent_path());
  save_fio(a.out, op);
  std::ofstream meta(with_extension(a.out, ".json"));
  if (!meta) throw fracspec::Error("cannot write metadata next to " + a.out.string());
  meta << fio_metadata_json(op) << '\n';
  return 0;
}

}  // namespace fracspec::cli
