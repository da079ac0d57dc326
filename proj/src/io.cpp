#include "fracspec/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace fracspec {

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
  }
  template <class T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void header(PayloadKind kind) {
    out_.write(kFileMagic, sizeof kFileMagic);
    put<std::uint32_t>(kFileVersion);
    put<std::uint32_t>(static_cast<std::uint32_t>(kind));
  }
  void finish() {
    out_.flush();
    if (!out_) throw FormatError("write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path.string());
  }
  template <class T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw FormatError("truncated file");
    return to_little(v);
  }
  void header(PayloadKind kind) {
    char magic[sizeof kFileMagic];
    in_.read(magic, sizeof magic);
    if (!in_ || std::memcmp(magic, kFileMagic, sizeof magic) != 0) throw FormatError("bad magic");
    if (get<std::uint32_t>() != kFileVersion) throw FormatError("unsupported format version");
    if (get<std::uint32_t>() != static_cast<std::uint32_t>(kind)) throw FormatError("unexpected payload kind");
  }
  std::uint64_t count(std::uint64_t limit) {
    const auto n = get<std::uint64_t>();
    if (n > limit) throw FormatError("implausible size field");
    return n;
  }

 private:
  std::ifstream in_;
};

constexpr std::uint64_t kMaxDim = 1u << 20;

void put_transform(Writer& w, const Transform& t) {
  w.put<std::uint32_t>(kind(t) == TransformKind::double_exponential ? 0 : 1);
  w.put<double>(parameter(t));
}

Transform get_transform(Reader& r) {
  const auto k = r.get<std::uint32_t>();
  const auto p = r.get<double>();
  if (k == 0) return DoubleExpTransform(p);
  if (k == 1) return AlgebraicTransform(p);
  throw FormatError("unknown transform kind");
}

Side get_side(Reader& r) {
  const auto s = r.get<std::uint32_t>();
  if (s > 2) throw FormatError("unknown side");
  return static_cast<Side>(s);
}

void put_series(Writer& w, const ChebSeries<double>& s) {
  w.put<std::uint64_t>(s.size());
  for (double c : s.coeffs) w.put<double>(c);
}

ChebSeries<double> get_series(Reader& r) {
  std::vector<double> c(r.count(kMaxDim));
  for (double& v : c) v = r.get<double>();
  return ChebSeries<double>(std::move(c));
}

}  // namespace

void save_fio(const std::filesystem::path& path, const FIOApprox& op) {
  Writer w(path);
  w.header(PayloadKind::fio);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(op.side));
  w.put<double>(op.mu);
  put_transform(w, op.transform);
  w.put<std::uint64_t>(op.N);
  w.put<std::uint64_t>(op.lower_bandwidth);
  w.put<std::uint64_t>(op.profile.lower);
  w.put<std::uint64_t>(op.profile.upper);
  w.put<std::uint64_t>(op.kernel_rank);
  w.put<std::uint64_t>(op.kernel_K);
  w.put<std::uint64_t>(op.kernel_L);
  // column-major
  for (Eigen::Index j = 0; j < op.A.cols(); ++j) {
    for (Eigen::Index i = 0; i < op.A.rows(); ++i) w.put<double>(op.A(i, j));
  }
  w.finish();
}

FIOApprox load_fio(const std::filesystem::path& path) {
  Reader r(path);
  r.header(PayloadKind::fio);
  FIOApprox op;
  op.side = get_side(r);
  op.mu = r.get<double>();
  op.transform = get_transform(r);
  op.N = r.count(1u << 16);
  op.lower_bandwidth = r.get<std::uint64_t>();
  op.profile.lower = r.get<std::uint64_t>();
  op.profile.upper = r.get<std::uint64_t>();
  op.kernel_rank = r.get<std::uint64_t>();
  op.kernel_K = r.get<std::uint64_t>();
  op.kernel_L = r.get<std::uint64_t>();
  const auto n = static_cast<Eigen::Index>(op.N);
  op.A.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) op.A(i, j) = r.get<double>();
  }
  return op;
}

void save_kernel(const std::filesystem::path& path, const LowRankKernel& kernel, const Transform& t) {
  Writer w(path);
  w.header(PayloadKind::kernel);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(kernel.side));
  w.put<double>(kernel.mu);
  put_transform(w, t);
  w.put<std::uint64_t>(kernel.K);
  w.put<std::uint64_t>(kernel.L);
  w.put<double>(kernel.residual);
  w.put<std::uint64_t>(kernel.rank());
  for (double s : kernel.sigma) w.put<double>(s);
  for (std::size_t j = 0; j < kernel.rank(); ++j) {
    put_series(w, kernel.fcols[j]);
    put_series(w, kernel.gcols[j]);
  }
  w.finish();
}

LowRankKernel load_kernel(const std::filesystem::path& path, Transform& t) {
  Reader r(path);
  r.header(PayloadKind::kernel);
  LowRankKernel k;
  k.side = get_side(r);
  k.mu = r.get<double>();
  t = get_transform(r);
  k.K = r.get<std::uint64_t>();
  k.L = r.get<std::uint64_t>();
  k.residual = r.get<double>();
  const auto rank = r.count(kMaxDim);
  k.sigma.resize(rank);
  for (double& s : k.sigma) s = r.get<double>();
  for (std::size_t j = 0; j < rank; ++j) {
    k.fcols.push_back(get_series(r));
    k.gcols.push_back(get_series(r));
  }
  return k;
}

std::string fio_metadata_json(const FIOApprox& op, int indent) {
  nlohmann::ordered_json j;
  j["format"] = "fracspec-operator";
  j["version"] = kFileVersion;
  j["mu"] = op.mu;
  j["side"] = std::string(to_string(op.side));
  nlohmann::ordered_json t;
  if (kind(op.transform) == TransformKind::double_exponential) {
    t["kind"] = "de";
    t["omega"] = parameter(op.transform);
  } else {
    t["kind"] = "algebraic";
    t["beta"] = parameter(op.transform);
  }
  j["transform"] = t;
  j["N"] = op.N;
  j["lower_bandwidth"] = op.lower_bandwidth;
  j["band_profile"] = {{"lower", op.profile.lower}, {"upper", op.profile.upper}};
  j["kernel"] = {{"rank", op.kernel_rank}, {"K", op.kernel_K}, {"L", op.kernel_L}};
  return j.dump(indent);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace fracspec
