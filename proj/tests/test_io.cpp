#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fracspec/io.hpp"
#include "json.hpp"

using namespace fracspec;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fracspec_test_" + name);
}

}  // namespace

TEST_CASE("operator file roundtrip") {
  for (const Transform& t : {Transform(DoubleExpTransform(3.5)), Transform(AlgebraicTransform(0.5))}) {
    const auto op = build_fio(t, 0.5, Side::left, 48);
    const auto path = temp_file("op.bin");
    save_fio(path, op);
    const auto back = load_fio(path);
    CHECK(back.A == op.A);
    CHECK(back.mu == op.mu);
    CHECK(back.side == op.side);
    CHECK(back.N == op.N);
    CHECK(kind(back.transform) == kind(op.transform));
    CHECK(parameter(back.transform) == parameter(op.transform));
    CHECK(back.kernel_rank == op.kernel_rank);
    CHECK(back.lower_bandwidth == op.lower_bandwidth);
    std::filesystem::remove(path);
  }
}

TEST_CASE("kernel file roundtrip") {
  const Transform t = DoubleExpTransform(3.5);
  const auto k = make_kernel(t, 0.5, Side::right);
  const auto path = temp_file("kernel.bin");
  save_kernel(path, k, t);
  Transform t2;
  const auto back = load_kernel(path, t2);
  CHECK(parameter(t2) == 3.5);
  REQUIRE(back.rank() == k.rank());
  CHECK(back.side == Side::right);
  CHECK(back(0.3, 0.7) == k(0.3, 0.7));
  CHECK_THROWS_AS((void)load_fio(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt files are rejected") {
  const auto path = temp_file("bad.bin");
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOTMAGIC and some bytes";
  }
  CHECK_THROWS_AS((void)load_fio(path), FormatError);
  {
    std::ofstream f(path, std::ios::binary);
    f.write(kFileMagic, 8);
  }
  CHECK_THROWS_AS((void)load_fio(path), FormatError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS((void)load_fio(temp_file("missing.bin")), Error);
}

TEST_CASE("metadata json") {
  KernelOptions o;
  o.K = o.L = 80;
  const auto op = build_fio(DoubleExpTransform(3.154), 1.0, Side::left, 64, o);
  const auto j = nlohmann::json::parse(fio_metadata_json(op));
  CHECK(j["mu"] == 1.0);
  CHECK(j["side"] == "left");
  CHECK(j["transform"]["kind"] == "de");
  CHECK(j["kernel"]["rank"] == 28);
  CHECK(j["N"] == 64);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
