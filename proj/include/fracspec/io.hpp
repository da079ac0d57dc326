#pragma once

// On-disk formats: a versioned little-endian binary container for operators
// and kernels, plus JSON metadata describing an operator.

#include <filesystem>
#include <string>

#include "fracspec/fio.hpp"
#include "fracspec/kernel.hpp"

namespace fracspec {

inline constexpr char kFileMagic[8] = {'F', 'R', 'A', 'C', 'S', 'P', 'E', 'C'};
inline constexpr std::uint32_t kFileVersion = 1;

enum class PayloadKind : std::uint32_t { fio = 1, kernel = 2 };

class FormatError : public Error {
 public:
  using Error::Error;
};

void save_fio(const std::filesystem::path& path, const FIOApprox& op);
[[nodiscard]] FIOApprox load_fio(const std::filesystem::path& path);

void save_kernel(const std::filesystem::path& path, const LowRankKernel& kernel, const Transform& t);
/// The transform the kernel was built for is returned through `t`.
[[nodiscard]] LowRankKernel load_kernel(const std::filesystem::path& path, Transform& t);

/// JSON object: mu, side, transform {kind, omega | beta}, N, band profile, kernel rank/K/L.
[[nodiscard]] std::string fio_metadata_json(const FIOApprox& op, int indent = 2);

/// Shortest decimal form that round-trips a double (17 significant digits).
[[nodiscard]] std::string format_double(double v);

}  // namespace fracspec
