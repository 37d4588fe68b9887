#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ddsm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Library-wide error type. Construction errors, precondition violations and
/// numerical failures all surface as Error; callers (CLI, tests) catch it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

/// Formats a double with 17 significant digits, enough to round-trip any
/// 64-bit float through decimal text.
inline std::string format_double(double x) {
  char buf[40];
  int len = std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf, static_cast<size_t>(len));
}

/// FNV-1a 64-bit hash, used for input-file digests in run manifests.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ddsm
