#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace modt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised for malformed or inconsistent input data (CSV/config/design files).
// The message always names the offending file and, where known, the row.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a solver hits an internal contradiction that indicates a bug or
// a violated precondition (e.g. an infeasible Benders subproblem).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a configured resource limit (time, iterations, nodes) stops a
// run before convergence.  The CLI maps this to its own exit code.
class LimitReached : public std::runtime_error {
 public:
  explicit LimitReached(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool close_abs(double a, double b, double tol) {
  return std::fabs(a - b) <= tol;
}

inline bool close_rel(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// FNV-1a, used for cut/design fingerprints and input-file hashes in the run
// manifest.  Stability across platforms matters more than collision strength.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t seed = 1469598103934665603ULL) {
  return fnv1a64(s.data(), s.size(), seed);
}

}  // namespace modt
