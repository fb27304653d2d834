#pragma once

// Shared primitives: points, boxes, error taxonomy.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fourframes {

using Vec4 = std::array<double, 4>;

enum class ErrorKind {
  outside_domain,
  non_finite,
  order_exhausted,
  division_by_zero,
  analytic_domain,
  base_mismatch,
  singular_system,
  singular_metric,
  not_orthonormal,
  wrong_orientation,
  gauge_degenerate,
  insufficient_samples,
  bad_config,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::outside_domain: return "outside_domain";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::order_exhausted: return "order_exhausted";
    case ErrorKind::division_by_zero: return "division_by_zero";
    case ErrorKind::analytic_domain: return "analytic_domain";
    case ErrorKind::base_mismatch: return "base_mismatch";
    case ErrorKind::singular_system: return "singular_system";
    case ErrorKind::singular_metric: return "singular_metric";
    case ErrorKind::not_orthonormal: return "not_orthonormal";
    case ErrorKind::wrong_orientation: return "wrong_orientation";
    case ErrorKind::gauge_degenerate: return "gauge_degenerate";
    case ErrorKind::insufficient_samples: return "insufficient_samples";
    case ErrorKind::bad_config: return "bad_config";
  }
  return "unknown";
}

inline std::string format_point(const Vec4& p) {
  std::ostringstream os;
  os << "(" << p[0] << ", " << p[1] << ", " << p[2] << ", " << p[3] << ")";
  return os.str();
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg),
        kind_(kind) {}

  Error(ErrorKind kind, const std::string& msg, const Vec4& at)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg +
                           " at " + format_point(at)),
        kind_(kind),
        at_(at) {}

  ErrorKind kind() const { return kind_; }
  const std::optional<Vec4>& where() const { return at_; }

 private:
  ErrorKind kind_;
  std::optional<Vec4> at_;
};

// Axis-aligned chart domain.
struct Box {
  Vec4 lo{-1.0, -1.0, -1.0, -1.0};
  Vec4 hi{1.0, 1.0, 1.0, 1.0};

  bool contains(const Vec4& p, double margin = 0.0) const {
    for (int i = 0; i < 4; ++i) {
      if (p[i] < lo[i] - margin || p[i] > hi[i] + margin) return false;
    }
    return true;
  }
};

inline bool finite(double x) { return std::isfinite(x); }

}  // namespace fourframes
