// Deterministic low-discrepancy sampling of chart boxes.
#pragma once

#include <cstdint>
#include <vector>

#include "fourframes/common.hpp"

namespace fourframes {

// Van der Corput radical inverse in the given base.
inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

// Halton points in the box, inset 5% from every face so that finite
// metric margins and open-domain models stay well inside their charts.
// The seed shifts the start index; the sequence itself is fixed, so a
// given (box, n, seed) triple always produces the same points.
inline std::vector<Vec4> sample_points(const Box& box, int n,
                                       std::uint64_t seed) {
  static constexpr std::uint64_t kBases[4] = {2, 3, 5, 7};
  std::vector<Vec4> pts;
  pts.reserve(n > 0 ? static_cast<std::size_t>(n) : 0);
  for (int k = 0; k < n; ++k) {
    std::uint64_t idx = 100 + seed + static_cast<std::uint64_t>(k);
    Vec4 p;
    for (int i = 0; i < 4; ++i) {
      double t = radical_inverse(idx, kBases[i]);
      double w = box.hi[i] - box.lo[i];
      p[i] = box.lo[i] + w * (0.05 + 0.90 * t);
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace fourframes
