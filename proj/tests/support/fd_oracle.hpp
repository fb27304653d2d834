#pragma once

// Finite-difference oracles.  These are deliberately independent of the jet
// machinery: they only ever call plain double-valued functions, so they can
// serve as a cross-check on every derivative the library produces.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "fourframes/common.hpp"

namespace fourframes::testing {

using ScalarFn = std::function<double(const Vec4&)>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using MetricFn = std::function<Mat4(const Vec4&)>;

inline double fd_partial(const ScalarFn& f, const Vec4& p, int var,
                         double h = 1e-5) {
  Vec4 a = p, b = p;
  a[var] += h;
  b[var] -= h;
  return (f(a) - f(b)) / (2.0 * h);
}

inline double fd_second(const ScalarFn& f, const Vec4& p, int v1, int v2,
                        double h = 1e-3) {
  if (v1 == v2) {
    Vec4 a = p, b = p;
    a[v1] += h;
    b[v1] -= h;
    return (f(a) - 2.0 * f(p) + f(b)) / (h * h);
  }
  Vec4 pp = p, pm = p, mp = p, mm = p;
  pp[v1] += h;
  pp[v2] += h;
  pm[v1] += h;
  pm[v2] -= h;
  mp[v1] -= h;
  mp[v2] += h;
  mm[v1] -= h;
  mm[v2] -= h;
  return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
}

// Plain Gauss-Jordan inverse, local to the oracle on purpose.
inline Mat4 fd_inverse4(Mat4 m) {
  Mat4 inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1.0;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    if (std::fabs(m[piv][col]) < 1e-14) {
      throw std::runtime_error("fd_inverse4: singular matrix");
    }
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    double d = m[col][col];
    for (int c = 0; c < 4; ++c) {
      m[col][c] /= d;
      inv[col][c] /= d;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = m[r][col];
      for (int c = 0; c < 4; ++c) {
        m[r][c] -= f * m[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// Christoffel symbols Gamma^a_{bc} from central differences of the metric.
inline std::array<std::array<std::array<double, 4>, 4>, 4> fd_christoffel(
    const MetricFn& g, const Vec4& p, double h = 1e-3) {
  Mat4 g0 = g(p);
  Mat4 ginv = fd_inverse4(g0);
  std::array<Mat4, 4> dg{};
  for (int v = 0; v < 4; ++v) {
    Vec4 a = p, b = p;
    a[v] += h;
    b[v] -= h;
    Mat4 ga = g(a), gb = g(b);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        dg[v][i][j] = (ga[i][j] - gb[i][j]) / (2.0 * h);
      }
    }
  }
  std::array<std::array<std::array<double, 4>, 4>, 4> gamma{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (int m = 0; m < 4; ++m) {
          s += ginv[a][m] * (dg[b][m][c] + dg[c][m][b] - dg[m][b][c]);
        }
        gamma[a][b][c] = 0.5 * s;
      }
    }
  }
  return gamma;
}

// Fully lowered curvature tensor R_{abcd}, antisymmetric in (a,b) and (c,d),
// in the classical sign convention R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]:
//
//   R_abcd = 1/2 (d_b d_c g_ad + d_a d_d g_bc - d_b d_d g_ac - d_a d_c g_bd)
//            + g_np (G^n_bc G^p_ad - G^n_bd G^p_ac)
//
// assembled purely from finite differences of metric values.
inline double fd_riemann_lowered(
    const MetricFn& g, const Vec4& p,
    const std::array<std::array<std::array<double, 4>, 4>, 4>& gamma, int a,
    int b, int c, int d, double h = 1e-3) {
  auto comp = [&](int i, int j) {
    return ScalarFn([&g, i, j](const Vec4& q) { return g(q)[i][j]; });
  };
  double dd = 0.5 * (fd_second(comp(a, d), p, b, c, h) +
                     fd_second(comp(b, c), p, a, d, h) -
                     fd_second(comp(a, c), p, b, d, h) -
                     fd_second(comp(b, d), p, a, c, h));
  Mat4 g0 = g(p);
  double gg = 0.0;
  for (int n = 0; n < 4; ++n) {
    for (int q = 0; q < 4; ++q) {
      gg += g0[n][q] *
            (gamma[n][b][c] * gamma[q][a][d] - gamma[n][b][d] * gamma[q][a][c]);
    }
  }
  return dd + gg;
}

}  // namespace fourframes::testing
