#pragma once

// Small dense linear algebra: 4x4 solves over doubles or jets, and a Jacobi
// eigensolver for symmetric matrices up to 6x6.  Everything is deterministic;
// pivoting ranks candidates by the magnitude of their constant term.

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "fourframes/jet.hpp"

namespace fourframes {

using JMat = std::array<std::array<Jet, 4>, 4>;
using DMat4 = std::array<std::array<double, 4>, 4>;

namespace detail {
inline double pivot_mag(double x) { return std::fabs(x); }
inline double pivot_mag(const Jet& x) { return std::fabs(x.value()); }

inline double make_scalar(double, double v) { return v; }
inline Jet make_scalar(const Jet& like, double v) {
  return jet_constant(v, like.base, like.ord);
}
}  // namespace detail

// Gauss-Jordan inverse with partial pivoting; also returns the determinant.
// T is double or Jet (any commutative ring element with value-magnitude).
template <class T>
std::pair<std::array<std::array<T, 4>, 4>, T> invert4(
    std::array<std::array<T, 4>, 4> m) {
  std::array<std::array<T, 4>, 4> inv;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      inv[i][j] = detail::make_scalar(m[0][0], i == j ? 1.0 : 0.0);
    }
  }
  T det = detail::make_scalar(m[0][0], 1.0);
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (detail::pivot_mag(m[r][col]) > detail::pivot_mag(m[piv][col])) {
        piv = r;
      }
    }
    if (detail::pivot_mag(m[piv][col]) < 1e-300) {
      throw Error(ErrorKind::singular_system, "singular 4x4 system");
    }
    if (piv != col) {
      std::swap(m[piv], m[col]);
      std::swap(inv[piv], inv[col]);
      det = det * (-1.0);
    }
    det = det * m[col][col];
    T dinv = detail::make_scalar(m[col][col], 1.0) / m[col][col];
    for (int c = 0; c < 4; ++c) {
      m[col][c] = m[col][c] * dinv;
      inv[col][c] = inv[col][c] * dinv;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      T f = m[r][col];
      if (detail::pivot_mag(f) == 0.0) continue;
      for (int c = 0; c < 4; ++c) {
        m[r][c] = m[r][c] - f * m[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return {inv, det};
}

// Solve A x = b for a single right-hand side.
template <class T>
std::array<T, 4> solve4(const std::array<std::array<T, 4>, 4>& a,
                        const std::array<T, 4>& b) {
  auto [inv, det] = invert4(a);
  (void)det;
  std::array<T, 4> x;
  for (int i = 0; i < 4; ++i) {
    T s = detail::make_scalar(b[0], 0.0);
    for (int j = 0; j < 4; ++j) s = s + inv[i][j] * b[j];
    x[i] = s;
  }
  return x;
}

// Jet matrix helpers.

inline JMat jmat_zero(const Vec4& base, int ord) {
  JMat m;
  for (auto& row : m) {
    for (auto& x : row) x = jet_constant(0.0, base, ord);
  }
  return m;
}

inline JMat jmat_identity(const Vec4& base, int ord) {
  JMat m = jmat_zero(base, ord);
  for (int i = 0; i < 4; ++i) m[i][i] = jet_constant(1.0, base, ord);
  return m;
}

inline JMat jmat_add(const JMat& a, const JMat& b) {
  JMat r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
  }
  return r;
}

inline JMat jmat_sub(const JMat& a, const JMat& b) {
  JMat r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] - b[i][j];
  }
  return r;
}

inline JMat jmat_scale(const JMat& a, double s) {
  JMat r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] * s;
  }
  return r;
}

inline JMat jmat_scale(const JMat& a, const Jet& s) {
  JMat r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i][j] = a[i][j] * s;
  }
  return r;
}

inline JMat jmat_mul(const JMat& a, const JMat& b) {
  JMat r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Jet s = a[i][0] * b[0][j];
      for (int k = 1; k < 4; ++k) s = s + a[i][k] * b[k][j];
      r[i][j] = s;
    }
  }
  return r;
}

inline JMat jmat_commutator(const JMat& a, const JMat& b) {
  return jmat_sub(jmat_mul(a, b), jmat_mul(b, a));
}

inline JMat jmat_anticommutator(const JMat& a, const JMat& b) {
  return jmat_add(jmat_mul(a, b), jmat_mul(b, a));
}

inline JMat jmat_transpose(const JMat& a) {
  JMat r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i][j] = a[j][i];
  }
  return r;
}

inline Jet jmat_trace(const JMat& a) {
  Jet s = a[0][0];
  for (int i = 1; i < 4; ++i) s = s + a[i][i];
  return s;
}

inline double jmat_max_value(const JMat& a) {
  double m = 0.0;
  for (const auto& row : a) {
    for (const auto& x : row) m = std::max(m, std::fabs(x.value()));
  }
  return m;
}

// Cyclic Jacobi sweeps for a symmetric n x n matrix, n <= 6.  Returns
// eigenvalues in ascending order with matching eigenvector columns.
struct EigenSym {
  int n = 0;
  std::array<double, 6> values{};
  std::array<std::array<double, 6>, 6> vectors{};  // vectors[i][k]: i-th comp of k-th
};

inline EigenSym eigen_sym(std::array<std::array<double, 6>, 6> a, int n) {
  std::array<std::array<double, 6>, 6> v{};
  for (int i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  EigenSym out;
  out.n = n;
  std::array<int, 6> idx{};
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a[idx[j]][idx[j]] < a[idx[i]][idx[i]]) std::swap(idx[i], idx[j]);
    }
  }
  for (int k = 0; k < n; ++k) {
    out.values[k] = a[idx[k]][idx[k]];
    for (int i = 0; i < n; ++i) out.vectors[i][k] = v[i][idx[k]];
  }
  return out;
}

// Singular values of a tall matrix with 4 columns, via the Gram matrix.
// Rows are supplied incrementally; values come back in descending order.
struct GramSVD {
  std::array<std::array<double, 4>, 4> gram{};
  long rows = 0;

  void add_row(const std::array<double, 4>& r) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) gram[i][j] += r[i] * r[j];
    }
    ++rows;
  }

  struct Result {
    std::array<double, 4> sigma{};                 // descending
    std::array<std::array<double, 4>, 4> vectors{};  // vectors[i][k]
  };

  Result finish() const {
    std::array<std::array<double, 6>, 6> a{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) a[i][j] = gram[i][j];
    }
    EigenSym es = eigen_sym(a, 4);
    Result r;
    for (int k = 0; k < 4; ++k) {
      double lam = es.values[3 - k];  // descending
      r.sigma[k] = lam > 0.0 ? std::sqrt(lam) : 0.0;
      for (int i = 0; i < 4; ++i) r.vectors[i][k] = es.vectors[i][3 - k];
    }
    return r;
  }
};

}  // namespace fourframes
