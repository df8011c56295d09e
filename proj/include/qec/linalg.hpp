// Copyright 2026 qeclab authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QEC_LINALG_HPP
#define QEC_LINALG_HPP

// Dense linear algebra for desk-scale matrices (n <= 16 or so): real and
// complex matrices, LU solves, Kronecker products, and a nonsymmetric
// eigensolver (Householder Hessenberg reduction followed by a Francis
// double-shift QR iteration, in the Martin-Wilkinson lineage).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qec {

using Complex = std::complex<double>;

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  bool finite() const {
    for (double v : a)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

inline Mat operator*(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat mul: shape mismatch");
  Mat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

inline Mat operator+(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("mat add: shape mismatch");
  Mat out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

inline Mat operator-(const Mat& x, const Mat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("mat sub: shape mismatch");
  Mat out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
  return out;
}

inline Mat operator*(double s, const Mat& x) {
  Mat out = x;
  for (double& v : out.a) v *= s;
  return out;
}

inline Mat transpose(const Mat& x) {
  Mat out(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  return out;
}

inline std::vector<double> operator*(const Mat& x, const std::vector<double>& v) {
  if (x.cols != static_cast<int>(v.size())) throw std::invalid_argument("mat vec: shape mismatch");
  std::vector<double> out(x.rows, 0.0);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out[i] += x(i, j) * v[j];
  return out;
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows * y.rows, x.cols * y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) {
      const double xij = x(i, j);
      if (xij == 0.0) continue;
      for (int p = 0; p < y.rows; ++p)
        for (int q = 0; q < y.cols; ++q) out(i * y.rows + p, j * y.cols + q) = xij * y(p, q);
    }
  return out;
}

inline double inf_norm(const Mat& x) {
  double best = 0.0;
  for (int i = 0; i < x.rows; ++i) {
    double row = 0.0;
    for (int j = 0; j < x.cols; ++j) row += std::abs(x(i, j));
    best = std::max(best, row);
  }
  return best;
}

// Solves A x = b by LU with partial pivoting; throws on (near-)singular A.
inline std::vector<double> solve(Mat A, std::vector<double> b) {
  const int n = A.rows;
  if (A.cols != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve: shape mismatch");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    if (std::abs(A(piv, k)) < 1e-300) throw std::runtime_error("solve: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = A(i, k) / A(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

struct CMat {
  int rows = 0;
  int cols = 0;
  std::vector<Complex> a;

  CMat() = default;
  CMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Complex(0.0, 0.0)) {}

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Complex(1.0, 0.0);
    return m;
  }

  static CMat from_real(const Mat& x) {
    CMat m(x.rows, x.cols);
    for (std::size_t i = 0; i < x.a.size(); ++i) m.a[i] = Complex(x.a[i], 0.0);
    return m;
  }

  Complex& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  Complex operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

inline CMat operator*(const CMat& x, const CMat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("cmat mul: shape mismatch");
  CMat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const Complex xik = x(i, k);
      if (xik == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

inline CMat kron(const CMat& x, const CMat& y) {
  CMat out(x.rows * y.rows, x.cols * y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) {
      const Complex xij = x(i, j);
      for (int p = 0; p < y.rows; ++p)
        for (int q = 0; q < y.cols; ++q) out(i * y.rows + p, j * y.cols + q) = xij * y(p, q);
    }
  return out;
}

inline double inf_norm(const CMat& x) {
  double best = 0.0;
  for (int i = 0; i < x.rows; ++i) {
    double row = 0.0;
    for (int j = 0; j < x.cols; ++j) row += std::abs(x(i, j));
    best = std::max(best, row);
  }
  return best;
}

// Complex LU factorization with partial pivoting, reporting the pivot ratio
// min|u_kk| / max|u_kk| as a cheap conditioning signal.
struct CluFactors {
  CMat lu;
  std::vector<int> perm;
  double pivot_ratio = 0.0;

  std::vector<Complex> solve(std::vector<Complex> b) const {
    const int n = lu.rows;
    std::vector<Complex> pb(n);
    for (int i = 0; i < n; ++i) pb[i] = b[perm[i]];
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) pb[i] -= lu(i, j) * pb[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) pb[i] -= lu(i, j) * pb[j];
      pb[i] /= lu(i, i);
    }
    return pb;
  }
};

inline CluFactors clu_factor(CMat A) {
  const int n = A.rows;
  if (A.cols != n) throw std::invalid_argument("clu_factor: square matrix required");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  double min_piv = std::numeric_limits<double>::infinity();
  double max_piv = 0.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    double mag = std::abs(A(k, k));
    if (mag == 0.0) {
      // Keep the factorization usable for inverse iteration.
      A(k, k) = Complex(1e-290, 0.0);
      mag = 1e-290;
    }
    min_piv = std::min(min_piv, mag);
    max_piv = std::max(max_piv, mag);
    for (int i = k + 1; i < n; ++i) {
      const Complex f = A(i, k) / A(k, k);
      A(i, k) = f;
      if (f == Complex(0.0, 0.0)) continue;
      for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
    }
  }
  return CluFactors{std::move(A), std::move(perm), max_piv > 0.0 ? min_piv / max_piv : 0.0};
}

inline CMat inverse(const CMat& A) {
  const int n = A.rows;
  const CluFactors f = clu_factor(A);
  if (f.pivot_ratio < 1e-14) throw std::runtime_error("inverse: matrix numerically singular");
  CMat out(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<Complex> e(n, Complex(0.0, 0.0));
    e[j] = Complex(1.0, 0.0);
    const std::vector<Complex> col = f.solve(std::move(e));
    for (int i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

namespace detail {

// Householder reduction of A (in place) to upper Hessenberg form, with the
// orthogonal similarity accumulated into V.  Classic orthes/ortran layout:
// the Householder tails are parked below the subdiagonal until accumulation.
inline void hessenberg(Mat& H, Mat& V) {
  const int n = H.rows;
  const int low = 0;
  const int high = n - 1;
  std::vector<double> ort(n, 0.0);

  for (int m = low + 1; m <= high - 1; ++m) {
    double scale = 0.0;
    for (int i = m; i <= high; ++i) scale += std::abs(H(i, m - 1));
    if (scale == 0.0) continue;

    double h = 0.0;
    for (int i = high; i >= m; --i) {
      ort[i] = H(i, m - 1) / scale;
      h += ort[i] * ort[i];
    }
    double g = std::sqrt(h);
    if (ort[m] > 0) g = -g;
    h -= ort[m] * g;
    ort[m] -= g;

    for (int j = m; j < n; ++j) {
      double f = 0.0;
      for (int i = high; i >= m; --i) f += ort[i] * H(i, j);
      f /= h;
      for (int i = m; i <= high; ++i) H(i, j) -= f * ort[i];
    }
    for (int i = 0; i <= high; ++i) {
      double f = 0.0;
      for (int j = high; j >= m; --j) f += ort[j] * H(i, j);
      f /= h;
      for (int j = m; j <= high; ++j) H(i, j) -= f * ort[j];
    }
    ort[m] = scale * ort[m];
    H(m, m - 1) = scale * g;
  }

  V = Mat::identity(n);
  for (int m = high - 1; m >= low + 1; --m) {
    if (H(m, m - 1) == 0.0) continue;
    for (int i = m + 1; i <= high; ++i) ort[i] = H(i, m - 1);
    for (int j = m; j <= high; ++j) {
      double g = 0.0;
      for (int i = m; i <= high; ++i) g += ort[i] * V(i, j);
      g = (g / ort[m]) / H(m, m - 1);
      for (int i = m; i <= high; ++i) V(i, j) += g * ort[i];
    }
  }
  for (int i = 2; i < n; ++i)
    for (int j = 0; j <= i - 2; ++j) H(i, j) = 0.0;
}

// Francis double-shift QR on a Hessenberg matrix.  On return H is real
// quasi-triangular (the Schur form), V holds the accumulated orthogonal
// transform, and (re, im) the eigenvalues.
inline void francis_qr(Mat& H, Mat& V, std::vector<double>& re, std::vector<double>& im) {
  const int nn = H.rows;
  const int low = 0;
  const int high = nn - 1;
  const double eps = std::numeric_limits<double>::epsilon();
  re.assign(nn, 0.0);
  im.assign(nn, 0.0);

  double norm = 0.0;
  for (int i = 0; i < nn; ++i)
    for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(H(i, j));
  if (norm == 0.0) return;

  int n = nn - 1;
  double exshift = 0.0;
  double p = 0, q = 0, r = 0, s = 0, z = 0, w = 0, x = 0, y = 0;
  int iter = 0;
  int total_iter = 0;

  while (n >= low) {
    int l = n;
    while (l > low) {
      s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(H(l, l - 1)) < eps * s) break;
      --l;
    }

    if (l == n) {
      // Single root.
      H(n, n) += exshift;
      re[n] = H(n, n);
      im[n] = 0.0;
      if (n > low) H(n, n - 1) = 0.0;
      --n;
      iter = 0;
    } else if (l == n - 1) {
      // Pair of roots (real or complex conjugate).
      w = H(n, n - 1) * H(n - 1, n);
      p = (H(n - 1, n - 1) - H(n, n)) / 2.0;
      q = p * p + w;
      z = std::sqrt(std::abs(q));
      H(n, n) += exshift;
      H(n - 1, n - 1) += exshift;
      x = H(n, n);
      if (q >= 0) {
        z = (p >= 0) ? p + z : p - z;
        re[n - 1] = x + z;
        re[n] = re[n - 1];
        if (z != 0.0) re[n] = x - w / z;
        im[n - 1] = 0.0;
        im[n] = 0.0;
        x = H(n, n - 1);
        s = std::abs(x) + std::abs(z);
        if (s != 0.0) {
          p = x / s;
          q = z / s;
          r = std::sqrt(p * p + q * q);
          p /= r;
          q /= r;
          for (int j = n - 1; j < nn; ++j) {
            z = H(n - 1, j);
            H(n - 1, j) = q * z + p * H(n, j);
            H(n, j) = q * H(n, j) - p * z;
          }
          for (int i = 0; i <= n; ++i) {
            z = H(i, n - 1);
            H(i, n - 1) = q * z + p * H(i, n);
            H(i, n) = q * H(i, n) - p * z;
          }
          for (int i = low; i <= high; ++i) {
            z = V(i, n - 1);
            V(i, n - 1) = q * z + p * V(i, n);
            V(i, n) = q * V(i, n) - p * z;
          }
        }
        H(n, n - 1) = 0.0;
        if (n - 1 > low) H(n - 1, n - 2) = 0.0;
      } else {
        re[n - 1] = x + p;
        re[n] = x + p;
        im[n - 1] = z;
        im[n] = -z;
        if (n - 1 > low) H(n - 1, n - 2) = 0.0;
      }
      n -= 2;
      iter = 0;
    } else {
      // Form the implicit double shift and chase the bulge.
      x = H(n, n);
      y = 0.0;
      w = 0.0;
      if (l < n) {
        y = H(n - 1, n - 1);
        w = H(n, n - 1) * H(n - 1, n);
      }
      if (iter == 10 || iter == 20) {
        exshift += x;
        for (int i = low; i <= n; ++i) H(i, i) -= x;
        s = std::abs(H(n, n - 1)) + std::abs(H(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++iter;
      if (++total_iter > 120 * nn)
        throw std::runtime_error("francis_qr: iteration failed to converge");

      int m = n - 2;
      while (m >= l) {
        z = H(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / H(m + 1, m) + H(m, m + 1);
        q = H(m + 1, m + 1) - z - r - s;
        r = H(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            eps * (std::abs(p) *
                   (std::abs(H(m - 1, m - 1)) + std::abs(z) + std::abs(H(m + 1, m + 1)))))
          break;
        --m;
      }
      for (int i = m + 2; i <= n; ++i) {
        H(i, i - 2) = 0.0;
        if (i > m + 2) H(i, i - 3) = 0.0;
      }

      for (int k = m; k <= n - 1; ++k) {
        const bool notlast = (k != n - 1);
        if (k != m) {
          p = H(k, k - 1);
          q = H(k + 1, k - 1);
          r = notlast ? H(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0) s = -s;
        if (s == 0.0) continue;
        if (k != m)
          H(k, k - 1) = -s * x;
        else if (l != m)
          H(k, k - 1) = -H(k, k - 1);
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;

        for (int j = k; j < nn; ++j) {
          p = H(k, j) + q * H(k + 1, j);
          if (notlast) {
            p += r * H(k + 2, j);
            H(k + 2, j) -= p * z;
          }
          H(k, j) -= p * x;
          H(k + 1, j) -= p * y;
        }
        for (int i = 0; i <= std::min(n, k + 3); ++i) {
          p = x * H(i, k) + y * H(i, k + 1);
          if (notlast) {
            p += z * H(i, k + 2);
            H(i, k + 2) -= p * r;
          }
          H(i, k) -= p;
          H(i, k + 1) -= p * q;
        }
        for (int i = low; i <= high; ++i) {
          p = x * V(i, k) + y * V(i, k + 1);
          if (notlast) {
            p += z * V(i, k + 2);
            V(i, k + 2) -= p * r;
          }
          V(i, k) -= p;
          V(i, k + 1) -= p * q;
        }
      }
    }
  }

  // Scrub bulge-chase dust: the only surviving subdiagonal entries are the
  // couplings inside complex 2x2 blocks.
  for (int i = 1; i < nn; ++i) {
    for (int j = 0; j <= i - 2; ++j) H(i, j) = 0.0;
    const bool complex_block = (im[i] != 0.0 && i > 0 && im[i - 1] == -im[i]);
    if (!complex_block) H(i, i - 1) = 0.0;
  }
}

}  // namespace detail

struct SchurDecomposition {
  Mat t;                        // real quasi-triangular factor
  Mat q;                        // orthogonal transform, A = Q T Q^T
  std::vector<Complex> values;  // eigenvalues
};

inline SchurDecomposition real_schur(const Mat& A) {
  if (A.rows != A.cols) throw std::invalid_argument("real_schur: square matrix required");
  if (!A.finite()) throw std::invalid_argument("real_schur: non-finite entries");
  SchurDecomposition out;
  out.t = A;
  detail::hessenberg(out.t, out.q);
  std::vector<double> re, im;
  detail::francis_qr(out.t, out.q, re, im);
  out.values.resize(A.rows);
  for (int i = 0; i < A.rows; ++i) out.values[i] = Complex(re[i], im[i]);
  return out;
}

inline std::vector<Complex> eigenvalues(const Mat& A) { return real_schur(A).values; }

inline double spectral_radius(const Mat& A) {
  double rho = 0.0;
  for (const Complex& v : eigenvalues(A)) rho = std::max(rho, std::abs(v));
  return rho;
}

// Eigenvectors by complex inverse iteration on a shifted LU factorization.
// Columns are normalized so the largest-modulus entry equals one.  The
// residual lets callers detect defective or tightly clustered spectra.
struct EigenDecomposition {
  std::vector<Complex> values;
  CMat vectors;
  double residual = 0.0;
};

inline EigenDecomposition eigen_decompose(const Mat& A) {
  const int n = A.rows;
  EigenDecomposition out;
  out.values = eigenvalues(A);
  out.vectors = CMat(n, n);

  double scale = inf_norm(A);
  if (scale == 0.0) scale = 1.0;
  for (int k = 0; k < n; ++k) {
    CMat shifted = CMat::from_real(A);
    const Complex lam = out.values[k];
    const Complex nudge = Complex(1.0, 1.0) * (1e-11 * scale);
    for (int i = 0; i < n; ++i) shifted(i, i) -= lam + nudge;
    const CluFactors f = clu_factor(std::move(shifted));

    std::vector<Complex> v(n, Complex(1.0, 0.0));
    for (int iter = 0; iter < 3; ++iter) {
      v = f.solve(std::move(v));
      int arg = 0;
      for (int i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
      const Complex top = v[arg];
      if (std::abs(top) == 0.0) break;
      for (Complex& c : v) c /= top;
    }
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v[i];
  }

  double resid = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      Complex acc(0.0, 0.0);
      for (int j = 0; j < n; ++j) acc += A(i, j) * out.vectors(j, k);
      acc -= out.values[k] * out.vectors(i, k);
      resid = std::max(resid, std::abs(acc));
    }
  out.residual = resid / scale;
  return out;
}

}  // namespace qec

#endif  // QEC_LINALG_HPP
