#include "hebbdual/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hebbdual/errors.hpp"

namespace hebbdual {

namespace {

void require_same_size(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size())
    throw dimension_error(std::string(what) + ": length mismatch " +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
}

}  // namespace

Mat Mat::identity(std::size_t n) {
  Mat m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Mat::row(std::size_t i) const {
  Vec out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
  return out;
}

Vec Mat::col(std::size_t j) const {
  Vec out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

double dot(const Vec& a, const Vec& b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, const Vec& x, Vec& y) {
  require_same_size(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vec scaled(const Vec& a, double s) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  require_same_size(a, b, "sub");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vec matvec(const Mat& a, const Vec& x) {
  if (a.cols() != x.size())
    throw dimension_error("matvec: " + std::to_string(a.cols()) + " cols vs " +
                          std::to_string(x.size()) + " entries");
  Vec out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

Vec matvec_transpose(const Mat& a, const Vec& x) {
  if (a.rows() != x.size())
    throw dimension_error("matvec_transpose: " + std::to_string(a.rows()) +
                          " rows vs " + std::to_string(x.size()) + " entries");
  Vec out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * x[i];
  return out;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw dimension_error("matmul: inner dims differ");
  Mat c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double frobenius(const Mat& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j)));
  return m;
}

double row_sum_norm(const Mat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

Vec solve(Mat a, Vec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw dimension_error("solve: matrix not square");
  if (b.size() != n) throw dimension_error("solve: rhs length mismatch");

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) < 1e-300)
      throw numerical_error("solve: matrix is singular to working precision");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

Mat orthonormalize_columns(Mat a) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) proj += a(i, k) * a(i, j);
      for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) -= proj * a(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) nrm += a(i, j) * a(i, j);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12)
      throw numerical_error("orthonormalize_columns: column " +
                            std::to_string(j) + " is linearly dependent");
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) /= nrm;
  }
  return a;
}

bool jacobi_symmetric(Mat a, Vec& values, Mat& vectors, double off_tol,
                      int max_sweeps) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw dimension_error("jacobi_symmetric: not square");
  vectors = Mat::identity(n);
  values.assign(n, 0.0);

  auto off_frobenius = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  bool converged = off_frobenius() < off_tol;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double apj = a(p, j);
          const double aqj = a(q, j);
          a(p, j) = c * apj - s * aqj;
          a(q, j) = s * apj + c * aqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = vectors(i, p);
          const double viq = vectors(i, q);
          vectors(i, p) = c * vip - s * viq;
          vectors(i, q) = s * vip + c * viq;
        }
      }
    }
    converged = off_frobenius() < off_tol;
  }
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  return converged;
}

double min_eigenvalue_symmetric(const Mat& a) {
  Vec values;
  Mat vectors;
  if (!jacobi_symmetric(a, values, vectors, 1e-12, 100))
    throw numerical_error("min_eigenvalue_symmetric: jacobi did not converge");
  double m = values.empty() ? 0.0 : values[0];
  for (double v : values) m = std::min(m, v);
  return m;
}

}  // namespace hebbdual
