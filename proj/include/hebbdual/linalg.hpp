#pragma once

#include <cstddef>
#include <vector>

namespace hebbdual {

using Vec = std::vector<double>;

// Dense row-major matrix.  Desk-scale problems only; everything is O(n^3)
// textbook code on purpose so results are reproducible to the last bit.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Mat identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  Vec row(std::size_t i) const;
  Vec col(std::size_t j) const;

  friend bool operator==(const Mat& a, const Mat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);
void axpy(double alpha, const Vec& x, Vec& y);  // y += alpha * x
Vec scaled(const Vec& a, double s);
Vec sub(const Vec& a, const Vec& b);

Vec matvec(const Mat& a, const Vec& x);
Vec matvec_transpose(const Mat& a, const Vec& x);  // a^T x
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
double frobenius(const Mat& a);
double max_abs(const Mat& a);
double row_sum_norm(const Mat& a);  // induced infinity norm

// Gaussian elimination with partial pivoting; throws numerical_error when the
// best available pivot is effectively zero.
Vec solve(Mat a, Vec b);

// Modified Gram-Schmidt on the columns; throws numerical_error if a column is
// (numerically) linearly dependent on the previous ones.
Mat orthonormalize_columns(Mat a);

// Cyclic Jacobi sweep diagonalization for symmetric matrices.  Returns false
// if the off-diagonal mass fails to drop below `off_tol` within `max_sweeps`.
// Eigen pairs come out unsorted; `values[k]` matches column k of `vectors`.
bool jacobi_symmetric(Mat a, Vec& values, Mat& vectors, double off_tol,
                      int max_sweeps);

// Smallest eigenvalue of a symmetric matrix (via the Jacobi routine above).
double min_eigenvalue_symmetric(const Mat& a);

}  // namespace hebbdual
