#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace scale {

// Dense row-major matrix of doubles. Entry (r, c) lives at data[r * cols + c].
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  // Rows [begin, end) as a new matrix.
  Matrix slice_rows(std::size_t begin, std::size_t end) const;
  Matrix transpose() const;

  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

// Throws ConfigError when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);

// Numerically stable softmax applied independently to every row.
Matrix row_softmax(const Matrix& a);

// Element-wise mean. Throws ContractViolation on an empty list and
// ConfigError on a shape mismatch.
Matrix mean_of(std::span<const Matrix> matrices);

// Per-row normalization to zero mean and unit variance; no gain or bias.
Matrix layer_norm(const Matrix& a, double eps = 1e-5);

// Stacks matrices with equal column counts on top of each other.
Matrix vstack(std::span<const Matrix> blocks);

double max_abs_diff(const Matrix& a, const Matrix& b);

// Solves (A + ridge * I) x = b for symmetric positive semi-definite A via
// Cholesky. Throws NumericalError if the regularized system is not positive
// definite.
std::vector<double> solve_spd(const Matrix& a, std::span<const double> b, double ridge);

// Text form: "rows cols" on the first line, then one row per line with
// entries written as shortest round-trip decimals separated by single spaces.
std::string format_double(double v);
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);
std::string to_text(const Matrix& m);
Matrix from_text(const std::string& text);

}  // namespace scale
