#include "scale/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "scale/errors.hpp"

namespace scale {

namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(what) + ": shape mismatch " + shape_str(a) + " vs " +
                      shape_str(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ConfigError("matrix data length " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ConfigError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) {
    throw ContractViolation("slice_rows [" + std::to_string(begin) + ", " + std::to_string(end) +
                            ") out of range for " + std::to_string(rows_) + " rows");
  }
  std::vector<double> out(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>(end * cols_));
  return Matrix(end - begin, cols_, std::move(out));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ConfigError("matmul: inner dimensions differ (" + shape_str(a) + " x " + shape_str(b) +
                      ")");
  }
  Matrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = out.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double s = a(i, p);
      const double* src = b.row(p).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

Matrix row_softmax(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto in = a.row(r);
    auto dst = out.row(r);
    if (in.empty()) continue;
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      dst[c] = std::exp(in[c] - mx);
      sum += dst[c];
    }
    const double inv = 1.0 / sum;
    for (double& v : dst) v *= inv;
  }
  return out;
}

Matrix mean_of(std::span<const Matrix> matrices) {
  if (matrices.empty()) throw ContractViolation("mean_of: empty list");
  Matrix acc = matrices.front();
  for (std::size_t i = 1; i < matrices.size(); ++i) {
    require_same_shape(acc, matrices[i], "mean_of");
    acc += matrices[i];
  }
  acc *= 1.0 / static_cast<double>(matrices.size());
  return acc;
}

// eps acts as a floor on the variance, so rows that are already standardized
// come back unchanged and constant rows map to zero.
Matrix layer_norm(const Matrix& a, double eps) {
  Matrix out(a.rows(), a.cols());
  const double n = static_cast<double>(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto in = a.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(std::max(var, eps));
    auto dst = out.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) dst[c] = (in[c] - mean) * inv;
  }
  return out;
}

Matrix vstack(std::span<const Matrix> blocks) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool have_cols = false;
  for (const Matrix& b : blocks) {
    if (b.rows() == 0 && b.cols() == 0) continue;
    if (!have_cols) {
      cols = b.cols();
      have_cols = true;
    } else if (b.cols() != cols) {
      throw ConfigError("vstack: column mismatch " + std::to_string(cols) + " vs " +
                        std::to_string(b.cols()));
    }
    rows += b.rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const Matrix& b : blocks) data.insert(data.end(), b.data().begin(), b.data().end());
  return Matrix(rows, cols, std::move(data));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

std::vector<double> solve_spd(const Matrix& a, std::span<const double> b, double ridge) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw ConfigError("solve_spd: shape mismatch");
  // Lower-triangular Cholesky factor of A + ridge * I.
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j) + ridge;
    for (std::size_t p = 0; p < j; ++p) diag -= l(j, p) * l(j, p);
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw NumericalError("solve_spd: system is singular at pivot " + std::to_string(j));
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / l(j, j);
    }
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t p = 0; p < i; ++p) s -= l(i, p) * y[p];
    y[i] = s / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t p = i + 1; p < n; ++p) s -= l(p, i) * x[p];
    x[i] = s / l(i, i);
  }
  return x;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ' ';
      out << format_double(row[c]);
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(in >> rows >> cols)) throw InputError("matrix text: missing 'rows cols' header");
  std::vector<double> data;
  data.reserve(rows * cols);
  std::string tok;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    if (!(in >> tok)) throw InputError("matrix text: truncated after " + std::to_string(i) +
                                       " entries");
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw InputError("matrix text: bad entry '" + tok + "'");
    }
    data.push_back(v);
  }
  return Matrix(rows, cols, std::move(data));
}

std::string to_text(const Matrix& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

Matrix from_text(const std::string& text) {
  std::istringstream is(text);
  return read_matrix(is);
}

}  // namespace scale
