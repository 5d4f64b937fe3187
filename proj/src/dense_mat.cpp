#include "fastmc/dense_mat.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fastmc/rng.hpp"

namespace fastmc {

DenseMat DenseMat::identity(std::size_t n) {
  DenseMat out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMat DenseMat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMat out(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionMismatch("from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

DenseMat DenseMat::column(const std::vector<double>& v) {
  DenseMat out(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) out(i, 0) = v[i];
  return out;
}

DenseMat DenseMat::transpose() const {
  DenseMat out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

DenseMat DenseMat::multiply(const DenseMat& other) const {
  if (cols_ != other.rows_) throw DimensionMismatch("multiply: inner dims differ");
  DenseMat out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      double a = (*this)(i, k);
      if (a == 0.0) continue;
      const double* brow = other.data() + k * other.cols_;
      double* orow = out.data() + i * other.cols_;
      for (std::size_t j = 0; j < other.cols_; ++j) orow[j] += a * brow[j];
    }
  }
  return out;
}

DenseMat DenseMat::transpose_multiply(const DenseMat& other) const {
  if (rows_ != other.rows_) throw DimensionMismatch("transpose_multiply: row counts differ");
  DenseMat out(cols_, other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* arow = data_.data() + r * cols_;
    const double* brow = other.data() + r * other.cols_;
    for (std::size_t i = 0; i < cols_; ++i) {
      double a = arow[i];
      if (a == 0.0) continue;
      double* orow = out.data() + i * other.cols_;
      for (std::size_t j = 0; j < other.cols_; ++j) orow[j] += a * brow[j];
    }
  }
  return out;
}

std::vector<double> DenseMat::matvec(const std::vector<double>& x) const {
  if (x.size() != cols_) throw DimensionMismatch("matvec: size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* arow = data_.data() + i * cols_;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += arow[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> DenseMat::transpose_matvec(const std::vector<double>& x) const {
  if (x.size() != rows_) throw DimensionMismatch("transpose_matvec: size mismatch");
  std::vector<double> y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    const double* arow = data_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) y[j] += arow[j] * xi;
  }
  return y;
}

std::vector<double> DenseMat::col(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void DenseMat::set_col(std::size_t j, const std::vector<double>& v) {
  if (v.size() != rows_) throw DimensionMismatch("set_col: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

double DenseMat::frobenius_norm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return std::sqrt(acc);
}

bool DenseMat::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void DenseMat::require_finite(const char* what) const {
  if (!all_finite()) throw NonFinite(std::string(what) + ": non-finite entry");
}

DenseMat operator+(const DenseMat& a, const DenseMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("operator+: shape mismatch");
  DenseMat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

DenseMat operator-(const DenseMat& a, const DenseMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("operator-: shape mismatch");
  DenseMat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

DenseMat operator*(double s, const DenseMat& a) {
  DenseMat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  return out;
}

double vec_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

DenseMat gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  SplitMix64 rng(seed);
  DenseMat out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = rng.next_gaussian();
  return out;
}

namespace {

void append_shortest(std::string& buf, double v) {
  char tmp[64];
  auto res = std::to_chars(tmp, tmp + sizeof(tmp), v);
  buf.append(tmp, res.ptr);
}

}  // namespace

void write_dmat(std::ostream& os, const DenseMat& a) {
  std::string buf;
  buf.reserve(a.cols() * 24 + 32);
  os << "dmat " << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    buf.clear();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) buf.push_back(' ');
      append_shortest(buf, a(i, j));
    }
    buf.push_back('\n');
    os << buf;
  }
}

void write_dmat_file(const std::string& path, const DenseMat& a) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  write_dmat(os, a);
  if (!os) throw FormatError("write failed: " + path);
}

DenseMat read_dmat(std::istream& is) {
  std::string magic;
  std::size_t rows = 0, cols = 0;
  if (!(is >> magic >> rows >> cols) || magic != "dmat")
    throw FormatError("dmat: bad header");
  DenseMat out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double v;
      if (!(is >> v)) throw FormatError("dmat: truncated data");
      out(i, j) = v;
    }
  out.require_finite("dmat");
  return out;
}

DenseMat read_dmat_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open: " + path);
  return read_dmat(is);
}

}  // namespace fastmc
