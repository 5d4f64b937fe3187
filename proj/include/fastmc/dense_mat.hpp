#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fastmc/errors.hpp"

namespace fastmc {

// Row-major dense matrix of doubles. Vectors are plain std::vector<double>;
// a one-column DenseMat is used only where a matrix is genuinely expected.
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMat identity(std::size_t n);
  static DenseMat from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMat column(const std::vector<double>& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  DenseMat transpose() const;
  DenseMat multiply(const DenseMat& other) const;            // this * other
  DenseMat transpose_multiply(const DenseMat& other) const;  // this^T * other
  std::vector<double> matvec(const std::vector<double>& x) const;
  std::vector<double> transpose_matvec(const std::vector<double>& x) const;
  std::vector<double> col(std::size_t j) const;
  void set_col(std::size_t j, const std::vector<double>& v);

  double frobenius_norm() const;
  bool all_finite() const;
  // Throws NonFinite naming `what` when any entry is NaN or infinite.
  void require_finite(const char* what) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMat operator+(const DenseMat& a, const DenseMat& b);
DenseMat operator-(const DenseMat& a, const DenseMat& b);
DenseMat operator*(double s, const DenseMat& a);

double vec_norm(const std::vector<double>& v);
double vec_dot(const std::vector<double>& a, const std::vector<double>& b);

// i.i.d. standard normal entries, deterministic in seed.
DenseMat gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

// "dmat v1" text format: header `dmat <rows> <cols>`, then one line per row of
// space-separated decimals printed with shortest round-trip representation.
void write_dmat(std::ostream& os, const DenseMat& a);
void write_dmat_file(const std::string& path, const DenseMat& a);
DenseMat read_dmat(std::istream& is);
DenseMat read_dmat_file(const std::string& path);

}  // namespace fastmc
