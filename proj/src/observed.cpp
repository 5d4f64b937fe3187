#include "fastmc/observed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace fastmc {

ObservedEntries ObservedEntries::from_triplets(std::size_t rows, std::size_t cols,
                                               std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.j != b.j ? a.j < b.j : a.i < b.i;
  });
  ObservedEntries out(rows, cols);
  out.row_idx_.reserve(entries.size());
  out.values_.reserve(entries.size());
  std::size_t cur_col = 0;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const Triplet& t = entries[e];
    if (t.i >= rows || t.j >= cols)
      throw FormatError("observed entries: index out of range");
    if (e > 0 && entries[e - 1].i == t.i && entries[e - 1].j == t.j)
      throw FormatError("observed entries: duplicate index");
    if (!std::isfinite(t.v)) throw NonFinite("observed entries: non-finite value");
    while (cur_col < t.j) out.col_ptr_[++cur_col] = e;
    out.row_idx_.push_back(t.i);
    out.values_.push_back(t.v);
  }
  while (cur_col < cols) out.col_ptr_[++cur_col] = entries.size();
  return out;
}

ObservedEntries ObservedEntries::from_csc(std::size_t rows, std::size_t cols,
                                          std::vector<std::size_t> col_ptr,
                                          std::vector<std::size_t> row_idx,
                                          std::vector<double> values) {
  if (col_ptr.size() != cols + 1 || col_ptr.front() != 0 ||
      col_ptr.back() != row_idx.size() || row_idx.size() != values.size())
    throw FormatError("observed entries: inconsistent csc arrays");
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_ptr[j] > col_ptr[j + 1])
      throw FormatError("observed entries: col_ptr not nondecreasing");
    for (std::size_t e = col_ptr[j]; e < col_ptr[j + 1]; ++e) {
      if (row_idx[e] >= rows) throw FormatError("observed entries: row out of range");
      if (e > col_ptr[j] && row_idx[e - 1] >= row_idx[e])
        throw FormatError("observed entries: rows not strictly increasing in column");
    }
  }
  ObservedEntries out(rows, cols);
  out.col_ptr_ = std::move(col_ptr);
  out.row_idx_ = std::move(row_idx);
  out.values_ = std::move(values);
  return out;
}

ObservedEntries ObservedEntries::transposed() const {
  std::vector<std::size_t> counts(rows_ + 1, 0);
  for (std::size_t i : row_idx_) ++counts[i + 1];
  for (std::size_t i = 0; i < rows_; ++i) counts[i + 1] += counts[i];
  std::vector<std::size_t> out_rows(nnz());
  std::vector<double> out_vals(nnz());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t e = col_ptr_[j]; e < col_ptr_[j + 1]; ++e) {
      std::size_t pos = cursor[row_idx_[e]]++;
      out_rows[pos] = j;
      out_vals[pos] = values_[e];
    }
  ObservedEntries out(cols_, rows_);
  out.col_ptr_ = std::move(counts);
  out.row_idx_ = std::move(out_rows);
  out.values_ = std::move(out_vals);
  return out;
}

ObservedEntries ObservedEntries::scaled(double factor) const {
  ObservedEntries out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

DenseMat ObservedEntries::to_dense() const {
  DenseMat out(rows_, cols_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t e = col_ptr_[j]; e < col_ptr_[j + 1]; ++e)
      out(row_idx_[e], j) = values_[e];
  return out;
}

DenseMat ObservedEntries::multiply(const DenseMat& x) const {
  if (x.rows() != cols_) throw DimensionMismatch("observed multiply: shape mismatch");
  DenseMat out(rows_, x.cols());
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t e = col_ptr_[j]; e < col_ptr_[j + 1]; ++e) {
      double v = values_[e];
      double* orow = out.data() + row_idx_[e] * x.cols();
      const double* xrow = x.data() + j * x.cols();
      for (std::size_t l = 0; l < x.cols(); ++l) orow[l] += v * xrow[l];
    }
  }
  return out;
}

DenseMat ObservedEntries::transpose_multiply(const DenseMat& y) const {
  if (y.rows() != rows_)
    throw DimensionMismatch("observed transpose_multiply: shape mismatch");
  DenseMat out(cols_, y.cols());
  for (std::size_t j = 0; j < cols_; ++j) {
    double* orow = out.data() + j * y.cols();
    for (std::size_t e = col_ptr_[j]; e < col_ptr_[j + 1]; ++e) {
      double v = values_[e];
      const double* yrow = y.data() + row_idx_[e] * y.cols();
      for (std::size_t l = 0; l < y.cols(); ++l) orow[l] += v * yrow[l];
    }
  }
  return out;
}

double ObservedEntries::values_frobenius() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc);
}

void write_omega(std::ostream& os, const ObservedEntries& omega) {
  os << "omega " << omega.rows() << ' ' << omega.cols() << ' ' << omega.nnz() << '\n';
  char tmp[64];
  std::string line;
  for (std::size_t j = 0; j < omega.cols(); ++j)
    for (std::size_t e = omega.col_begin(j); e < omega.col_end(j); ++e) {
      line.clear();
      line += std::to_string(omega.row_idx()[e]);
      line += ' ';
      line += std::to_string(j);
      line += ' ';
      auto res = std::to_chars(tmp, tmp + sizeof(tmp), omega.values()[e]);
      line.append(tmp, res.ptr);
      line += '\n';
      os << line;
    }
}

void write_omega_file(const std::string& path, const ObservedEntries& omega) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  write_omega(os, omega);
  if (!os) throw FormatError("write failed: " + path);
}

ObservedEntries read_omega(std::istream& is) {
  std::string magic;
  std::size_t m = 0, n = 0, nnz = 0;
  if (!(is >> magic >> m >> n >> nnz) || magic != "omega")
    throw FormatError("omega: bad header");
  std::vector<Triplet> entries;
  entries.reserve(nnz);
  for (std::size_t e = 0; e < nnz; ++e) {
    Triplet t;
    if (!(is >> t.i >> t.j >> t.v)) throw FormatError("omega: truncated data");
    entries.push_back(t);
  }
  return ObservedEntries::from_triplets(m, n, std::move(entries));
}

ObservedEntries read_omega_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open: " + path);
  return read_omega(is);
}

}  // namespace fastmc
