#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fastmc/dense_mat.hpp"

namespace fastmc {

struct Triplet {
  std::size_t i;
  std::size_t j;
  double v;
};

// The sampled observation set with values, stored column-compressed so the
// support of any column is a contiguous index range. Row indices are strictly
// increasing within each column; duplicates are rejected at construction.
class ObservedEntries {
 public:
  ObservedEntries() = default;
  ObservedEntries(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), col_ptr_(cols + 1, 0) {}

  // Sorts by (j, i); throws on duplicates or out-of-range indices.
  static ObservedEntries from_triplets(std::size_t rows, std::size_t cols,
                                       std::vector<Triplet> entries);
  static ObservedEntries from_csc(std::size_t rows, std::size_t cols,
                                  std::vector<std::size_t> col_ptr,
                                  std::vector<std::size_t> row_idx,
                                  std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return row_idx_.size(); }

  const std::vector<std::size_t>& col_ptr() const { return col_ptr_; }
  const std::vector<std::size_t>& row_idx() const { return row_idx_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t col_begin(std::size_t j) const { return col_ptr_[j]; }
  std::size_t col_end(std::size_t j) const { return col_ptr_[j + 1]; }
  std::size_t col_size(std::size_t j) const { return col_ptr_[j + 1] - col_ptr_[j]; }

  ObservedEntries transposed() const;
  ObservedEntries scaled(double factor) const;
  DenseMat to_dense() const;

  DenseMat multiply(const DenseMat& x) const;            // A * X
  DenseMat transpose_multiply(const DenseMat& y) const;  // A^T * Y

  double values_frobenius() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::size_t> row_idx_;
  std::vector<double> values_;
};

// "omega v1" text format: header `omega <m> <n> <nnz>`, then nnz lines
// `i j value` (0-based) sorted by (j, i).
void write_omega(std::ostream& os, const ObservedEntries& omega);
void write_omega_file(const std::string& path, const ObservedEntries& omega);
ObservedEntries read_omega(std::istream& is);
ObservedEntries read_omega_file(const std::string& path);

}  // namespace fastmc
