#include "fastmc/sketch.hpp"

#include <cmath>
#include <numeric>

#include "fastmc/rng.hpp"

namespace fastmc {

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::size_t sketch_dim_unclamped(std::size_t d, std::size_t n, double eps_ose,
                                 double delta_ose, double c_sk, double log_exponent) {
  double lg = std::log(static_cast<double>(n) / delta_ose);
  double raw = c_sk * std::pow(eps_ose, -2.0) * static_cast<double>(d) *
               std::pow(lg, log_exponent);
  if (!(raw >= 1.0)) return 1;
  return static_cast<std::size_t>(std::ceil(raw));
}

std::size_t sketch_dim(std::size_t d, std::size_t n, double eps_ose, double delta_ose,
                       double c_sk, double log_exponent) {
  return std::min(next_power_of_two(n),
                  sketch_dim_unclamped(d, n, eps_ose, delta_ose, c_sk, log_exponent));
}

SrhtOperator srht_new(std::size_t n_input, std::size_t m_sk, std::uint64_t seed) {
  if (n_input == 0) throw DimensionMismatch("srht_new: empty input");
  if (m_sk == 0) throw DimensionMismatch("srht_new: m_sk must be >= 1");
  SrhtOperator op;
  op.n_input = n_input;
  op.n_pad = next_power_of_two(n_input);
  op.m_sk = m_sk;
  op.scale = 1.0 / std::sqrt(static_cast<double>(m_sk));
  op.seed = seed;

  SplitMix64 rng(seed);
  op.signs.resize(op.n_pad);
  for (std::size_t i = 0; i < op.n_pad; ++i)
    op.signs[i] = (rng.next_u64() >> 63) ? -1.0 : 1.0;

  op.sampled_rows.resize(m_sk);
  if (m_sk == op.n_pad) {
    // Full transform: keep every row, no sampling loss.
    std::iota(op.sampled_rows.begin(), op.sampled_rows.end(), std::size_t{0});
  } else {
    for (std::size_t r = 0; r < m_sk; ++r)
      op.sampled_rows[r] = rng.next_below(op.n_pad);
  }
  return op;
}

void fwht_inplace(std::span<double> v) {
  std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw LengthNotPowerOfTwo("fwht_inplace: length is not a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        double x = v[j];
        double y = v[j + h];
        v[j] = x + y;
        v[j + h] = x - y;
      }
    }
  }
}

DenseMat srht_apply(const SrhtOperator& s, const DenseMat& a) {
  if (a.rows() != s.n_input)
    throw DimensionMismatch("srht_apply: row count does not match operator");
  DenseMat out(s.m_sk, a.cols());
  std::vector<double> buf(s.n_pad);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < s.n_input; ++i) buf[i] = s.signs[i] * a(i, j);
    for (std::size_t i = s.n_input; i < s.n_pad; ++i) buf[i] = 0.0;
    fwht_inplace(buf);
    for (std::size_t r = 0; r < s.m_sk; ++r)
      out(r, j) = s.scale * buf[s.sampled_rows[r]];
  }
  return out;
}

}  // namespace fastmc
