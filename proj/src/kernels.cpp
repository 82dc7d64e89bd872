// SPDX-License-Identifier: Apache-2.0

#include "matexpre/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace matexpre::kernels
{

namespace
{

// Slow path for sums of squares that underflowed to zero or overflowed.
double scaled_norm2(std::span<const Complex> x)
{
  double big = 0.0;
  for (const Complex& v : x) big = std::max({big, std::abs(v.real()), std::abs(v.imag())});
  if (big == 0.0 || !std::isfinite(big)) return big;
  double acc = 0.0;
  for (const Complex& v : x) acc += std::norm(v / big);
  return big * std::sqrt(acc);
}

}  // namespace

namespace
{

std::ptrdiff_t ssize(std::span<const Complex> x) { return static_cast<std::ptrdiff_t>(x.size()); }

template <typename ChunkFn>
Complex chunked_sum(std::size_t n, ChunkFn&& chunk_sum)
{
  const std::size_t n_chunks = (n + reduction_chunk - 1) / reduction_chunk;
  if (n_chunks <= 1) {
    return chunk_sum(std::size_t{0}, n);
  }
  std::vector<Complex> partial(n_chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * reduction_chunk;
    partial[c] = chunk_sum(begin, std::min(n, begin + reduction_chunk));
  }
  Complex total = 0.0;
  for (const Complex& p : partial) {
    total += p;
  }
  return total;
}

}  // namespace

void spmv(const CsrMatrix& A, std::span<const Complex> x, std::span<Complex> y)
{
  const auto row_ptr = A.row_ptr();
  const auto col_idx = A.col_idx();
  const auto values = A.values();
  const std::ptrdiff_t n_rows = A.rows();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n_rows; ++i) {
    double re = 0.0;
    double im = 0.0;
    for (Offset k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const Complex a = values[k];
      const Complex b = x[col_idx[k]];
      re += a.real() * b.real() - a.imag() * b.imag();
      im += a.real() * b.imag() + a.imag() * b.real();
    }
    y[i] = Complex(re, im);
  }
}

void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y)
{
  const std::ptrdiff_t n = ssize(x);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void xpby(std::span<const Complex> x, Complex b, std::span<Complex> y)
{
  const std::ptrdiff_t n = ssize(x);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    y[i] = x[i] + b * y[i];
  }
}

void scale(Complex a, std::span<Complex> x)
{
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    x[i] *= a;
  }
}

void copy(std::span<const Complex> x, std::span<Complex> y)
{
  const std::ptrdiff_t n = ssize(x);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    y[i] = x[i];
  }
}

void fill_zero(std::span<Complex> x)
{
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    x[i] = 0.0;
  }
}

Complex dot_conj(std::span<const Complex> x, std::span<const Complex> y)
{
  return chunked_sum(x.size(), [&](std::size_t begin, std::size_t end) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
      im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
    }
    return Complex(re, im);
  });
}

Complex dot_weighted(std::span<const Complex> x, std::span<const Complex> w,
                     std::span<const Complex> y)
{
  return chunked_sum(x.size(), [&](std::size_t begin, std::size_t end) {
    Complex acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      acc += x[k] * w[k] * y[k];
    }
    return acc;
  });
}

double norm2(std::span<const Complex> x)
{
  // Chunk partial sums of squared moduli, carried in the real part.
  const Complex s = chunked_sum(x.size(), [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      acc += std::norm(x[k]);
    }
    return Complex(acc, 0.0);
  });
  if (s.real() > 0.0 && std::isfinite(s.real())) return std::sqrt(s.real());
  return scaled_norm2(x);
}

void dot_conj_many(std::span<const Complex* const> qs, std::span<const Complex> w,
                   std::span<Complex> out)
{
  const std::size_t m = qs.size();
  const std::size_t n = w.size();
  const std::size_t n_chunks = std::max<std::size_t>(1, (n + reduction_chunk - 1) / reduction_chunk);
  std::vector<Complex> partial(n_chunks * m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * reduction_chunk;
    const std::size_t end = std::min(n, begin + reduction_chunk);
    Complex* acc = partial.data() + static_cast<std::size_t>(c) * m;
    for (std::size_t i = 0; i < m; ++i) {
      const Complex* q = qs[i];
      double re = 0.0;
      double im = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        re += q[k].real() * w[k].real() + q[k].imag() * w[k].imag();
        im += q[k].real() * w[k].imag() - q[k].imag() * w[k].real();
      }
      acc[i] = Complex(re, im);
    }
  }
  for (std::size_t i = 0; i < m; ++i) out[i] = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    for (std::size_t i = 0; i < m; ++i) out[i] += partial[c * m + i];
  }
}

double subtract_combination(std::span<const Complex* const> qs, std::span<const Complex> c,
                            std::span<Complex> y)
{
  const std::size_t m = qs.size();
  // One pass per vector over a chunk that stays in cache, then the norm.
  const Complex s = chunked_sum(y.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = 0; i < m; ++i) {
      const Complex* q = qs[i];
      const double cr = c[i].real();
      const double ci = c[i].imag();
      for (std::size_t k = begin; k < end; ++k) {
        y[k] = Complex(y[k].real() - (cr * q[k].real() - ci * q[k].imag()),
                       y[k].imag() - (cr * q[k].imag() + ci * q[k].real()));
      }
    }
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) acc += std::norm(y[k]);
    return Complex(acc, 0.0);
  });
  if (s.real() > 0.0 && std::isfinite(s.real())) return std::sqrt(s.real());
  return scaled_norm2(y);
}

int configure_threads_from_env()
{
  if (const char* env = std::getenv("MATEXPRE_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      omp_set_num_threads(n);
    }
  }
  return omp_get_max_threads();
}

namespace serial
{

void spmv(const CsrMatrix& A, std::span<const Complex> x, std::span<Complex> y)
{
  const auto row_ptr = A.row_ptr();
  const auto col_idx = A.col_idx();
  const auto values = A.values();
  for (Index i = 0; i < A.rows(); ++i) {
    Complex acc = 0.0;
    for (Offset k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      acc += values[k] * x[col_idx[k]];
    }
    y[i] = acc;
  }
}

void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y)
{
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] += a * x[i];
  }
}

void xpby(std::span<const Complex> x, Complex b, std::span<Complex> y)
{
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + b * y[i];
  }
}

void scale(Complex a, std::span<Complex> x)
{
  for (Complex& v : x) {
    v *= a;
  }
}

Complex dot_conj(std::span<const Complex> x, std::span<const Complex> y)
{
  Complex acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += std::conj(x[k]) * y[k];
  }
  return acc;
}

Complex dot_weighted(std::span<const Complex> x, std::span<const Complex> w,
                     std::span<const Complex> y)
{
  Complex acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += x[k] * w[k] * y[k];
  }
  return acc;
}

double norm2(std::span<const Complex> x)
{
  double acc = 0.0;
  for (const Complex& v : x) {
    acc += std::norm(v);
  }
  if (acc > 0.0 && std::isfinite(acc)) return std::sqrt(acc);
  return scaled_norm2(x);
}

void dot_conj_many(std::span<const Complex* const> qs, std::span<const Complex> w,
                   std::span<Complex> out)
{
  for (std::size_t i = 0; i < qs.size(); ++i) {
    out[i] = dot_conj(std::span<const Complex>(qs[i], w.size()), w);
  }
}

double subtract_combination(std::span<const Complex* const> qs, std::span<const Complex> c,
                            std::span<Complex> y)
{
  for (std::size_t i = 0; i < qs.size(); ++i) {
    axpy(-c[i], std::span<const Complex>(qs[i], y.size()), y);
  }
  return norm2(y);
}

}  // namespace serial

}  // namespace matexpre::kernels
